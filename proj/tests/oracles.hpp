#pragma once
// Independent, deliberately naive reference implementations used only by tests.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <gmpxx.h>

#include "tkh/braid.hpp"

namespace oracle {

// Dense rank over the rationals (or mod 2) by textbook row reduction.
inline int dense_rank(std::vector<std::vector<long long>> rows, bool mod2) {
    if (rows.empty()) return 0;
    std::size_t nr = rows.size(), nc = rows[0].size();
    std::vector<std::vector<mpq_class>> a(nr, std::vector<mpq_class>(nc));
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) a[i][j] = static_cast<long>(mod2 ? ((rows[i][j] % 2 + 2) % 2) : rows[i][j]);
    int rank = 0;
    for (std::size_t c = 0; c < nc && static_cast<std::size_t>(rank) < nr; ++c) {
        std::size_t p = static_cast<std::size_t>(rank);
        while (p < nr && a[p][c] == 0) ++p;
        if (p == nr) continue;
        std::swap(a[p], a[static_cast<std::size_t>(rank)]);
        for (std::size_t i = 0; i < nr; ++i) {
            if (i == static_cast<std::size_t>(rank) || a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[static_cast<std::size_t>(rank)][c];
            for (std::size_t j = 0; j < nc; ++j) {
                a[i][j] -= f * a[static_cast<std::size_t>(rank)][j];
                if (mod2) {
                    mpz_class v = a[i][j].get_num() % 2;
                    if (v < 0) v += 2;
                    a[i][j] = v;
                }
            }
        }
        ++rank;
    }
    return rank;
}

// Braid word with uniformly random letters.
inline tkh::BraidWord random_word(std::mt19937_64& rng, int strands, int max_len, int min_len = 0) {
    std::uniform_int_distribution<int> len(min_len, max_len);
    std::uniform_int_distribution<int> idx(1, strands - 1);
    std::uniform_int_distribution<int> sgn(0, 1);
    tkh::BraidWord w;
    w.strands = strands;
    int n = len(rng);
    for (int k = 0; k < n; ++k) w.letters.push_back({idx(rng), sgn(rng) ? 1 : -1});
    return w;
}

// Strand-tracking permutation computed independently of the library.
inline std::vector<int> strand_endpoints(const tkh::BraidWord& w) {
    std::vector<int> where(static_cast<std::size_t>(w.strands));
    for (int p = 0; p < w.strands; ++p) where[p] = p;
    for (const auto& l : w.letters)
        for (int& x : where) {
            if (x == l.index - 1)
                x = l.index;
            else if (x == l.index)
                x = l.index - 1;
        }
    return where;
}

}  // namespace oracle

namespace oracle {

// Circle count of a braid-closure resolution, independent of the library's tangle code.
// bits: bit c set = 1-resolution at letter c. 0-resolution of a positive letter is vertical.
inline int closure_circles(const tkh::BraidWord& w, std::uint64_t bits) {
    int b = w.strands;
    int rows = static_cast<int>(w.letters.size());
    int levels = rows == 0 ? 1 : rows;
    std::vector<int> parent(static_cast<std::size_t>(levels * b));
    for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = static_cast<int>(k);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int x, int y) { parent[find(x)] = find(y); };
    auto at = [&](int level, int pos) { return (level % levels) * b + pos; };
    for (int r = 0; r < rows; ++r) {
        const auto& l = w.letters[static_cast<std::size_t>(r)];
        int i = l.index - 1;
        bool one = (bits >> r) & 1;
        bool vertical = (l.sign > 0) != one;
        for (int p = 0; p < b; ++p)
            if (p != i && p != i + 1) unite(at(r, p), at(r + 1, p));
        if (vertical) {
            unite(at(r, i), at(r + 1, i));
            unite(at(r, i + 1), at(r + 1, i + 1));
        } else {
            unite(at(r, i), at(r, i + 1));
            unite(at(r + 1, i), at(r + 1, i + 1));
        }
    }
    std::set<int> roots;
    for (std::size_t k = 0; k < parent.size(); ++k) roots.insert(find(static_cast<int>(k)));
    return static_cast<int>(roots.size());
}

// Unnormalized Jones polynomial of a braid closure by the Kauffman bracket state sum,
// as exponent -> coefficient in q. Equals the graded Euler characteristic of Khovanov homology.
inline std::map<int, long long> jones_unnormalized(const tkh::BraidWord& w) {
    int n = static_cast<int>(w.letters.size());
    int np = w.n_plus(), nm = w.n_minus();
    std::map<int, long long> total;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        int r = __builtin_popcountll(s);
        int m = closure_circles(w, s);
        // (-q)^r (q + 1/q)^m
        std::map<int, long long> term{{r, (r % 2) ? -1 : 1}};
        for (int k = 0; k < m; ++k) {
            std::map<int, long long> next;
            for (auto [e, c] : term) {
                next[e + 1] += c;
                next[e - 1] += c;
            }
            term.swap(next);
        }
        for (auto [e, c] : term) total[e + np - 2 * nm] += (nm % 2 ? -c : c);
    }
    for (auto it = total.begin(); it != total.end();)
        it = it->second == 0 ? total.erase(it) : std::next(it);
    return total;
}

// Dehornoy sign from the Artin action on the free group: at the lowest level i where x_i moves,
// the braid is sigma_i-positive exactly when the image of x_i ends in x_i^-1.
inline int free_group_sign(const tkh::BraidWord& w) {
    auto image = [&](int i) {
        std::vector<int> x{i};
        for (const auto& l : w.letters) {
            int a = l.index;
            std::vector<int> y;
            auto push = [&](int g) {
                if (!y.empty() && y.back() == -g)
                    y.pop_back();
                else
                    y.push_back(g);
            };
            for (int g : x) {
                int s = g > 0 ? 1 : -1, k = s * g;
                std::vector<int> sub;
                if (k == a) sub = l.sign > 0 ? std::vector<int>{a, a + 1, -a} : std::vector<int>{a + 1};
                else if (k == a + 1) sub = l.sign > 0 ? std::vector<int>{a} : std::vector<int>{-(a + 1), a, a + 1};
                else sub = {k};
                if (s > 0)
                    for (int h : sub) push(h);
                else
                    for (auto it = sub.rbegin(); it != sub.rend(); ++it) push(-*it);
            }
            x.swap(y);
        }
        return x;
    };
    for (int i = 1; i < w.strands; ++i) {
        auto x = image(i);
        if (x == std::vector<int>{i}) continue;
        return x.back() == -i ? 1 : -1;
    }
    return 0;
}

}  // namespace oracle
