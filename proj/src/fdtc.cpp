#include "tkh/fdtc.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace tkh {

namespace {

std::vector<int> signed_letters(const BraidWord& w) {
    std::vector<int> v;
    v.reserve(w.size());
    for (const auto& l : w.letters) v.push_back(l.sign * l.index);
    return v;
}

BraidWord from_signed(int strands, const std::vector<int>& v) {
    std::vector<Letter> ls;
    ls.reserve(v.size());
    for (int x : v) ls.push_back({std::abs(x), x > 0 ? 1 : -1});
    return BraidWord(strands, std::move(ls));
}

// Always reduces the handle that closes first; it cannot contain another handle, so it is permitted.
std::vector<int> reduce(std::vector<int> w, std::size_t max_steps) {
    std::size_t steps = 0;
    std::size_t k = 0;
    while (k < w.size()) {
        int x = w[k], i = std::abs(x);
        std::ptrdiff_t j = static_cast<std::ptrdiff_t>(k) - 1;
        while (j >= 0 && std::abs(w[static_cast<std::size_t>(j)]) > i) --j;
        if (j < 0 || w[static_cast<std::size_t>(j)] != -x) {
            ++k;
            continue;
        }
        if (++steps > max_steps) throw HandleReductionLimit("handle reduction exceeded " + std::to_string(max_steps) + " steps");
        auto start = static_cast<std::size_t>(j);
        int e = w[start] > 0 ? 1 : -1;
        std::vector<int> v;
        for (std::size_t t = start + 1; t < k; ++t) {
            int y = w[t];
            if (std::abs(y) == i + 1) {
                v.push_back(-e * (i + 1));
                v.push_back(y > 0 ? i : -i);
                v.push_back(e * (i + 1));
            } else {
                v.push_back(y);
            }
        }
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(start), w.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        w.insert(w.begin() + static_cast<std::ptrdiff_t>(start), v.begin(), v.end());
        k = start;
    }
    return w;
}

DehornoySign sign_of_reduced(const std::vector<int>& w) {
    if (w.empty()) return DehornoySign::Trivial;
    auto low = std::min_element(w.begin(), w.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
    return *low > 0 ? DehornoySign::Positive : DehornoySign::Negative;
}

BraidWord twist_power(int strands, int m) { return power(full_twist(strands), m); }

std::vector<int> cyclic_reduce(std::vector<int> v) {
    std::vector<int> out;
    for (int x : v) {
        if (!out.empty() && out.back() == -x)
            out.pop_back();
        else
            out.push_back(x);
    }
    std::size_t a = 0, b = out.size();
    while (b - a >= 2 && out[a] == -out[b - 1]) {
        ++a;
        --b;
    }
    return {out.begin() + static_cast<std::ptrdiff_t>(a), out.begin() + static_cast<std::ptrdiff_t>(b)};
}

bool generator_free(const std::vector<int>& v, std::size_t from, int strands) {
    std::vector<bool> seen(static_cast<std::size_t>(strands), false);
    for (std::size_t t = from; t < v.size(); ++t) seen[static_cast<std::size_t>(std::abs(v[t]))] = true;
    for (int i = 1; i < strands; ++i)
        if (!seen[static_cast<std::size_t>(i)]) return true;
    return false;
}

}  // namespace

std::string to_string(DehornoySign s) {
    switch (s) {
        case DehornoySign::Positive: return "positive";
        case DehornoySign::Negative: return "negative";
        default: return "trivial";
    }
}

BraidWord handle_reduce(const BraidWord& w, const FdtcOptions& opt) {
    return from_signed(w.strands, reduce(signed_letters(w), opt.max_steps));
}

DehornoySign dehornoy_sign(const BraidWord& w, const FdtcOptions& opt) {
    return sign_of_reduced(reduce(signed_letters(w), opt.max_steps));
}

bool dehornoy_less(const BraidWord& x, const BraidWord& y, const FdtcOptions& opt) {
    return dehornoy_sign(concat(inverse(x), y), opt) == DehornoySign::Positive;
}

int dehornoy_floor(const BraidWord& w, const FdtcOptions& opt) {
    if (w.strands < 2) return 0;
    int range = opt.floor_range >= 0 ? opt.floor_range : static_cast<int>(w.size()) + 1;
    auto below = [&](int m) {  // w < Delta^2m
        return dehornoy_sign(concat(twist_power(w.strands, -m), w), opt) == DehornoySign::Negative;
    };
    auto out_of_range = [&](int m) {
        return std::runtime_error("floor search passed |m| = " + std::to_string(std::abs(m)) + " without settling");
    };
    if (!below(0)) {
        int m = 1;
        while (!below(m))
            if (++m > range) throw out_of_range(m);
        return m - 1;
    }
    int m = -1;
    while (below(m))
        if (--m < -range) throw out_of_range(m);
    return m;
}

std::string FdtcBounds::str() const {
    std::ostringstream os;
    const char* src = provenance == FdtcProvenance::Pattern         ? "pattern"
                      : provenance == FdtcProvenance::FloorSequence ? "floor-sequence"
                                                                    : "letter-count";
    os << "[" << lower.get_str() << ", " << upper.get_str() << "] (" << src << ")";
    return os.str();
}

FdtcBounds fdtc_letter_bounds(const BraidWord& w) {
    FdtcBounds b;
    if (w.strands < 2) return b;
    auto v = signed_letters(free_reduce(w));
    std::vector<long> r(static_cast<std::size_t>(w.strands), 0), s(r.size(), 0);
    for (int x : v) ++(x > 0 ? r : s)[static_cast<std::size_t>(std::abs(x))];
    long lo = -s[1], hi = r[1];
    for (std::size_t i = 2; i < r.size(); ++i) {
        lo = std::max(lo, -s[i]);
        hi = std::min(hi, r[i]);
    }
    b.lower = lo;
    b.upper = hi;
    return b;
}

std::optional<mpq_class> fdtc_pattern(const BraidWord& w, const FdtcOptions& opt) {
    int n = w.strands;
    if (n < 2) return mpq_class(0);
    auto v = cyclic_reduce(signed_letters(w));
    if (generator_free(v, 0, n)) return mpq_class(0);
    auto bounds = fdtc_letter_bounds(w);
    int lo = static_cast<int>(bounds.lower.get_num().get_si()), hi = static_cast<int>(bounds.upper.get_num().get_si());
    std::vector<int> u(v.size());
    // A handle-free word of a braid without sigma_1 has no sigma_1, so reducing Delta^-2m times a
    // rotation exposes sigma_1-free remainders; other sigma_i-free remainders are found when they survive.
    for (std::size_t rot = 0; rot < v.size(); ++rot) {
        std::rotate_copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rot), v.end(), u.begin());
        for (int m = lo; m <= hi; ++m) {
            auto r = reduce(signed_letters(concat(twist_power(n, -m), from_signed(n, u))), opt.max_steps);
            if (generator_free(r, 0, n)) return mpq_class(m);
        }
    }
    return std::nullopt;
}

FdtcBounds fdtc_bounds(const BraidWord& w, const FdtcOptions& opt) {
    if (auto p = fdtc_pattern(w, opt)) {
        FdtcBounds b;
        b.lower = b.upper = *p;
        b.provenance = FdtcProvenance::Pattern;
        return b;
    }
    return fdtc_letter_bounds(w);
}

std::vector<mpq_class> floor_sequence(const BraidWord& w, int k_max, const FdtcOptions& opt) {
    if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    std::vector<mpq_class> out;
    for (int k = 1; k <= k_max; ++k) {
        mpq_class q(dehornoy_floor(power(w, k), opt), k);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

}  // namespace tkh
