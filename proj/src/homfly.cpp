#include "tkh/homfly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "tkh/skeinstab.hpp"

namespace tkh {

LaurentPoly2 LaurentPoly2::monomial(int a, int z, const mpz_class& c) {
    LaurentPoly2 p;
    p.add_term(a, z, c);
    return p;
}

mpz_class LaurentPoly2::coefficient(int a, int z) const {
    auto it = terms_.find({a, z});
    return it == terms_.end() ? mpz_class(0) : it->second;
}

void LaurentPoly2::add_term(int a, int z, const mpz_class& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace({a, z}, c);
    if (fresh) return;
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

LaurentPoly2& LaurentPoly2::operator+=(const LaurentPoly2& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
    return *this;
}

LaurentPoly2& LaurentPoly2::operator-=(const LaurentPoly2& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
    return *this;
}

LaurentPoly2 LaurentPoly2::operator+(const LaurentPoly2& o) const {
    LaurentPoly2 r = *this;
    return r += o;
}

LaurentPoly2 LaurentPoly2::operator-(const LaurentPoly2& o) const {
    LaurentPoly2 r = *this;
    return r -= o;
}

LaurentPoly2 LaurentPoly2::operator*(const LaurentPoly2& o) const {
    LaurentPoly2 r;
    for (const auto& [e, c] : terms_)
        for (const auto& [f, d] : o.terms_) r.add_term(e.first + f.first, e.second + f.second, c * d);
    return r;
}

LaurentPoly2 LaurentPoly2::shifted(int da, int dz, const mpz_class& c) const {
    LaurentPoly2 r;
    if (c == 0) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(Exps{e.first + da, e.second + dz}, v * c);
    return r;
}

namespace {

void print_power(std::ostream& os, char var, int e) {
    if (e == 0) return;
    os << var;
    if (e != 1) os << '^' << e;
}

}  // namespace

std::string LaurentPoly2::str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Exps, mpz_class>> order(terms_.begin(), terms_.end());
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
        return std::make_pair(x.first.second, x.first.first) < std::make_pair(y.first.second, y.first.first);
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : order) {
        mpz_class mag = abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        bool unit = e.first == 0 && e.second == 0;
        if (mag != 1 || unit) os << mag;
        print_power(os, 'a', e.first);
        print_power(os, 'z', e.second);
    }
    return os.str();
}

std::string LaurentPoly2::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, c] : terms_) {
        nlohmann::json t = {{"a", e.first}, {"z", e.second}};
        if (c.fits_slong_p())
            t["c"] = c.get_si();
        else
            t["c"] = c.get_str();
        arr.push_back(t);
    }
    return arr.dump();
}

LaurentPoly2 LaurentPoly2::parse(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '{' && ch != '}' && ch != '*') s += ch;
    LaurentPoly2 p;
    if (s.empty()) throw std::invalid_argument("empty polynomial");
    if (s == "0") return p;
    std::size_t k = 0;
    auto read_int = [&]() {
        std::size_t start = k;
        if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k == start || (k == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
            throw std::invalid_argument("expected an integer in polynomial '" + text + "'");
        return std::stoi(s.substr(start, k - start));
    };
    while (k < s.size()) {
        int sign = 1;
        if (s[k] == '+' || s[k] == '-') {
            sign = s[k] == '-' ? -1 : 1;
            ++k;
        }
        mpz_class coef = 1;
        std::size_t start = k;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k > start) coef = mpz_class(s.substr(start, k - start));
        int ea = 0, ez = 0;
        bool any = k > start;
        while (k < s.size() && (s[k] == 'a' || s[k] == 'z')) {
            char var = s[k++];
            int e = 1;
            if (k < s.size() && s[k] == '^') {
                ++k;
                e = read_int();
            }
            (var == 'a' ? ea : ez) += e;
            any = true;
        }
        if (!any) throw std::invalid_argument("malformed term in polynomial '" + text + "'");
        p.add_term(ea, ez, coef * sign);
    }
    return p;
}

LaurentPoly2 homfly_delta() {
    LaurentPoly2 d = LaurentPoly2::monomial(1, -1);
    d.add_term(-1, -1, -1);
    return d;
}

namespace {

BraidWord cyclic_reduce(BraidWord w) {
    while (true) {
        w = free_reduce(w);
        if (w.letters.size() < 2) return w;
        const Letter& f = w.letters.front();
        const Letter& l = w.letters.back();
        if (f.index != l.index || f.sign != -l.sign) return w;
        w.letters.pop_back();
        w.letters.erase(w.letters.begin());
    }
}

BraidWord flip(const BraidWord& w) {
    BraidWord out = w;
    for (auto& l : out.letters) l.index = w.strands - l.index;
    return out;
}

class SkeinEngine {
public:
    explicit SkeinEngine(std::size_t max_nodes) : max_nodes_(max_nodes), delta_(homfly_delta()) {}

    LaurentPoly2 eval(BraidWord w) {
        w = cyclic_reduce(w);
        int b = w.strands;
        if (w.letters.empty()) return power_of_delta(b - 1);
        std::vector<int> count(static_cast<std::size_t>(b), 0);
        for (const auto& l : w.letters) ++count[l.index];
        for (int i = 1; i < b; ++i)
            if (count[i] == 0) return split(w, i);
        if (count[b - 1] == 1) return eval(*destabilize(w));
        if (count[1] == 1) return eval(*destabilize(flip(w)));
        auto [key, rep] = canonical(w);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        LaurentPoly2 p = skein(rep);
        if (memo_.size() >= max_nodes_) throw ResourceLimit("skein tree exceeds node limit");
        memo_.emplace(std::move(key), p);
        return p;
    }

private:
    std::size_t max_nodes_;
    LaurentPoly2 delta_;
    std::unordered_map<std::string, LaurentPoly2> memo_;
    std::vector<LaurentPoly2> delta_powers_{LaurentPoly2::constant(1)};

    const LaurentPoly2& power_of_delta(int k) {
        while (static_cast<int>(delta_powers_.size()) <= k) delta_powers_.push_back(delta_powers_.back() * delta_);
        return delta_powers_[static_cast<std::size_t>(k)];
    }

    // Generator i is unused: the closure is a split union of strands 1..i and i+1..b.
    LaurentPoly2 split(const BraidWord& w, int i) {
        BraidWord left, right;
        left.strands = i;
        right.strands = w.strands - i;
        for (const auto& l : w.letters) {
            if (l.index < i)
                left.letters.push_back(l);
            else
                right.letters.push_back({l.index - i, l.sign});
        }
        return delta_ * eval(left) * eval(right);
    }

    // Least encoding over cyclic rotations and the flip sigma_i -> sigma_{b-i}.
    static std::pair<std::string, BraidWord> canonical(const BraidWord& w) {
        std::size_t n = w.letters.size();
        std::vector<int> best;
        BraidWord best_word;
        for (const BraidWord& v : {w, flip(w)}) {
            std::vector<int> code(n);
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t k = 0; k < n; ++k) {
                    const Letter& l = v.letters[(s + k) % n];
                    code[k] = l.sign * l.index;
                }
                if (best.empty() || code < best) {
                    best = code;
                    best_word.strands = w.strands;
                    best_word.letters.assign(v.letters.begin() + static_cast<std::ptrdiff_t>(s), v.letters.end());
                    best_word.letters.insert(best_word.letters.end(), v.letters.begin(),
                                             v.letters.begin() + static_cast<std::ptrdiff_t>(s));
                }
            }
        }
        std::string key = std::to_string(w.strands) + ":";
        for (int c : best) key += std::to_string(c) + ",";
        return {key, best_word};
    }

    // Crossings in order of first visit, walking components from their least top position;
    // `from_right` tells whether the first visitor enters from the right-hand position.
    static std::vector<std::pair<std::size_t, bool>> first_visits(const BraidWord& w) {
        std::size_t n = w.letters.size();
        std::vector<bool> seen(n, false), top_done(static_cast<std::size_t>(w.strands), false);
        std::vector<std::pair<std::size_t, bool>> order;
        for (int start = 0; start < w.strands; ++start) {
            if (top_done[start]) continue;
            int pos = start;
            do {
                top_done[pos] = true;
                for (std::size_t k = 0; k < n; ++k) {
                    int left = w.letters[k].index - 1;
                    if (pos != left && pos != left + 1) continue;
                    bool right = pos == left + 1;
                    if (!seen[k]) {
                        seen[k] = true;
                        order.emplace_back(k, right);
                    }
                    pos = right ? left : left + 1;
                }
            } while (pos != start);
        }
        return order;
    }

    // Switch non-descending crossings in visiting order; each switch spawns a smoothed child.
    // A positive letter has its over strand entering from the right.
    LaurentPoly2 skein(BraidWord w) {
        LaurentPoly2 result, coef = LaurentPoly2::constant(1);
        for (const auto& [k, from_right] : first_visits(w)) {
            Letter& l = w.letters[k];
            if ((l.sign > 0) == from_right) continue;
            BraidWord smoothed = w;
            smoothed.letters.erase(smoothed.letters.begin() + static_cast<std::ptrdiff_t>(k));
            LaurentPoly2 child = eval(smoothed);
            if (l.sign > 0) {
                // P+ = a^-2 P- + a^-1 z P0
                result += (coef * child).shifted(-1, 1);
                coef = coef.shifted(-2, 0);
            } else {
                // P- = a^2 P+ - a z P0
                result += (coef * child).shifted(1, 1, -1);
                coef = coef.shifted(2, 0);
            }
            l.sign = -l.sign;
        }
        result += coef * power_of_delta(closure_components(w) - 1);
        return result;
    }
};

}  // namespace

LaurentPoly2 homfly(const BraidWord& w, std::size_t max_nodes) {
    SkeinEngine e(max_nodes);
    return e.eval(w);
}

LaurentPoly2 homfly(const TangleDiagram& d, std::size_t max_nodes) {
    BraidWord w;
    w.strands = d.strands();
    for (const auto& t : d.tiles()) {
        if (t.kind != Tile::Kind::Crossing) throw std::invalid_argument("HOMFLY-PT needs a diagram of crossing tiles");
        w.letters.push_back({t.index, t.sign});
    }
    for (int f : d.orientation())
        if (f != 1) throw std::invalid_argument("HOMFLY-PT needs the downward braid orientation");
    return homfly(w, max_nodes);
}

LaurentPoly2 torus_homfly(int q) {
    if (q < 2) throw std::invalid_argument("torus_homfly needs q >= 2");
    LaurentPoly2 prev = homfly(power(BraidWord(2, {{1, -1}}), 2));
    if (q == 2) return prev;
    LaurentPoly2 cur = homfly(power(BraidWord(2, {{1, -1}}), 3));
    for (int k = 4; k <= q; ++k) {
        LaurentPoly2 next = prev.shifted(2, 0) - cur.shifted(1, 1);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

int a_degree(const LaurentPoly2& p) {
    if (p.is_zero()) throw std::invalid_argument("a-degree of the zero polynomial");
    int best = p.terms().begin()->first.first;
    for (const auto& [e, c] : p.terms()) best = std::max(best, e.first);
    return best;
}

int msl_upper_bound(const LaurentPoly2& p) { return -a_degree(p) - 1; }

std::string Obstruction::str() const {
    std::ostringstream os;
    os << (kind == ObstructionKind::AllRepresentativesVanish ? "all-representatives-vanish" : "inconclusive")
       << ": Kh^0 support {";
    bool first = true;
    for (int j : support) {
        os << (first ? "" : ", ") << j;
        first = false;
    }
    os << "}, self-linking bound " << bound;
    return os.str();
}

Obstruction whole_link_psi_obstruction(const BraidWord& w, Ring ring) {
    return whole_link_psi_obstruction(w, homfly(w), ring);
}

Obstruction whole_link_psi_obstruction(const BraidWord& w, const LaurentPoly2& p, Ring ring) {
    Obstruction o;
    o.polynomial = p;
    o.bound = msl_upper_bound(o.polynomial);
    TangleDiagram d = from_braid(w);
    GradingBox box = grading_support_bounds(d);
    HomologyOptions ho;
    ho.ring = ring;
    ho.window = GradingBox{0, 0, box.j_min, box.j_max};
    o.support = homology_table(d, ho).support_j(0);
    bool clear = std::all_of(o.support.begin(), o.support.end(), [&](int j) { return j > o.bound; });
    o.kind = clear ? ObstructionKind::AllRepresentativesVanish : ObstructionKind::Inconclusive;
    return o;
}

PretzelPrediction pretzel_support_formula(int r, int q) {
    if (r < 2 || r % 2 != 0) throw std::invalid_argument("pretzel formula needs an even r >= 2");
    if (q <= 0 || q % 2 == 0) throw std::invalid_argument("pretzel formula needs an odd q > 0");
    return {{1 - 2 * q, -1 - 2 * q}, 2 + r + 2 * q};
}

}  // namespace tkh
