#include "tkh/khovanov.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tkh/tangle_complex.hpp"

namespace tkh {

namespace {

struct KeyHash {
    std::size_t operator()(const ChainElement::Key& k) const {
        return std::hash<std::uint64_t>()(k.first * 0x9e3779b97f4a7c15ull ^ (k.second + 0x632be59bd9b4e019ull));
    }
};

// Visits all masks of `n` bits with `k` ones in increasing numeric order.
template <typename F>
void for_each_combination(int n, int k, F&& f) {
    if (k < 0 || k > n) return;
    if (k == 0) {
        f(std::uint64_t{0});
        return;
    }
    if (n > 63) throw ResourceLimit("more than 63 crossings or circles");
    std::uint64_t x = (std::uint64_t{1} << k) - 1;
    std::uint64_t limit = std::uint64_t{1} << n;
    while (x < limit) {
        f(x);
        std::uint64_t c = x & -x, r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
}

struct StateInfo {
    int circles = 0;
    std::vector<std::uint8_t> seg;  // segment -> circle
    std::vector<int> rep;           // circle -> smallest segment
};

class StateCache {
public:
    explicit StateCache(const TangleDiagram& d) : d_(d) {
        if (d.crossing_count() > 63) throw ResourceLimit("graded-piece engine limited to 63 crossings");
    }
    const StateInfo& get(std::uint64_t bits) {
        auto it = cache_.find(bits);
        if (it != cache_.end()) return it->second;
        CircleDecomposition cd = resolve(d_, KauffmanState{bits, d_.crossing_count()});
        if (cd.circle_count > 64) throw ResourceLimit("more than 64 circles in a resolution");
        StateInfo info;
        info.circles = cd.circle_count;
        info.seg.assign(cd.segment_circle.begin(), cd.segment_circle.end());
        info.rep.assign(static_cast<std::size_t>(cd.circle_count), -1);
        for (std::size_t s = 0; s < cd.segment_circle.size(); ++s)
            if (info.rep[cd.segment_circle[s]] < 0) info.rep[cd.segment_circle[s]] = static_cast<int>(s);
        return cache_.emplace(bits, std::move(info)).first->second;
    }

private:
    const TangleDiagram& d_;
    std::unordered_map<std::uint64_t, StateInfo> cache_;
};

int reduced_shift(bool reduced) { return reduced ? 1 : 0; }

// Differential of one generator through a state cache; calls emit(state, plus, sign).
template <typename F>
void differential_each(const TangleDiagram& d, StateCache& cache, std::uint64_t bits, std::uint64_t plus, F&& emit) {
    int n = d.crossing_count();
    const StateInfo& src = cache.get(bits);
    for (int c = 0; c < n; ++c) {
        if ((bits >> c) & 1) continue;
        std::uint64_t tbits = bits | (std::uint64_t{1} << c);
        int sign = (__builtin_popcountll(bits & ((std::uint64_t{1} << c) - 1)) % 2) ? -1 : 1;
        const StateInfo& tgt = cache.get(tbits);
        const StateInfo& s = src;
        int r = d.tile_of_crossing(c);
        int i = d.tiles()[static_cast<std::size_t>(r)].index - 1;
        int seg_a = d.segment(r, i), seg_b = d.segment(r + 1, i + 1);
        int a = s.seg[seg_a], b = s.seg[seg_b];
        std::uint64_t base = 0;
        for (int k = 0; k < tgt.circles; ++k) {
            int from = s.seg[tgt.rep[k]];
            if (from != a && from != b && ((plus >> from) & 1)) base |= std::uint64_t{1} << k;
        }
        if (a != b) {
            int m = tgt.seg[seg_a];
            bool pa = (plus >> a) & 1, pb = (plus >> b) & 1;
            if (!pa && !pb) continue;
            emit(tbits, (pa && pb) ? (base | (std::uint64_t{1} << m)) : base, sign);
        } else {
            int x = tgt.seg[seg_a], y = tgt.seg[seg_b];
            if ((plus >> a) & 1) {
                emit(tbits, base | (std::uint64_t{1} << x), sign);
                emit(tbits, base | (std::uint64_t{1} << y), sign);
            } else {
                emit(tbits, base, sign);
            }
        }
    }
}

std::vector<Generator> basis_impl(const TangleDiagram& d, StateCache& cache, int i, int j_unreduced, int marked,
                                  std::size_t max_dim) {
    int n = d.crossing_count();
    int np = d.n_plus(), nm = d.n_minus();
    int r = i + nm;
    int p = j_unreduced - i - np + nm;
    std::vector<Generator> out;
    for_each_combination(n, r, [&](std::uint64_t bits) {
        const StateInfo& info = cache.get(bits);
        int m = info.circles;
        if ((p + m) % 2 != 0) return;
        int q = (p + m) / 2;
        if (q < 0 || q > m) return;
        KauffmanState st{bits, n};
        int mc = marked >= 0 ? info.seg[d.segment(0, marked)] : -1;
        for_each_combination(m, q, [&](std::uint64_t plus) {
            if (mc >= 0 && !((plus >> mc) & 1)) return;
            out.push_back({st, Labeling{plus, m}});
            if (out.size() > max_dim) throw ResourceLimit("graded piece exceeds dimension limit");
        });
    });
    return out;
}

std::unordered_map<ChainElement::Key, int, KeyHash> index_of(const std::vector<Generator>& basis) {
    std::unordered_map<ChainElement::Key, int, KeyHash> idx;
    idx.reserve(basis.size() * 2);
    for (std::size_t k = 0; k < basis.size(); ++k) idx[{basis[k].state.bits, basis[k].labeling.plus}] = static_cast<int>(k);
    return idx;
}

SparseMatrix matrix_impl(const TangleDiagram& d, StateCache& cache, const std::vector<Generator>& src,
                         const std::vector<Generator>& tgt, int marked) {
    auto idx = index_of(tgt);
    SparseMatrix m(static_cast<int>(tgt.size()), static_cast<int>(src.size()));
    for (std::size_t col = 0; col < src.size(); ++col) {
        differential_each(d, cache, src[col].state.bits, src[col].labeling.plus,
                          [&](std::uint64_t tb, std::uint64_t tp, int sign) {
                              auto it = idx.find({tb, tp});
                              if (it == idx.end()) {
                                  if (marked >= 0) return;  // marked circle labeled v-: zero in the quotient
                                  throw std::logic_error("differential leaves the graded piece");
                              }
                              m.add(it->second, static_cast<int>(col), sign);
                          });
    }
    m.finalize();
    return m;
}

mpq_class reduce_coeff(const mpq_class& c, Ring ring) {
    if (ring != Ring::GF2) return c;
    if (c.get_den() != 1) throw std::invalid_argument("non-integral coefficient over GF2");
    mpz_class r = c.get_num() % 2;
    if (r < 0) r += 2;
    return mpq_class(r);
}

// Full complex by graded-piece enumeration, packaged like a reduced closure.
ClosedComplex naive_complex(const TangleDiagram& d, Ring ring, int marked, std::size_t max_dim,
                            const std::optional<GradingBox>& window) {
    StateCache cache(d);
    bool reduced = marked >= 0;
    int n = d.crossing_count(), np = d.n_plus(), nm = d.n_minus();
    ClosedComplex cc;
    cc.ring = ring;
    cc.reduced = reduced;
    std::map<int, std::map<int, std::vector<Generator>>> bases;  // i -> j -> basis
    for (int i = -nm; i <= np; ++i) {
        if (window && (i < window->i_min - 1 || i > window->i_max + 1)) continue;
        auto& row = bases[i];
        for_each_combination(n, i + nm, [&](std::uint64_t bits) {
            const StateInfo& info = cache.get(bits);
            int m = info.circles;
            int mc = reduced ? info.seg[d.segment(0, marked)] : -1;
            for (std::uint64_t plus = 0; plus < (std::uint64_t{1} << m); ++plus) {
                if (mc >= 0 && !((plus >> mc) & 1)) continue;
                int p = 2 * __builtin_popcountll(plus) - m;
                int j = p + i + np - nm - reduced_shift(reduced);
                auto& v = row[j];
                v.push_back({KauffmanState{bits, n}, Labeling{plus, m}});
                if (v.size() > max_dim) throw ResourceLimit("graded piece exceeds dimension limit");
            }
        });
    }
    for (auto& [i, row] : bases)
        for (auto& [j, basis] : row) {
            std::sort(basis.begin(), basis.end(), [](const Generator& a, const Generator& b) {
                return std::make_pair(a.state.bits, a.labeling.plus) < std::make_pair(b.state.bits, b.labeling.plus);
            });
            cc.dims[{i, j}] = static_cast<int>(basis.size());
        }
    for (auto& [i, row] : bases)
        for (auto& [j, basis] : row) {
            auto nit = bases.find(i + 1);
            static const std::vector<Generator> empty;
            const std::vector<Generator>* tgt = &empty;
            if (nit != bases.end()) {
                auto t = nit->second.find(j);
                if (t != nit->second.end()) tgt = &t->second;
            }
            if (nit == bases.end() && i + 1 <= np) continue;  // outside the window
            cc.differential.emplace(Grading{i, j}, matrix_impl(d, cache, basis, *tgt, marked));
        }
    return cc;
}

}  // namespace

std::string Labeling::str() const {
    std::string s;
    for (int k = 0; k < length; ++k) s.push_back(is_plus(k) ? '+' : '-');
    return s;
}

Labeling Labeling::parse(const std::string& s) {
    Labeling l;
    l.length = static_cast<int>(s.size());
    if (l.length > 64) throw std::invalid_argument("labeling longer than 64 circles");
    for (int k = 0; k < l.length; ++k) {
        if (s[k] == '+')
            l.plus |= std::uint64_t{1} << k;
        else if (s[k] != '-')
            throw std::invalid_argument("labeling characters must be + or -");
    }
    return l;
}

Grading generator_grading(const TangleDiagram& d, const Generator& g) {
    int i = g.state.popcount() - d.n_minus();
    return {i, g.labeling.p() + i + d.n_plus() - d.n_minus()};
}

int marked_circle(const TangleDiagram& d, const KauffmanState& s, int marked) {
    if (marked < 0 || marked >= d.strands()) throw std::invalid_argument("marked strand out of range");
    return resolve(d, s).segment_circle[d.segment(0, marked)];
}

std::vector<Generator> graded_basis(const TangleDiagram& d, int i, int j, std::size_t max_dim) {
    StateCache cache(d);
    return basis_impl(d, cache, i, j, -1, max_dim);
}

std::vector<Generator> reduced_graded_basis(const TangleDiagram& d, int marked, int i, int j, std::size_t max_dim) {
    if (marked < 0 || marked >= d.strands()) throw std::invalid_argument("marked strand out of range");
    StateCache cache(d);
    return basis_impl(d, cache, i, j + 1, marked, max_dim);
}

std::vector<std::pair<Generator, int>> differential_terms(const TangleDiagram& d, const Generator& g) {
    StateCache cache(d);
    std::vector<std::pair<Generator, int>> out;
    differential_each(d, cache, g.state.bits, g.labeling.plus, [&](std::uint64_t tb, std::uint64_t tp, int sign) {
        KauffmanState st{tb, d.crossing_count()};
        out.push_back({Generator{st, Labeling{tp, cache.get(tb).circles}}, sign});
    });
    return out;
}

SparseMatrix differential_matrix(const TangleDiagram& d, int i, int j, Ring ring, std::size_t max_dim) {
    StateCache cache(d);
    auto src = basis_impl(d, cache, i, j, -1, max_dim);
    auto tgt = basis_impl(d, cache, i + 1, j, -1, max_dim);
    SparseMatrix m = matrix_impl(d, cache, src, tgt, -1);
    (void)ring;  // entries are signs; the ring decides how they are read
    return m;
}

SparseMatrix reduced_differential(const TangleDiagram& d, int marked, int i, int j, std::size_t max_dim) {
    StateCache cache(d);
    auto src = basis_impl(d, cache, i, j + 1, marked, max_dim);
    auto tgt = basis_impl(d, cache, i + 1, j + 1, marked, max_dim);
    return matrix_impl(d, cache, src, tgt, marked);
}

long HomologyTable::rank(int i, int j) const {
    auto it = groups.find({i, j});
    return it == groups.end() ? 0 : it->second.rank;
}

bool HomologyTable::is_zero(int i, int j) const { return groups.find({i, j}) == groups.end(); }

std::set<int> HomologyTable::support_j(int i) const {
    std::set<int> s;
    for (const auto& [g, h] : groups)
        if (g.i == i) s.insert(g.j);
    return s;
}

std::set<Grading> HomologyTable::support() const {
    std::set<Grading> s;
    for (const auto& [g, h] : groups) s.insert(g);
    return s;
}

std::string HomologyTable::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [g, h] : groups) {
        if (!first) os << ' ';
        first = false;
        os << '(' << g.i << ',' << g.j << "):" << h.rank;
        for (const auto& t : h.torsion) os << "+Z/" << t;
    }
    return os.str();
}

HomologyTable homology_of(const ClosedComplex& c, const std::optional<GradingBox>& window) {
    HomologyTable t;
    t.ring = c.ring;
    t.reduced = c.reduced;
    struct Reduced {
        long rank = 0;
        std::vector<mpz_class> torsion;
    };
    std::map<Grading, Reduced> memo;
    auto reduced_of = [&](int i, int j) -> const Reduced& {
        auto [m, fresh] = memo.try_emplace({i, j});
        auto it = c.differential.find({i, j});
        if (!fresh || it == c.differential.end()) return m->second;
        if (c.ring == Ring::Integer) {
            for (const auto& f : smith_diagonal(it->second)) {
                mpz_class a = abs(f);
                if (a != 0) ++m->second.rank;
                if (a > 1) m->second.torsion.push_back(a);
            }
        } else {
            m->second.rank = static_cast<long>(rank(it->second, c.ring));
        }
        return m->second;
    };
    for (const auto& [g, dim] : c.dims) {
        if (window && !window->contains(g)) continue;
        const auto& in = reduced_of(g.i - 1, g.j);
        HomologyGroup grp;
        grp.rank = dim - reduced_of(g.i, g.j).rank - in.rank;
        grp.torsion = in.torsion;
        if (!grp.is_zero()) t.groups[g] = grp;
    }
    return t;
}

HomologyTable homology_table(const TangleDiagram& d, const HomologyOptions& opt) {
    if (opt.marked >= 0 && opt.ring != Ring::GF2) throw std::invalid_argument("reduced homology is computed over GF2");
    Engine e = opt.engine;
    if (e == Engine::Auto) e = d.crossing_count() <= 12 ? Engine::Naive : Engine::Local;
    if (e == Engine::Naive) return homology_of(naive_complex(d, opt.ring, opt.marked, opt.max_dim, opt.window), opt.window);
    LocalOptions lo;
    lo.ring = opt.ring;
    lo.marked = opt.marked;
    lo.max_dim = opt.max_dim;
    return homology_of(reduce_closure(d, lo), opt.window);
}

// ---------------------------------------------------------------- chain elements

void ChainElement::add(const Generator& g, const mpq_class& c) {
    if (g.state.length != state_length()) throw std::invalid_argument("generator does not belong to the diagram");
    Key k{g.state.bits, g.labeling.plus};
    mpq_class v = terms_[k] + c;
    v = reduce_coeff(v, ring_);
    if (v == 0)
        terms_.erase(k);
    else
        terms_[k] = v;
}

mpq_class ChainElement::coefficient(const Generator& g) const {
    auto it = terms_.find({g.state.bits, g.labeling.plus});
    return it == terms_.end() ? mpq_class(0) : it->second;
}

std::vector<std::pair<Generator, mpq_class>> ChainElement::generators() const {
    std::vector<std::pair<Generator, mpq_class>> out;
    for (const auto& [k, c] : terms_) {
        KauffmanState st{k.first, state_length()};
        out.push_back({Generator{st, Labeling{k.second, circle_count(diagram_, st)}}, c});
    }
    return out;
}

std::optional<Grading> ChainElement::grading() const {
    if (terms_.empty()) return std::nullopt;
    auto gens = generators();
    Grading g = generator_grading(diagram_, gens.front().first);
    if (reduced()) g.j -= 1;
    return g;
}

bool ChainElement::is_homogeneous() const {
    std::optional<Grading> first;
    for (const auto& [g, c] : generators()) {
        Grading x = generator_grading(diagram_, g);
        if (first && *first != x) return false;
        first = x;
    }
    return true;
}

ChainElement ChainElement::negated() const {
    ChainElement e(diagram_, ring_, marked_);
    for (const auto& [k, c] : terms_) e.terms_[k] = reduce_coeff(-c, ring_);
    return e;
}

ChainElement d_of(const ChainElement& x) {
    const TangleDiagram& d = x.diagram();
    StateCache cache(d);
    ChainElement out(d, x.ring(), x.marked());
    for (const auto& [k, c] : x.terms()) {
        differential_each(d, cache, k.first, k.second, [&](std::uint64_t tb, std::uint64_t tp, int sign) {
            const StateInfo& info = cache.get(tb);
            if (x.reduced() && !((tp >> info.seg[d.segment(0, x.marked())]) & 1)) return;
            out.add(Generator{KauffmanState{tb, d.crossing_count()}, Labeling{tp, info.circles}}, c * sign);
        });
    }
    return out;
}

bool is_cycle(const ChainElement& x) { return d_of(x).is_zero(); }

ChainElement psi_tilde(const BraidWord& w, Ring ring) {
    TangleDiagram d = from_braid(w);
    KauffmanState s = oriented_resolution_state(d);
    ChainElement e(d, ring);
    e.add(Generator{s, Labeling{0, circle_count(d, s)}}, 1);
    return e;
}

ChainElement psi_tilde_prime(const BraidWord& w, int marked) {
    TangleDiagram d = from_braid(w);
    if (marked < 0 || marked >= d.strands()) throw std::invalid_argument("marked strand out of range");
    KauffmanState s = oriented_resolution_state(d);
    auto cd = resolve(d, s);
    ChainElement e(d, Ring::GF2, marked);
    e.add(Generator{s, Labeling{std::uint64_t{1} << cd.segment_circle[d.segment(0, marked)], cd.circle_count}}, 1);
    return e;
}

std::string verdict_tag(VerdictKind k) {
    switch (k) {
        case VerdictKind::ZeroWithCertificate: return "zero-with-certificate";
        case VerdictKind::ZeroByReduction: return "zero-by-reduction";
        case VerdictKind::NonzeroClass: return "nonzero";
        case VerdictKind::UndecidedResource: return "undecided-resource";
    }
    return "?";
}

bool verify_certificate(const BraidWord& w, const ChainElement& phi) {
    ChainElement psi = phi.reduced() ? psi_tilde_prime(w, phi.marked()) : psi_tilde(w, phi.ring());
    if (phi.diagram().tiles() != psi.diagram().tiles() || phi.diagram().strands() != w.strands)
        throw std::invalid_argument("certificate belongs to a different diagram");
    if (phi.is_zero()) return false;
    if (!phi.is_homogeneous()) throw std::invalid_argument("certificate is not homogeneous");
    Grading g = *phi.grading();
    Grading want = *psi.grading();
    if (g.i != want.i - 1 || g.j != want.j) throw std::invalid_argument("certificate grading mismatch");
    ChainElement dphi = d_of(phi);
    ChainElement target(psi.diagram(), phi.ring(), phi.marked());
    for (const auto& [gen, c] : psi.generators()) target.add(gen, c);
    return dphi == target || dphi == target.negated();
}

namespace {

ChainElement element_from_solution(const TangleDiagram& d, Ring ring, int marked, const std::vector<Generator>& basis,
                                   const SparseVector& x) {
    ChainElement phi(d, ring, marked);
    for (const auto& [k, v] : x.entries) phi.add(basis[k], v);
    return phi;
}

Verdict naive_verdict(const BraidWord& w, Ring ring, int marked, std::size_t max_dim) {
    TangleDiagram d = from_braid(w);
    bool reduced = marked >= 0;
    ChainElement psi = reduced ? psi_tilde_prime(w, marked) : psi_tilde(w, ring);
    int j = self_linking(w) + (reduced ? 2 : 0);  // unreduced quantum grading of the element
    StateCache cache(d);
    auto src = basis_impl(d, cache, -1, j, marked, max_dim);
    auto tgt = basis_impl(d, cache, 0, j, marked, max_dim);
    SparseMatrix m = matrix_impl(d, cache, src, tgt, marked);
    auto idx = index_of(tgt);
    SparseVector b(static_cast<int>(tgt.size()));
    for (const auto& [k, c] : psi.terms()) b.set(idx.at(k), c);
    Verdict v;
    v.ring = ring;
    v.reduced = reduced;
    v.grading = *psi.grading();
    v.method = "graded-piece";
    v.detail = "C^-1 dim " + std::to_string(src.size()) + ", C^0 dim " + std::to_string(tgt.size());
    if (auto x = solve(m, b, ring)) {
        ChainElement phi = element_from_solution(d, ring, marked, src, *x);
        if (!verify_certificate(w, phi)) throw std::logic_error("solver certificate failed verification");
        v.kind = VerdictKind::ZeroWithCertificate;
        v.certificate = std::move(phi);
    } else {
        if (!is_cycle(psi)) throw std::logic_error("transverse element is not a cycle");
        v.kind = VerdictKind::NonzeroClass;
    }
    return v;
}

Verdict local_verdict(const BraidWord& w, Ring ring, int marked, const VerdictOptions& opt) {
    TangleDiagram d = from_braid(w);
    bool reduced = marked >= 0;
    LocalOptions lo;
    lo.ring = ring;
    lo.marked = marked;
    lo.tracked = reduced ? Tracked::PsiPrime : Tracked::Psi;
    lo.max_dim = opt.max_dim;
    ClosedComplex cc = reduce_closure(d, lo);
    Verdict v;
    v.ring = ring;
    v.reduced = reduced;
    v.grading = {0, self_linking(w) + (reduced ? 1 : 0)};
    v.method = "tangle-reduction";
    v.detail = "peak objects " + std::to_string(cc.peak_objects);
    bool zero = false;
    if (!cc.tracked_grading) {
        zero = true;
    } else {
        if (*cc.tracked_grading != v.grading) throw std::logic_error("tracked element landed in the wrong grading");
        auto out = cc.differential.find(v.grading);
        if (out != cc.differential.end() && !multiply(out->second, cc.tracked, ring).is_zero())
            throw std::logic_error("tracked element is not a cycle");
        auto in = cc.differential.find({v.grading.i - 1, v.grading.j});
        if (in != cc.differential.end()) zero = solve(in->second, cc.tracked, ring).has_value();
    }
    if (!zero) {
        v.kind = VerdictKind::NonzeroClass;
        return v;
    }
    v.kind = VerdictKind::ZeroByReduction;
    try {
        if (auto phi = search_certificate(w, ring, marked, opt.certificate_radius, opt.max_dim)) {
            v.kind = VerdictKind::ZeroWithCertificate;
            v.certificate = std::move(phi);
        }
    } catch (const ResourceLimit&) {
    }
    return v;
}

Verdict decide(const BraidWord& w, Ring ring, int marked, const VerdictOptions& opt) {
    Engine e = opt.engine;
    TangleDiagram d = from_braid(w);
    if (e == Engine::Auto) e = d.crossing_count() <= 12 ? Engine::Naive : Engine::Local;
    try {
        if (e == Engine::Naive) return naive_verdict(w, ring, marked, opt.max_dim);
        return local_verdict(w, ring, marked, opt);
    } catch (const ResourceLimit& ex) {
        if (opt.engine == Engine::Auto && e == Engine::Naive) {
            try {
                return local_verdict(w, ring, marked, opt);
            } catch (const ResourceLimit&) {
            }
        }
        Verdict v;
        v.kind = VerdictKind::UndecidedResource;
        v.ring = ring;
        v.reduced = marked >= 0;
        v.detail = ex.what();
        return v;
    }
}

}  // namespace

Verdict psi_vanishes(const BraidWord& w, Ring ring, const VerdictOptions& opt) { return decide(w, ring, -1, opt); }

Verdict psi_prime_vanishes(const BraidWord& w, const VerdictOptions& opt) {
    if (opt.marked < 0 || opt.marked >= w.strands) throw std::invalid_argument("marked strand out of range");
    return decide(w, Ring::GF2, opt.marked, opt);
}

constexpr int kCertificateWindow = 12;

std::optional<ChainElement> search_certificate(const BraidWord& w, Ring ring, int marked, int radius,
                                               std::size_t max_dim) {
    TangleDiagram d = from_braid(w);
    bool reduced = marked >= 0;
    ChainElement psi = reduced ? psi_tilde_prime(w, marked) : psi_tilde(w, ring);
    int n = d.crossing_count();
    int j = self_linking(w) + (reduced ? 2 : 0);
    std::uint64_t oriented = oriented_resolution_state(d).bits;
    std::vector<int> ones, zeros;
    for (int c = 0; c < n; ++c) ((oriented >> c) & 1 ? ones : zeros).push_back(c);
    StateCache cache(d);
    int np = d.n_plus(), nm = d.n_minus();
    int p = j - (-1) - np + nm;

    std::vector<Generator> cols;
    std::unordered_map<ChainElement::Key, int, KeyHash> rows;
    std::vector<std::vector<std::pair<int, int>>> entries;
    auto row_of = [&](ChainElement::Key k) {
        auto it = rows.find(k);
        if (it != rows.end()) return it->second;
        int r = static_cast<int>(rows.size());
        rows.emplace(k, r);
        return r;
    };
    auto add_state = [&](std::uint64_t bits) {
        const StateInfo& info = cache.get(bits);
        int m = info.circles;
        if ((p + m) % 2) return;
        int q = (p + m) / 2;
        int mc = reduced ? info.seg[d.segment(0, marked)] : -1;
        for_each_combination(m, q, [&](std::uint64_t plus) {
            if (mc >= 0 && !((plus >> mc) & 1)) return;
            cols.push_back({KauffmanState{bits, n}, Labeling{plus, m}});
            entries.emplace_back();
            auto& col = entries.back();
            differential_each(d, cache, bits, plus, [&](std::uint64_t tb, std::uint64_t tp, int sign) {
                if (reduced && !((tp >> cache.get(tb).seg[d.segment(0, marked)]) & 1)) return;
                col.emplace_back(row_of({tb, tp}), sign);
            });
            if (cols.size() > max_dim) throw ResourceLimit("certificate search exceeds dimension limit");
        });
    };
    std::unordered_set<std::uint64_t> seen;
    auto try_solve = [&]() -> std::optional<ChainElement> {
        std::vector<int> psi_rows;
        for (const auto& [k, c] : psi.terms()) psi_rows.push_back(row_of(k));
        SparseMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            for (const auto& [r, s] : entries[c]) m.add(r, static_cast<int>(c), s);
        m.finalize();
        SparseVector b(static_cast<int>(rows.size()));
        std::size_t t = 0;
        for (const auto& [k, c] : psi.terms()) b.set(psi_rows[t++], c);
        if (auto x = solve(m, b, ring)) {
            ChainElement phi = element_from_solution(d, ring, marked, cols, *x);
            if (verify_certificate(w, phi)) return phi;
        }
        return std::nullopt;
    };
    // States in degree -1 drop one more 1-bit than they add, relative to the oriented state.
    auto add_flips = [&](const std::vector<int>& on, const std::vector<int>& off, int drop) {
        for_each_combination(static_cast<int>(on.size()), drop, [&](std::uint64_t dm) {
            std::uint64_t base = oriented;
            for (std::size_t k = 0; k < on.size(); ++k)
                if ((dm >> k) & 1) base &= ~(std::uint64_t{1} << on[k]);
            for_each_combination(static_cast<int>(off.size()), drop - 1, [&](std::uint64_t am) {
                std::uint64_t bits = base;
                for (std::size_t k = 0; k < off.size(); ++k)
                    if ((am >> k) & 1) bits |= std::uint64_t{1} << off[k];
                if (seen.insert(bits).second) add_state(bits);
            });
        });
    };
    for (int dist = 1; dist <= radius; dist += 2) {
        int drop = (dist + 1) / 2;
        if (drop > static_cast<int>(ones.size()) || drop - 1 > static_cast<int>(zeros.size())) break;
        add_flips(ones, zeros, drop);
        if (auto phi = try_solve()) return phi;
    }
    // Then arbitrary flips inside cyclic windows of consecutive crossings.
    int len = std::min(n, kCertificateWindow);
    if (len <= radius) return std::nullopt;
    for (int start = 0; start < (len == n ? 1 : n); ++start) {
        std::vector<int> on, off;
        for (int k = 0; k < len; ++k) {
            int c = (start + k) % n;
            ((oriented >> c) & 1 ? on : off).push_back(c);
        }
        for (int drop = 1; drop <= static_cast<int>(on.size()) && drop - 1 <= static_cast<int>(off.size()); ++drop)
            add_flips(on, off, drop);
    }
    return try_solve();
}

ChainElement certificate_from_dotted(const BraidWord& w, Ring ring, const std::vector<DottedTerm>& terms, int marked) {
    TangleDiagram d = from_braid(w);
    ChainElement phi(d, ring, marked);
    for (const auto& t : terms) {
        KauffmanState s{0, d.crossing_count()};
        for (int pos : t.one_positions) {
            if (pos < 1 || pos > d.crossing_count()) throw std::invalid_argument("dotted position out of range");
            s.bits |= std::uint64_t{1} << (pos - 1);
        }
        Labeling l{0, circle_count(d, s)};
        for (int c : t.plus_circles) {
            if (c < 1 || c > l.length) throw std::invalid_argument("circle number out of range");
            l.plus |= std::uint64_t{1} << (c - 1);
        }
        phi.add(Generator{s, l}, t.coefficient);
    }
    return phi;
}

std::string certificate_to_json(const BraidWord& w, const ChainElement& phi) {
    nlohmann::json j;
    j["format"] = "tkh-certificate";
    j["version"] = 1;
    j["ring"] = ring_tag(phi.ring());
    j["strands"] = w.strands;
    j["word"] = w.str();
    j["sign_rule"] = "ones-before";
    j["marked"] = phi.marked();
    if (auto g = phi.grading()) j["grading"] = {{"i", g->i}, {"j", g->j}};
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [g, c] : phi.generators())
        terms.push_back({{"state", g.state.str()}, {"labeling", g.labeling.str()}, {"coefficient", c.get_str()}});
    j["terms"] = terms;
    return j.dump(2);
}

std::pair<BraidWord, ChainElement> certificate_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "tkh-certificate") throw std::invalid_argument("not a certificate file");
    if (j.value("sign_rule", "ones-before") != "ones-before") throw std::invalid_argument("unsupported sign rule");
    BraidWord w = parse_braid(j.at("word").get<std::string>(), j.at("strands").get<int>());
    Ring ring = ring_from_tag(j.at("ring").get<std::string>());
    TangleDiagram d = from_braid(w);
    ChainElement phi(d, ring, j.value("marked", -1));
    for (const auto& t : j.at("terms")) {
        std::string st = t.at("state").get<std::string>();
        if (static_cast<int>(st.size()) != d.crossing_count()) throw std::invalid_argument("state length mismatch");
        KauffmanState s{0, d.crossing_count()};
        for (std::size_t k = 0; k < st.size(); ++k) {
            if (st[k] == '1')
                s.bits |= std::uint64_t{1} << k;
            else if (st[k] != '0')
                throw std::invalid_argument("state characters must be 0 or 1");
        }
        Labeling l = Labeling::parse(t.at("labeling").get<std::string>());
        if (l.length != circle_count(d, s)) throw std::invalid_argument("labeling length does not match circle count");
        const auto& c = t.at("coefficient");
        mpq_class v = c.is_string() ? mpq_class(c.get<std::string>()) : mpq_class(c.get<long>());
        v.canonicalize();
        phi.add(Generator{s, l}, v);
    }
    return {w, phi};
}

}  // namespace tkh
