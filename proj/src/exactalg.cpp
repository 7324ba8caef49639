#include "tkh/exactalg.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <type_traits>
#include <unordered_map>

namespace tkh {

std::string ring_tag(Ring r) {
    switch (r) {
        case Ring::GF2: return "gf2";
        case Ring::Rational: return "q";
        case Ring::Integer: return "z";
    }
    return "?";
}

Ring ring_from_tag(const std::string& tag) {
    if (tag == "gf2" || tag == "GF2") return Ring::GF2;
    if (tag == "q" || tag == "Q") return Ring::Rational;
    if (tag == "z" || tag == "Z") return Ring::Integer;
    throw std::invalid_argument("unknown ring tag '" + tag + "'");
}

void SparseMatrix::add(int r, int c, long long v) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("matrix index out of range");
    if (v != 0) columns_[static_cast<std::size_t>(c)].emplace_back(r, v);
}

void SparseMatrix::finalize() {
    for (auto& col : columns_) {
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t k = 0; k < col.size();) {
            int r = col[k].first;
            long long s = 0;
            while (k < col.size() && col[k].first == r) s += col[k++].second;
            if (s != 0) col[out++] = {r, s};
        }
        col.resize(out);
    }
}

long long SparseMatrix::at(int r, int c) const {
    for (const auto& [row, v] : columns_[static_cast<std::size_t>(c)])
        if (row == r) return v;
    return 0;
}

std::size_t SparseMatrix::nnz() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<long long>>& rows) {
    int nr = static_cast<int>(rows.size());
    int nc = nr ? static_cast<int>(rows[0].size()) : 0;
    SparseMatrix m(nr, nc);
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c) m.add(r, c, rows[r][c]);
    m.finalize();
    return m;
}

std::vector<std::vector<long long>> SparseMatrix::to_dense() const {
    std::vector<std::vector<long long>> d(static_cast<std::size_t>(rows_), std::vector<long long>(cols_, 0));
    for (int c = 0; c < cols_; ++c)
        for (const auto& [r, v] : column(c)) d[r][c] = v;
    return d;
}

void SparseVector::set(int i, const mpq_class& v) {
    auto it = std::lower_bound(entries.begin(), entries.end(), i, [](const auto& e, int k) { return e.first < k; });
    if (it != entries.end() && it->first == i) {
        if (v == 0)
            entries.erase(it);
        else
            it->second = v;
    } else if (v != 0) {
        entries.insert(it, {i, v});
    }
}

mpq_class SparseVector::get(int i) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), i, [](const auto& e, int k) { return e.first < k; });
    if (it != entries.end() && it->first == i) return it->second;
    return 0;
}

namespace {

mpq_class reduce_scalar(const mpq_class& v, Ring ring) {
    if (ring != Ring::GF2) return v;
    if (v.get_den() != 1) throw std::domain_error("non-integral value in GF2 context");
    mpz_class r = v.get_num() % 2;
    return r == 0 ? 0 : 1;
}

struct Gf2Ops {
    using T = std::uint8_t;
    static T from(long long v) { return static_cast<T>(v & 1); }
    static bool zero(T v) { return v == 0; }
};

struct QOps {
    using T = mpq_class;
    static T from(long long v) { return mpq_class(static_cast<long>(v)); }
    static bool zero(const T& v) { return v == 0; }
};

struct ZOps {
    using T = mpz_class;
    static T from(long long v) { return mpz_class(static_cast<long>(v)); }
    static bool zero(const T& v) { return v == 0; }
};

template <class T>
using Vec = std::vector<std::pair<int, T>>;

// v += a * p
template <class T>
void axpy(Vec<T>& v, const T& a, const Vec<T>& p) {
    Vec<T> out;
    out.reserve(v.size() + p.size());
    std::size_t i = 0, j = 0;
    while (i < v.size() || j < p.size()) {
        if (j == p.size() || (i < v.size() && v[i].first < p[j].first)) {
            out.push_back(std::move(v[i++]));
        } else if (i == v.size() || p[j].first < v[i].first) {
            T t = a * p[j].second;
            out.emplace_back(p[j].first, t);
            ++j;
        } else {
            T t = v[i].second + a * p[j].second;
            if (t != 0) out.emplace_back(v[i].first, t);
            ++i;
            ++j;
        }
    }
    v.swap(out);
}

void xor_into(Vec<std::uint8_t>& v, const Vec<std::uint8_t>& p) {
    Vec<std::uint8_t> out;
    out.reserve(v.size() + p.size());
    std::size_t i = 0, j = 0;
    while (i < v.size() || j < p.size()) {
        if (j == p.size() || (i < v.size() && v[i].first < p[j].first)) {
            out.push_back(v[i++]);
        } else if (i == v.size() || p[j].first < v[i].first) {
            out.push_back(p[j++]);
        } else {
            ++i;
            ++j;
        }
    }
    v.swap(out);
}

template <class T>
Vec<T> combine(const T& a, const Vec<T>& x, const T& b, const Vec<T>& y) {
    Vec<T> out;
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            T t = a * x[i].second;
            if (t != 0) out.emplace_back(x[i].first, t);
            ++i;
        } else if (i == x.size() || y[j].first < x[i].first) {
            T t = b * y[j].second;
            if (t != 0) out.emplace_back(y[j].first, t);
            ++j;
        } else {
            T t = a * x[i].second + b * y[j].second;
            if (t != 0) out.emplace_back(x[i].first, t);
            ++i;
            ++j;
        }
    }
    return out;
}

// Column order: fewest nonzeros first, lowest index on ties.
std::vector<int> column_order(const SparseMatrix& m, Ring ring) {
    std::vector<int> order(static_cast<std::size_t>(m.cols()));
    std::iota(order.begin(), order.end(), 0);
    auto weight = [&](int c) {
        if (ring != Ring::GF2) return m.column(c).size();
        std::size_t n = 0;
        for (const auto& e : m.column(c)) n += (e.second & 1) ? 1 : 0;
        return n;
    };
    std::vector<std::size_t> w(order.size());
    for (int c = 0; c < m.cols(); ++c) w[c] = weight(c);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] < w[b]; });
    return order;
}

template <class Ops>
Vec<typename Ops::T> convert(const std::vector<std::pair<int, long long>>& col) {
    Vec<typename Ops::T> v;
    for (const auto& [r, x] : col) {
        auto t = Ops::from(x);
        if (!Ops::zero(t)) v.emplace_back(r, t);
    }
    return v;
}

// Column echelon form; pivots keyed by leading (minimal) row.
template <class Ops>
class Echelon {
public:
    using T = typename Ops::T;
    static constexpr bool kField = !std::is_same_v<Ops, ZOps>;

    explicit Echelon(bool track) : track_(track) {}

    void insert(Vec<T> v, Vec<T> combo) {
        while (!v.empty()) {
            int r = v.front().first;
            auto it = pivots_.find(r);
            if (it == pivots_.end()) {
                if constexpr (kField) normalize(v, combo);
                pivots_.emplace(r, Pivot{std::move(v), std::move(combo)});
                return;
            }
            Pivot& p = it->second;
            if constexpr (std::is_same_v<Ops, Gf2Ops>) {
                xor_into(v, p.vec);
                if (track_) xor_into(combo, p.combo);
            } else if constexpr (kField) {
                T a = -v.front().second;
                axpy(v, a, p.vec);
                if (track_) axpy(combo, a, p.combo);
            } else {
                const T& pr = p.vec.front().second;
                const T& vr = v.front().second;
                if (mpz_divisible_p(vr.get_mpz_t(), pr.get_mpz_t())) {
                    T a = -(vr / pr);
                    axpy(v, a, p.vec);
                    if (track_) axpy(combo, a, p.combo);
                } else {
                    mpz_class g, s, t;
                    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), pr.get_mpz_t(), vr.get_mpz_t());
                    T ap = vr / g, av = -(pr / g);
                    Vec<T> np = combine(s, p.vec, t, v);
                    Vec<T> nv = combine(ap, p.vec, av, v);
                    if (track_) {
                        Vec<T> nc = combine(s, p.combo, t, combo);
                        combo = combine(ap, p.combo, av, combo);
                        p.combo = std::move(nc);
                    }
                    p.vec = std::move(np);
                    v = std::move(nv);
                }
            }
        }
    }

    std::size_t rank() const { return pivots_.size(); }

    // Returns the combination of inserted columns giving b, if any.
    std::optional<Vec<T>> express(Vec<T> b) const {
        Vec<T> x;
        while (!b.empty()) {
            int r = b.front().first;
            auto it = pivots_.find(r);
            if (it == pivots_.end()) return std::nullopt;
            const Pivot& p = it->second;
            if constexpr (std::is_same_v<Ops, Gf2Ops>) {
                xor_into(b, p.vec);
                xor_into(x, p.combo);
            } else {
                T a;
                if constexpr (kField) {
                    a = b.front().second;
                } else {
                    if (!mpz_divisible_p(b.front().second.get_mpz_t(), p.vec.front().second.get_mpz_t()))
                        return std::nullopt;
                    a = b.front().second / p.vec.front().second;
                }
                axpy(b, T(-a), p.vec);
                axpy(x, a, p.combo);
            }
        }
        return x;
    }

private:
    struct Pivot {
        Vec<T> vec;
        Vec<T> combo;
    };
    bool track_;
    std::map<int, Pivot> pivots_;

    void normalize(Vec<T>& v, Vec<T>& combo) {
        if constexpr (std::is_same_v<Ops, QOps>) {
            T inv = 1 / v.front().second;
            if (inv == 1) return;
            for (auto& e : v) e.second *= inv;
            for (auto& e : combo) e.second *= inv;
        }
    }
};

// Dense packed-bit elimination over GF2 for matrices that fit comfortably in memory.
class PackedGf2 {
public:
    PackedGf2(int rows, int cols, bool track)
        : words_((rows + 63) / 64), cwords_(track ? (cols + 63) / 64 : 0), track_(track) {}

    void insert(std::vector<std::uint64_t> v, std::vector<std::uint64_t> combo) {
        while (true) {
            int lead = leading(v);
            if (lead < 0) return;
            auto it = pivot_of_.find(lead);
            if (it == pivot_of_.end()) {
                pivot_of_.emplace(lead, pivots_.size());
                pivots_.push_back({std::move(v), std::move(combo)});
                return;
            }
            const auto& p = pivots_[it->second];
            for (std::size_t w = static_cast<std::size_t>(lead / 64); w < v.size(); ++w) v[w] ^= p.vec[w];
            if (track_)
                for (std::size_t w = 0; w < combo.size(); ++w) combo[w] ^= p.combo[w];
        }
    }

    std::size_t rank() const { return pivots_.size(); }

    std::optional<std::vector<std::uint64_t>> express(std::vector<std::uint64_t> b) const {
        std::vector<std::uint64_t> x(cwords_, 0);
        while (true) {
            int lead = leading(b);
            if (lead < 0) return x;
            auto it = pivot_of_.find(lead);
            if (it == pivot_of_.end()) return std::nullopt;
            const auto& p = pivots_[it->second];
            for (std::size_t w = static_cast<std::size_t>(lead / 64); w < b.size(); ++w) b[w] ^= p.vec[w];
            for (std::size_t w = 0; w < x.size(); ++w) x[w] ^= p.combo[w];
        }
    }

    std::size_t words() const { return words_; }
    std::size_t cwords() const { return cwords_; }

private:
    struct Pivot {
        std::vector<std::uint64_t> vec, combo;
    };
    std::size_t words_, cwords_;
    bool track_;
    std::vector<Pivot> pivots_;
    std::unordered_map<int, std::size_t> pivot_of_;

    static int leading(const std::vector<std::uint64_t>& v) {
        for (std::size_t w = 0; w < v.size(); ++w)
            if (v[w]) return static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(v[w])));
        return -1;
    }
};

bool use_packed(const SparseMatrix& m, bool track) {
    double bits = static_cast<double>(m.cols()) * (static_cast<double>(m.rows()) + (track ? m.cols() : 0));
    double density = m.rows() && m.cols() ? static_cast<double>(m.nnz()) / m.cols() / m.rows() : 0.0;
    return bits <= 2.0e9 && (density > 0.01 || bits <= 5.0e7);
}

std::vector<std::uint64_t> pack_column(const SparseMatrix& m, int c, std::size_t words) {
    std::vector<std::uint64_t> v(words, 0);
    for (const auto& [r, x] : m.column(c))
        if (x & 1) v[static_cast<std::size_t>(r) / 64] ^= std::uint64_t{1} << (r % 64);
    return v;
}

template <class Ops>
std::size_t sparse_rank(const SparseMatrix& m, Ring ring) {
    Echelon<Ops> e(false);
    for (int c : column_order(m, ring)) e.insert(convert<Ops>(m.column(c)), {});
    return e.rank();
}

template <class Ops>
std::optional<SparseVector> sparse_solve(const SparseMatrix& m, const SparseVector& b, Ring ring) {
    using T = typename Ops::T;
    Echelon<Ops> e(true);
    for (int c : column_order(m, ring)) {
        Vec<T> combo;
        combo.emplace_back(c, T(1));
        e.insert(convert<Ops>(m.column(c)), std::move(combo));
    }
    Vec<T> rhs;
    for (const auto& [i, v] : b.entries) {
        if constexpr (std::is_same_v<Ops, QOps>) {
            rhs.emplace_back(i, v);
        } else {
            if (v.get_den() != 1) return std::nullopt;
            if constexpr (std::is_same_v<Ops, ZOps>) {
                rhs.emplace_back(i, v.get_num());
            } else {
                mpz_class r = v.get_num() % 2;
                if (r != 0) rhs.emplace_back(i, 1);
            }
        }
    }
    auto x = e.express(std::move(rhs));
    if (!x) return std::nullopt;
    std::sort(x->begin(), x->end(), [](const auto& a, const auto& b2) { return a.first < b2.first; });
    SparseVector out(m.cols());
    for (const auto& [i, v] : *x) {
        if constexpr (std::is_same_v<Ops, Gf2Ops>) {
            if (v) out.entries.emplace_back(i, 1);
        } else if constexpr (std::is_same_v<Ops, ZOps>) {
            out.entries.emplace_back(i, mpq_class(v));
        } else {
            out.entries.emplace_back(i, v);
        }
    }
    return out;
}

}  // namespace

SparseVector multiply(const SparseMatrix& m, const SparseVector& x, Ring ring) {
    if (x.length != m.cols()) throw std::invalid_argument("dimension mismatch in multiply");
    std::map<int, mpq_class> acc;
    for (const auto& [c, v] : x.entries)
        for (const auto& [r, a] : m.column(c)) acc[r] += v * mpq_class(static_cast<long>(a));
    SparseVector out(m.rows());
    for (auto& [r, v] : acc) {
        mpq_class t = reduce_scalar(v, ring);
        if (t != 0) out.entries.emplace_back(r, t);
    }
    return out;
}

bool vectors_equal(const SparseVector& a, const SparseVector& b, Ring ring) {
    if (a.length != b.length) return false;
    std::map<int, mpq_class> diff;
    for (const auto& [i, v] : a.entries) diff[i] += v;
    for (const auto& [i, v] : b.entries) diff[i] -= v;
    for (const auto& [i, v] : diff)
        if (reduce_scalar(v, ring) != 0) return false;
    return true;
}

namespace {

struct UnitCore {
    std::size_t units = 0;
    DenseZ core;
};

struct Overflow {};

long long checked_sub_mul(long long a, long long f, long long w) {
    long long p, r;
    if (__builtin_mul_overflow(f, w, &p) || __builtin_sub_overflow(a, p, &r)) throw Overflow{};
    return r;
}
mpz_class checked_sub_mul(const mpz_class& a, const mpz_class& f, const mpz_class& w) { return a - f * w; }
long long mod2(long long v) { return v & 1; }
mpz_class mod2(const mpz_class& v) { return mpz_odd_p(v.get_mpz_t()) ? 1 : 0; }
mpz_class to_mpz(long long v) { return mpz_class(static_cast<long>(v)); }
const mpz_class& to_mpz(const mpz_class& v) { return v; }

// Sparse elimination of +-1 pivots, shortest column first, optionally carrying a right-hand side.
// Pivot rows leave the active matrix and are kept (when asked) for back substitution.
template <class T>
struct UnitElimination {
    struct Pivot {
        int row, col;
        T value;
        std::vector<std::pair<int, T>> entries;  // the row when it was chosen, pivot column excluded
        T rhs;
    };
    std::vector<std::map<int, T>> rows, cols;
    std::vector<T> rhs;
    std::vector<Pivot> pivots;
    std::size_t units = 0;

    UnitElimination(const SparseMatrix& m, bool gf2) : rows(static_cast<std::size_t>(m.rows())), cols(static_cast<std::size_t>(m.cols())), gf2_(gf2) {
        for (int c = 0; c < m.cols(); ++c)
            for (const auto& [r, v] : m.column(c)) {
                T t(static_cast<long>(v));
                if (gf2) t = mod2(t);
                if (t == 0) continue;
                rows[r][c] = t;
                cols[c][r] = t;
            }
    }

    void run(bool keep) {
        std::set<std::pair<std::size_t, int>> queue;
        std::vector<std::size_t> queued(cols.size(), 0);  // 0: not queued, else size + 1
        auto requeue = [&](int c) {
            if (queued[c]) queue.erase({queued[c] - 1, c});
            queued[c] = 0;
            if (!cols[c].empty()) {
                queue.insert({cols[c].size(), c});
                queued[c] = cols[c].size() + 1;
            }
        };
        for (int c = 0; c < static_cast<int>(cols.size()); ++c) requeue(c);
        bool with_rhs = !rhs.empty();
        while (!queue.empty()) {
            int c = queue.begin()->second;
            queue.erase(queue.begin());
            queued[c] = 0;
            int pr = -1;
            for (const auto& [r, v] : cols[c])
                if ((v == 1 || v == -1) && (pr < 0 || rows[r].size() < rows[pr].size())) pr = r;
            if (pr < 0) continue;
            ++units;
            T p = rows[pr][c];
            std::vector<std::pair<int, T>> prow(rows[pr].begin(), rows[pr].end());
            std::vector<std::pair<int, T>> pcol(cols[c].begin(), cols[c].end());
            for (const auto& [r, v] : pcol) {
                if (r == pr) continue;
                T factor = v * p;  // p = +-1 so v / p = v * p
                for (const auto& [c2, w] : prow) {
                    T nv = checked_sub_mul(rows[r][c2], factor, w);
                    if (gf2_) nv = mod2(nv);
                    if (nv == 0) {
                        rows[r].erase(c2);
                        cols[c2].erase(r);
                    } else {
                        rows[r][c2] = nv;
                        cols[c2][r] = nv;
                    }
                }
                if (with_rhs && rhs[pr] != 0) {
                    rhs[r] = checked_sub_mul(rhs[r], factor, rhs[pr]);
                    if (gf2_) rhs[r] = mod2(rhs[r]);
                }
            }
            if (keep) {
                Pivot piv{pr, c, p, {}, with_rhs ? rhs[pr] : T(0)};
                for (const auto& e : prow)
                    if (e.first != c) piv.entries.push_back(e);
                pivots.push_back(std::move(piv));
            }
            for (const auto& [c2, w] : prow) cols[c2].erase(pr);
            rows[pr].clear();
            for (const auto& [r, v] : pcol) rows[r].erase(c);
            cols[c].clear();
            for (const auto& [c2, w] : prow)
                if (c2 != c) requeue(c2);
        }
    }

private:
    bool gf2_;
};

template <class T>
UnitCore eliminate_units_as(const SparseMatrix& m) {
    UnitElimination<T> e(m, false);
    e.run(false);
    UnitCore out;
    out.units = e.units;
    std::vector<int> live_rows, live_cols;
    for (int r = 0; r < m.rows(); ++r)
        if (!e.rows[r].empty()) live_rows.push_back(r);
    for (int c = 0; c < m.cols(); ++c)
        if (!e.cols[c].empty()) live_cols.push_back(c);
    if (!live_rows.empty()) {
        std::map<int, std::size_t> cidx;
        for (std::size_t k = 0; k < live_cols.size(); ++k) cidx[live_cols[k]] = k;
        out.core.assign(live_rows.size(), std::vector<mpz_class>(live_cols.size(), 0));
        for (std::size_t i = 0; i < live_rows.size(); ++i)
            for (const auto& [c, v] : e.rows[live_rows[i]]) out.core[i][cidx[c]] = to_mpz(v);
    }
    return out;
}

UnitCore eliminate_units(const SparseMatrix& m) {
    try {
        return eliminate_units_as<long long>(m);
    } catch (const Overflow&) {
        return eliminate_units_as<mpz_class>(m);
    }
}

// Integral right-hand side only; the leftover core is handed to `core_solve`.
template <class T, class CoreSolve>
std::optional<SparseVector> eliminate_and_solve(const SparseMatrix& m, const SparseVector& b, Ring ring, CoreSolve core_solve) {
    bool gf2 = ring == Ring::GF2;
    UnitElimination<T> e(m, gf2);
    e.rhs.assign(static_cast<std::size_t>(m.rows()), T(0));
    for (const auto& [i, v] : b.entries) {
        T t;
        if constexpr (std::is_same_v<T, long long>) {
            if (!v.get_num().fits_slong_p()) throw Overflow{};
            t = v.get_num().get_si();
        } else {
            t = v.get_num();
        }
        e.rhs[i] = gf2 ? mod2(t) : t;
    }
    e.run(true);
    // leftover system on the unpivoted rows and columns
    std::vector<int> live_rows, live_cols, row_index(static_cast<std::size_t>(m.rows()), -1),
        col_index(static_cast<std::size_t>(m.cols()), -1);
    std::vector<bool> pivot_row(static_cast<std::size_t>(m.rows()), false);
    for (const auto& p : e.pivots) pivot_row[p.row] = true;
    for (int r = 0; r < m.rows(); ++r)
        if (!pivot_row[r] && (!e.rows[r].empty() || e.rhs[r] != 0)) {
            row_index[r] = static_cast<int>(live_rows.size());
            live_rows.push_back(r);
        }
    for (int c = 0; c < m.cols(); ++c)
        if (!e.cols[c].empty()) {
            col_index[c] = static_cast<int>(live_cols.size());
            live_cols.push_back(c);
        }
    std::vector<mpq_class> x(static_cast<std::size_t>(m.cols()), 0);
    if (!live_rows.empty()) {
        SparseMatrix core(static_cast<int>(live_rows.size()), static_cast<int>(live_cols.size()));
        SparseVector core_b(static_cast<int>(live_rows.size()));
        for (int r : live_rows) {
            for (const auto& [c, v] : e.rows[r]) {
                mpz_class z = to_mpz(v);
                if (!z.fits_slong_p()) throw Overflow{};
                core.add(row_index[r], col_index[c], z.get_si());
            }
            if (e.rhs[r] != 0) core_b.entries.emplace_back(row_index[r], mpq_class(to_mpz(e.rhs[r])));
        }
        core.finalize();
        auto y = core_solve(core, core_b);
        if (!y) return std::nullopt;
        for (const auto& [k, v] : y->entries) x[static_cast<std::size_t>(live_cols[k])] = v;
    }
    for (auto it = e.pivots.rbegin(); it != e.pivots.rend(); ++it) {
        mpq_class acc(to_mpz(it->rhs));
        for (const auto& [c, w] : it->entries) acc -= mpq_class(to_mpz(w)) * x[c];
        acc *= mpq_class(to_mpz(it->value));  // value = +-1
        if (gf2) acc = mod2(mpz_class(acc.get_num()));
        x[it->col] = acc;
    }
    SparseVector out(m.cols());
    for (int c = 0; c < m.cols(); ++c)
        if (x[c] != 0) out.entries.emplace_back(c, x[c]);
    return out;
}

std::size_t dense_rational_rank(const DenseZ& m) {
    if (m.empty()) return 0;
    std::vector<std::vector<mpq_class>> a(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) a[i].assign(m[i].begin(), m[i].end());
    std::size_t r = 0, cols = a[0].size();
    for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
        std::size_t p = r;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < a.size(); ++i) {
            if (a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[r][c];
            for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
        }
        ++r;
    }
    return r;
}

}  // namespace

std::size_t rank(const SparseMatrix& m, Ring ring) {
    switch (ring) {
        case Ring::GF2: {
            if (use_packed(m, false)) {
                PackedGf2 e(m.rows(), m.cols(), false);
                for (int c : column_order(m, ring)) e.insert(pack_column(m, c, e.words()), {});
                return e.rank();
            }
            return sparse_rank<Gf2Ops>(m, ring);
        }
        case Ring::Rational:
        case Ring::Integer: {
            auto uc = eliminate_units(m);
            return uc.units + dense_rational_rank(uc.core);
        }
    }
    return 0;
}

namespace {

std::optional<SparseVector> direct_solve(const SparseMatrix& m, const SparseVector& b, Ring ring) {
    std::optional<SparseVector> x;
    switch (ring) {
        case Ring::GF2: {
            if (use_packed(m, true)) {
                PackedGf2 e(m.rows(), m.cols(), true);
                for (int c : column_order(m, ring)) {
                    std::vector<std::uint64_t> combo(e.cwords(), 0);
                    combo[static_cast<std::size_t>(c) / 64] |= std::uint64_t{1} << (c % 64);
                    e.insert(pack_column(m, c, e.words()), std::move(combo));
                }
                std::vector<std::uint64_t> rhs(e.words(), 0);
                for (const auto& [i, v] : b.entries) {
                    if (v.get_den() != 1) return std::nullopt;
                    if (mpz_odd_p(v.get_num_mpz_t())) rhs[static_cast<std::size_t>(i) / 64] ^= std::uint64_t{1} << (i % 64);
                }
                auto packed = e.express(std::move(rhs));
                if (!packed) return std::nullopt;
                x = SparseVector(m.cols());
                for (int c = 0; c < m.cols(); ++c)
                    if (((*packed)[static_cast<std::size_t>(c) / 64] >> (c % 64)) & 1u) x->entries.emplace_back(c, 1);
            } else {
                x = sparse_solve<Gf2Ops>(m, b, ring);
            }
            break;
        }
        case Ring::Rational: x = sparse_solve<QOps>(m, b, ring); break;
        case Ring::Integer: x = sparse_solve<ZOps>(m, b, ring); break;
    }
    return x;
}

}  // namespace

std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b, Ring ring) {
    if (b.length != m.rows()) throw std::invalid_argument("dimension mismatch in solve");
    std::optional<SparseVector> x;
    bool integral = std::all_of(b.entries.begin(), b.entries.end(), [](const auto& e) { return e.second.get_den() == 1; });
    auto core = [&](const SparseMatrix& cm, const SparseVector& cb) { return direct_solve(cm, cb, ring); };
    if (!integral) {
        x = direct_solve(m, b, ring);
    } else {
        try {
            x = eliminate_and_solve<long long>(m, b, ring, core);
        } catch (const Overflow&) {
            x = eliminate_and_solve<mpz_class>(m, b, ring, core);
        }
    }
    if (x && !vectors_equal(multiply(m, *x, ring), b, ring))
        throw std::logic_error("solver produced a vector that does not satisfy M x = b");
    return x;
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

DenseZ identity(std::size_t n) {
    DenseZ id(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
    return id;
}

}  // namespace

DenseZ multiply(const DenseZ& a, const DenseZ& b) {
    std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    DenseZ c(n, std::vector<mpz_class>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
        }
    return c;
}

mpz_class determinant(const DenseZ& m) {
    // Bareiss fraction-free elimination
    std::size_t n = m.size();
    if (n == 0) return 1;
    DenseZ a = m;
    int sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[k], a[s]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

SmithForm smith_normal_form(const DenseZ& m) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    SmithForm f;
    f.S = m;
    f.U = identity(rows);
    f.V = identity(cols);
    DenseZ& A = f.S;
    auto row_op = [&](std::size_t i, std::size_t j, const mpz_class& a, const mpz_class& b, const mpz_class& c,
                      const mpz_class& d) {
        // (row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j)
        for (std::size_t k = 0; k < cols; ++k) {
            mpz_class x = A[i][k], y = A[j][k];
            A[i][k] = a * x + b * y;
            A[j][k] = c * x + d * y;
        }
        for (std::size_t k = 0; k < rows; ++k) {
            mpz_class x = f.U[i][k], y = f.U[j][k];
            f.U[i][k] = a * x + b * y;
            f.U[j][k] = c * x + d * y;
        }
    };
    auto col_op = [&](std::size_t i, std::size_t j, const mpz_class& a, const mpz_class& b, const mpz_class& c,
                      const mpz_class& d) {
        for (std::size_t k = 0; k < rows; ++k) {
            mpz_class x = A[k][i], y = A[k][j];
            A[k][i] = a * x + b * y;
            A[k][j] = c * x + d * y;
        }
        for (std::size_t k = 0; k < cols; ++k) {
            mpz_class x = f.V[k][i], y = f.V[k][j];
            f.V[k][i] = a * x + b * y;
            f.V[k][j] = c * x + d * y;
        }
    };

    std::size_t t = 0;
    while (t < rows && t < cols) {
        // pivot: smallest nonzero absolute value in the lower-right block, lowest indices on ties
        std::size_t pr = rows, pc = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (A[i][j] != 0 && (pr == rows || abs(A[i][j]) < abs(A[pr][pc]))) {
                    pr = i;
                    pc = j;
                }
        if (pr == rows) break;
        if (pr != t) row_op(t, pr, 0, 1, 1, 0);
        if (pc != t) col_op(t, pc, 0, 1, 1, 0);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (A[i][t] == 0) continue;
                if (mpz_divisible_p(A[i][t].get_mpz_t(), A[t][t].get_mpz_t())) {
                    mpz_class q = A[i][t] / A[t][t];
                    row_op(t, i, 1, 0, -q, 1);
                    continue;
                }
                mpz_class g, s, u;
                mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), u.get_mpz_t(), A[t][t].get_mpz_t(), A[i][t].get_mpz_t());
                mpz_class a = A[t][t] / g, b = A[i][t] / g;
                row_op(t, i, s, u, -b, a);
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (A[t][j] == 0) continue;
                if (mpz_divisible_p(A[t][j].get_mpz_t(), A[t][t].get_mpz_t())) {
                    mpz_class q = A[t][j] / A[t][t];
                    col_op(t, j, 1, 0, -q, 1);
                    continue;
                }
                mpz_class g, s, u;
                mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), u.get_mpz_t(), A[t][t].get_mpz_t(), A[t][j].get_mpz_t());
                mpz_class a = A[t][t] / g, b = A[t][j] / g;
                col_op(t, j, s, u, -b, a);
                clean = false;
            }
            if (!clean) continue;
            for (std::size_t i = t + 1; i < rows && clean; ++i)
                if (A[i][t] != 0) clean = false;
            if (!clean) continue;
            // divisibility: fold any entry not divisible by the pivot into row t
            for (std::size_t i = t + 1; i < rows && clean; ++i)
                for (std::size_t j = t + 1; j < cols && clean; ++j)
                    if (!mpz_divisible_p(A[i][j].get_mpz_t(), A[t][t].get_mpz_t())) {
                        row_op(t, i, 1, 1, 0, 1);
                        clean = false;
                    }
        }
        if (A[t][t] < 0) {
            for (std::size_t k = 0; k < cols; ++k) A[t][k] = -A[t][k];
            for (std::size_t k = 0; k < rows; ++k) f.U[t][k] = -f.U[t][k];
        }
        f.diagonal.push_back(A[t][t]);
        ++t;
    }
    return f;
}

SmithForm smith_normal_form(const SparseMatrix& m) {
    DenseZ d(static_cast<std::size_t>(m.rows()), std::vector<mpz_class>(static_cast<std::size_t>(m.cols()), 0));
    for (int c = 0; c < m.cols(); ++c)
        for (const auto& [r, v] : m.column(c)) d[r][c] = mpz_class(static_cast<long>(v));
    return smith_normal_form(d);
}

std::vector<mpz_class> smith_diagonal(const SparseMatrix& m) {
    auto uc = eliminate_units(m);
    std::vector<mpz_class> diag(uc.units, 1);
    if (!uc.core.empty()) {
        auto f = smith_normal_form(uc.core);
        diag.insert(diag.end(), f.diagonal.begin(), f.diagonal.end());
    }
    return diag;
}

}  // namespace tkh
