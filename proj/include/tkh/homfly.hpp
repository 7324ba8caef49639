#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "tkh/braid.hpp"
#include "tkh/khovanov.hpp"
#include "tkh/tangle.hpp"

namespace tkh {

// Laurent polynomial in a and z with integer coefficients.
class LaurentPoly2 {
public:
    using Exps = std::pair<int, int>;  // (a, z)

    LaurentPoly2() = default;
    static LaurentPoly2 monomial(int a, int z, const mpz_class& c = 1);
    static LaurentPoly2 constant(const mpz_class& c) { return monomial(0, 0, c); }
    // Accepts the printed form, e.g. "10a^10 - 13a^12 + 39a^10z^2 - a^12z^8".
    static LaurentPoly2 parse(const std::string& text);

    const std::map<Exps, mpz_class>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    mpz_class coefficient(int a, int z) const;
    std::size_t size() const { return terms_.size(); }

    void add_term(int a, int z, const mpz_class& c);
    LaurentPoly2& operator+=(const LaurentPoly2& o);
    LaurentPoly2& operator-=(const LaurentPoly2& o);
    LaurentPoly2 operator+(const LaurentPoly2& o) const;
    LaurentPoly2 operator-(const LaurentPoly2& o) const;
    LaurentPoly2 operator*(const LaurentPoly2& o) const;
    LaurentPoly2 shifted(int da, int dz, const mpz_class& c = 1) const;  // c a^da z^dz * this
    bool operator==(const LaurentPoly2& o) const { return terms_ == o.terms_; }

    // Terms ordered by z, then a.
    std::string str() const;
    std::string to_json() const;

private:
    std::map<Exps, mpz_class> terms_;
};

// (a - a^-1) / z: the factor added by a split unknotted component.
LaurentPoly2 homfly_delta();

// Normalized by P(unknot) = 1 and a P(D+) - a^-1 P(D-) = z P(D0).
LaurentPoly2 homfly(const BraidWord& w, std::size_t max_nodes = 5'000'000);
// Braid-like diagrams of crossing tiles with the default downward orientation.
LaurentPoly2 homfly(const TangleDiagram& d, std::size_t max_nodes = 5'000'000);

// P of T(2, -q) from P_q = a^2 P_{q-2} - a z P_{q-1}, seeded with q = 2, 3 from homfly().
LaurentPoly2 torus_homfly(int q);

int a_degree(const LaurentPoly2& p);
// Upper bound -deg_a - 1 on the self-linking number of any transverse representative.
int msl_upper_bound(const LaurentPoly2& p);

enum class ObstructionKind { AllRepresentativesVanish, Inconclusive };

struct Obstruction {
    ObstructionKind kind = ObstructionKind::Inconclusive;
    std::set<int> support;  // j with Kh^{0,j} != 0
    int bound = 0;          // msl upper bound
    LaurentPoly2 polynomial;
    std::string str() const;
};

// psi of a representative sits at (0, sl) with sl <= bound, so it vanishes for every
// representative when Kh^0 has nothing at or below the bound.
Obstruction whole_link_psi_obstruction(const BraidWord& w, Ring ring = Ring::Integer);
// Same test with the polynomial of w already known.
Obstruction whole_link_psi_obstruction(const BraidWord& w, const LaurentPoly2& p, Ring ring = Ring::Integer);

struct PretzelPrediction {
    std::set<int> support;
    int a_degree = 0;
};

// Predicted Kh^0 support and deg_a for P(r, -q, -q), r even, q odd.
PretzelPrediction pretzel_support_formula(int r, int q);

}  // namespace tkh
