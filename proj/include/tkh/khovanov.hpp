#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "tkh/braid.hpp"
#include "tkh/exactalg.hpp"
#include "tkh/tangle.hpp"

namespace tkh {

// Raised when a graded piece or intermediate complex exceeds the configured size.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxDim = 5'000'000;

// Per-circle marks in the canonical circle order of a resolution.
struct Labeling {
    std::uint64_t plus = 0;  // bit k set: circle k carries v+
    int length = 0;
    bool is_plus(int k) const { return (plus >> k) & 1u; }
    int p() const { return 2 * __builtin_popcountll(plus) - length; }
    std::string str() const;
    static Labeling parse(const std::string& s);
    bool operator==(const Labeling&) const = default;
};

struct Grading {
    int i = 0;
    int j = 0;
    auto operator<=>(const Grading&) const = default;
};

struct GradingBox {
    int i_min = 0, i_max = 0, j_min = 0, j_max = 0;
    bool contains(Grading g) const { return g.i >= i_min && g.i <= i_max && g.j >= j_min && g.j <= j_max; }
};

struct Generator {
    KauffmanState state;
    Labeling labeling;
    bool operator==(const Generator&) const = default;
};

// Unreduced grading of a generator: i = r - n-, j = p + i + n+ - n-.
Grading generator_grading(const TangleDiagram& d, const Generator& g);

// Circle containing the marked point: strand position `marked`, just below the closure arc.
int marked_circle(const TangleDiagram& d, const KauffmanState& s, int marked);

std::vector<Generator> graded_basis(const TangleDiagram& d, int i, int j, std::size_t max_dim = kDefaultMaxDim);
// Generators with the marked circle labeled v+; j is the reduced (shifted by -1) grading.
std::vector<Generator> reduced_graded_basis(const TangleDiagram& d, int marked, int i, int j,
                                            std::size_t max_dim = kDefaultMaxDim);

// Terms of d(g) with signs (-1)^(number of 1-bits before the changed crossing).
std::vector<std::pair<Generator, int>> differential_terms(const TangleDiagram& d, const Generator& g);

SparseMatrix differential_matrix(const TangleDiagram& d, int i, int j, Ring ring, std::size_t max_dim = kDefaultMaxDim);
SparseMatrix reduced_differential(const TangleDiagram& d, int marked, int i, int j,
                                  std::size_t max_dim = kDefaultMaxDim);

struct HomologyGroup {
    long rank = 0;
    std::vector<mpz_class> torsion;  // invariant factors > 1 (Integer ring only)
    bool is_zero() const { return rank == 0 && torsion.empty(); }
};

struct HomologyTable {
    Ring ring = Ring::Rational;
    bool reduced = false;
    std::map<Grading, HomologyGroup> groups;  // nonzero groups only
    long rank(int i, int j) const;
    bool is_zero(int i, int j) const;
    std::set<int> support_j(int i) const;
    std::set<Grading> support() const;
    std::string str() const;
};

enum class Engine { Auto, Naive, Local };

struct HomologyOptions {
    Ring ring = Ring::Rational;
    std::optional<GradingBox> window;
    int marked = -1;  // >= 0 selects reduced homology over GF2
    Engine engine = Engine::Auto;
    std::size_t max_dim = kDefaultMaxDim;
};

HomologyTable homology_table(const TangleDiagram& d, const HomologyOptions& opt = {});

class ChainElement {
public:
    using Key = std::pair<std::uint64_t, std::uint64_t>;  // (state bits, plus mask)

    ChainElement() = default;
    ChainElement(TangleDiagram d, Ring ring, int marked = -1) : diagram_(std::move(d)), ring_(ring), marked_(marked) {}

    const TangleDiagram& diagram() const { return diagram_; }
    Ring ring() const { return ring_; }
    int marked() const { return marked_; }
    bool reduced() const { return marked_ >= 0; }
    const std::map<Key, mpq_class>& terms() const { return terms_; }

    void add(const Generator& g, const mpq_class& c);
    mpq_class coefficient(const Generator& g) const;
    bool is_zero() const { return terms_.empty(); }
    std::vector<std::pair<Generator, mpq_class>> generators() const;
    // Reported grading of the (homogeneous) element; reduced elements use the shifted j.
    std::optional<Grading> grading() const;
    bool is_homogeneous() const;
    ChainElement negated() const;
    bool operator==(const ChainElement& o) const { return ring_ == o.ring_ && marked_ == o.marked_ && terms_ == o.terms_; }

private:
    TangleDiagram diagram_;
    Ring ring_ = Ring::Integer;
    int marked_ = -1;
    std::map<Key, mpq_class> terms_;
    int state_length() const { return diagram_.crossing_count(); }
};

ChainElement d_of(const ChainElement& x);
bool is_cycle(const ChainElement& x);

ChainElement psi_tilde(const BraidWord& w, Ring ring);
// Reduced element over GF2: marked circle v+, all others v-.
ChainElement psi_tilde_prime(const BraidWord& w, int marked = 0);

enum class VerdictKind { ZeroWithCertificate, ZeroByReduction, NonzeroClass, UndecidedResource };

std::string verdict_tag(VerdictKind k);

struct Verdict {
    VerdictKind kind = VerdictKind::UndecidedResource;
    Ring ring = Ring::GF2;
    bool reduced = false;
    Grading grading;
    std::optional<ChainElement> certificate;
    std::string method;  // "graded-piece", "tangle-reduction", ...
    std::string detail;
    bool vanishes() const { return kind == VerdictKind::ZeroWithCertificate || kind == VerdictKind::ZeroByReduction; }
    bool decided() const { return kind != VerdictKind::UndecidedResource; }
};

struct VerdictOptions {
    std::size_t max_dim = kDefaultMaxDim;
    Engine engine = Engine::Auto;
    int marked = 0;
    // Largest Hamming distance from the oriented state searched for a certificate after a tangle reduction.
    int certificate_radius = 5;
};

Verdict psi_vanishes(const BraidWord& w, Ring ring, const VerdictOptions& opt = {});
Verdict psi_prime_vanishes(const BraidWord& w, const VerdictOptions& opt = {});

// True iff d(phi) = +-psi (psi-prime for reduced elements). Throws std::invalid_argument on grading mismatch.
bool verify_certificate(const BraidWord& w, const ChainElement& phi);

// Searches for phi with d(phi) = psi among states near the oriented resolution.
std::optional<ChainElement> search_certificate(const BraidWord& w, Ring ring, int marked, int radius,
                                               std::size_t max_dim = kDefaultMaxDim);

struct DottedTerm {
    std::vector<int> one_positions;  // 1-based letter positions taking the 1-resolution
    std::vector<int> plus_circles;   // 1-based canonical circle numbers labeled v+
    long coefficient = 1;
};

ChainElement certificate_from_dotted(const BraidWord& w, Ring ring, const std::vector<DottedTerm>& terms, int marked = -1);

std::string certificate_to_json(const BraidWord& w, const ChainElement& phi);
// Parses the certificate format; returns the braid word it was recorded for and the element.
std::pair<BraidWord, ChainElement> certificate_from_json(const std::string& text);

}  // namespace tkh
