#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tkh/fdtc.hpp"
#include "tkh/homfly.hpp"
#include "tkh/khovanov.hpp"
#include "tkh/skeinstab.hpp"

namespace tkh {

inline constexpr const char* kEngineVersion = "tkh-1";

// On-disk store of computed results, one JSON file per key. Stored certificates are re-verified on read.
class ResultCache {
public:
    explicit ResultCache(std::filesystem::path dir);
    // TKH_CACHE_DIR when set.
    static std::optional<std::filesystem::path> from_environment();

    const std::filesystem::path& dir() const { return dir_; }
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value) const;

    std::optional<Verdict> get_verdict(const std::string& op, const BraidWord& w, Ring ring, int marked) const;
    void put_verdict(const std::string& op, const BraidWord& w, int marked, const Verdict& v) const;
    std::optional<LaurentPoly2> get_homfly(const BraidWord& w) const;
    void put_homfly(const BraidWord& w, const LaurentPoly2& p) const;

    static std::string key(const std::string& op, const BraidWord& w, const std::string& ring, int marked);

private:
    std::filesystem::path dir_;
};

std::string verdict_to_json(const BraidWord& w, const Verdict& v);
Verdict verdict_from_json(const std::string& text);

struct Observation {
    std::string id;
    std::string statement;
};

struct LedgerFact {
    std::string rule;  // R1 .. R5
    std::vector<std::string> premises;  // observation ids
    std::string conclusion;
    std::string citation;
};

struct TransverseReport {
    BraidWord word;
    int writhe = 0;
    int self_linking = 0;
    std::vector<Verdict> psi;  // one per requested ring
    std::optional<Verdict> psi_prime;
    std::optional<LaurentPoly2> homfly;
    std::optional<int> deg_a, msl_bound;
    std::optional<Obstruction> whole_link;
    std::optional<FdtcBounds> fdtc;
    std::vector<std::string> undecided;  // fields that ran out of resources
    std::vector<Observation> observations;
    std::vector<LedgerFact> ledger;

    bool concludes(const std::string& conclusion) const;
    std::string quasipositive() const;  // "no" or "?"
    std::string right_veering() const;  // "yes" or "?"
    std::string to_json() const;
};

struct ReportOptions {
    std::vector<Ring> rings{Ring::GF2};
    bool psi_prime = true;
    bool homfly = false;  // polynomial, msl bound and the whole-link test
    bool fdtc = true;
    VerdictOptions verdict;
    FdtcOptions fdtc_options;
    std::optional<std::filesystem::path> cache_dir;
};

inline const char* kNotQuasipositive = "not quasipositive";
inline const char* kRightVeering = "right-veering";
inline const char* kNoQuasipositiveRepresentative = "no braid representative is quasipositive";

TransverseReport transverse_report(const BraidWord& w, const ReportOptions& opt = {});

// Every fact's premises are recorded observations and the report's data satisfies the rule.
bool ledger_sound(const TransverseReport& r);

enum class SweepEngine { PsiGF2, PsiQ, PsiZ, PsiPrime };
std::string sweep_engine_tag(SweepEngine e);
SweepEngine sweep_engine_from_tag(const std::string& tag);

struct TwistStability {
    int period = 1;  // insert^period is the sub-full twist
    int a = 2, index = 1, sign = -1;
    std::vector<int> thresholds;  // N per residue of k modulo period
};

// Detects insert^p equal to a sub-full twist on fewer strands than the braid.
std::optional<TwistStability> twist_stability(const FamilyTemplate& f, const FdtcOptions& opt = {});

struct SweepCell {
    int k = 0;
    std::vector<std::string> verdicts;  // verdict tags in engine order
    bool stable = false;                // copied from an earlier member past the threshold
    int source_k = 0;
};

struct SweepTable {
    FamilyTemplate family;
    std::vector<SweepEngine> engines;
    std::optional<TwistStability> stability;
    std::vector<SweepCell> cells;
    std::string to_json() const;
    std::string str() const;
};

struct SweepOptions {
    std::vector<SweepEngine> engines{SweepEngine::PsiGF2};
    bool use_stability = false;
    int margin = 1;  // members computed directly up to N + margin
    VerdictOptions verdict;
    std::optional<std::filesystem::path> cache_dir;
};

SweepTable family_sweep(const FamilyTemplate& f, const SweepOptions& opt = {});

struct FixtureResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Certificate fixtures in the JSON certificate format.
std::vector<std::pair<std::string, std::string>> certificate_fixtures();
std::vector<FixtureResult> verify_reference_fixtures();

}  // namespace tkh
