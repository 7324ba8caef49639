#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tkh/braid.hpp"
#include "tkh/khovanov.hpp"
#include "tkh/tangle.hpp"

namespace tkh {

// Box outside which Kh^i_j(D) vanishes: i in [-n-, n+], j in [n+ - 2n- - |s0|, |s1| + 2n+ - n-].
GradingBox grading_support_bounds(const TangleDiagram& d);

// A group Kh^i_j of one of the two resolutions appearing in the skein exact sequence.
struct LesTerm {
    int resolution = 0;  // 0 or 1
    Grading grading;
};

// Exact sequence around a crossing c of D. For a negative crossing
//   Kh^i_{j+1}(D1) -> Kh^i_j(D) -> Kh^{i-u}_{j-3u-1}(D0),  u = n-(D0) - n-(D),
// and for a positive crossing
//   Kh^{i-u-1}_{j-3u-2}(D1) -> Kh^i_j(D) -> Kh^i_{j-1}(D0),  u = n-(D1) - n-(D).
// The oriented resolution inherits the orientation of D; the other one uses `orientation`
// (per-component flags) when given and the default downward flags otherwise.
struct LesShift {
    int crossing = 0;
    int sign = 0;  // sign of the crossing in D
    int u = 0;
    TangleDiagram d0, d1;

    int oriented() const { return sign > 0 ? 0 : 1; }
    int other() const { return 1 - oriented(); }
    const TangleDiagram& resolved(int k) const { return k ? d1 : d0; }

    LesTerm source(Grading g) const;  // maps into Kh^i_j(D)
    LesTerm target(Grading g) const;  // receives Kh^i_j(D)
    // The two groups of the unoriented resolution whose vanishing forces
    // Kh^i_j(D) to be isomorphic to the matching group of the oriented resolution.
    std::pair<LesTerm, LesTerm> flanks(Grading g) const;
};

LesShift les_shift_data(const TangleDiagram& d, int crossing, const std::optional<std::vector<int>>& orientation = std::nullopt);

struct WindowCheck {
    bool iso = false;
    std::string reason;
    std::vector<int> columns;  // homological degrees of the unoriented resolution that had to vanish
};

struct WindowOptions {
    Ring ring = Ring::GF2;
    int marked = 0;  // reduced theory by default; -1 for unreduced
    std::optional<std::vector<int>> orientation;
    std::size_t max_dim = kDefaultMaxDim;
};

// Whether Kh^i_j(D) is isomorphic to the matching group of the oriented resolution at c because
// the unoriented resolution has no homology in the two flanking homological degrees.
WindowCheck les_window_is_iso(const TangleDiagram& d, int crossing, int i, int j, const WindowOptions& opt = {});

struct StabilityReport {
    int threshold = 0;  // psi of beta * alpha^(+-m) is constant for m > threshold
    int direction = -1;
    int a = 2;
    int index = 1;
    int count = 0;      // n+ of beta for negative twists, n- for positive ones
    int letters_per_twist = 0;
    std::string str() const;
    std::string to_json() const;
};

StabilityReport stability_threshold(const BraidWord& beta, int a, int i, int sign);

// beta followed by m copies of the sub-full twist on strands i..i+a-1 with the given sign.
BraidWord stability_member(const BraidWord& beta, int a, int i, int sign, int m);

}  // namespace tkh
