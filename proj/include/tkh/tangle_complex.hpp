#pragma once
// Khovanov complexes of braid-like tangles built tile by tile, with delooping and Gaussian
// elimination after each tile, then closed up and evaluated into vector spaces.

#include <map>
#include <optional>

#include "tkh/exactalg.hpp"
#include "tkh/khovanov.hpp"
#include "tkh/tangle.hpp"

namespace tkh {

enum class Tracked { None, Psi, PsiPrime };

struct LocalOptions {
    Ring ring = Ring::GF2;
    int marked = -1;  // >= 0: quotient by v- on the circle through this top point
    Tracked tracked = Tracked::None;
    std::size_t max_dim = kDefaultMaxDim;
    std::size_t max_objects = 2'000'000;
};

struct ClosedComplex {
    Ring ring = Ring::GF2;
    bool reduced = false;
    std::map<Grading, int> dims;                   // reported gradings
    std::map<Grading, SparseMatrix> differential;  // (i, j) -> (i + 1, j)
    std::optional<Grading> tracked_grading;        // unset when the tracked element maps to zero
    SparseVector tracked;
    std::size_t peak_objects = 0;
};

// The tracked element requires a diagram coming from a braid with its default orientation.
ClosedComplex reduce_closure(const TangleDiagram& d, const LocalOptions& opt);

HomologyTable homology_of(const ClosedComplex& c, const std::optional<GradingBox>& window = std::nullopt);

}  // namespace tkh
