#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "tkh/braid.hpp"

namespace tkh {

enum class DehornoySign { Negative = -1, Trivial = 0, Positive = 1 };

std::string to_string(DehornoySign s);

class HandleReductionLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FdtcOptions {
    std::size_t max_steps = 1'000'000;  // handle reductions per sign computation
    int floor_range = -1;               // |m| searched by dehornoy_floor; -1 means word length + 1
};

// Handle reduction until no handle is left; throws HandleReductionLimit past the step budget.
BraidWord handle_reduce(const BraidWord& w, const FdtcOptions& opt = {});
DehornoySign dehornoy_sign(const BraidWord& w, const FdtcOptions& opt = {});
// x < y in the left-invariant order, i.e. x^-1 y > 1
bool dehornoy_less(const BraidWord& x, const BraidWord& y, const FdtcOptions& opt = {});

// The m with Delta^2m <= w < Delta^2m+2.
int dehornoy_floor(const BraidWord& w, const FdtcOptions& opt = {});

enum class FdtcProvenance { LetterCount, Pattern, FloorSequence };

struct FdtcBounds {
    mpq_class lower, upper;
    FdtcProvenance provenance = FdtcProvenance::LetterCount;
    bool exact() const { return lower == upper; }
    std::string str() const;
};

// -s <= tau <= r for the counts r, s of sigma_i, sigma_i^-1, intersected over i (on the freely reduced word).
FdtcBounds fdtc_letter_bounds(const BraidWord& w);

// n when some cyclic rotation of the freely reduced word is Delta^2n followed by a sigma_i-free word.
std::optional<mpq_class> fdtc_pattern(const BraidWord& w, const FdtcOptions& opt = {});

// Pattern value when it matches, letter bounds otherwise.
FdtcBounds fdtc_bounds(const BraidWord& w, const FdtcOptions& opt = {});

// floor(w^k) / k for k = 1..k_max.
std::vector<mpq_class> floor_sequence(const BraidWord& w, int k_max, const FdtcOptions& opt = {});

}  // namespace tkh
