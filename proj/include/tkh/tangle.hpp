#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tkh/braid.hpp"

namespace tkh {

struct Tile {
    enum class Kind { Crossing, CapCup };
    Kind kind = Kind::Crossing;
    int index = 1;  // acts on strand positions index, index+1 (1-based)
    int sign = 1;   // letter sign; unused for CapCup
    bool operator==(const Tile&) const = default;
};

inline Tile crossing_tile(int i, int sign) { return {Tile::Kind::Crossing, i, sign}; }
inline Tile capcup_tile(int i) { return {Tile::Kind::CapCup, i, 0}; }

// One bit per Crossing tile, bit c = resolution at the c-th crossing.
struct KauffmanState {
    std::uint64_t bits = 0;
    int length = 0;
    int popcount() const { return __builtin_popcountll(bits); }
    bool bit(int c) const { return (bits >> c) & 1u; }
    std::string str() const;
    bool operator==(const KauffmanState&) const = default;
};

struct CircleDecomposition {
    int circle_count = 0;
    std::vector<int> segment_circle;  // segment id -> canonical circle number
    // For each crossing: the two circles meeting there; merge when flipping a 0-bit iff they differ.
    std::vector<std::pair<int, int>> incident;
};

class TangleDiagram {
public:
    TangleDiagram() = default;
    TangleDiagram(int strands, std::vector<Tile> tiles);

    int strands() const { return b_; }
    const std::vector<Tile>& tiles() const { return tiles_; }
    int crossing_count() const { return static_cast<int>(crossing_tile_.size()); }
    int tile_of_crossing(int c) const { return crossing_tile_[static_cast<std::size_t>(c)]; }
    int crossing_of_tile(int t) const { return tile_crossing_[static_cast<std::size_t>(t)]; }

    int rows() const { return tiles_.empty() ? 1 : static_cast<int>(tiles_.size()); }
    int segment_count() const { return rows() * b_; }
    int segment(int row, int pos) const { return (row % rows()) * b_ + pos; }

    int component_count() const { return static_cast<int>(component_min_segment_.size()); }
    const std::vector<int>& segment_component() const { return segment_component_; }
    // +1 when the component's minimal segment is traversed downward
    const std::vector<int>& orientation() const { return orientation_; }
    void set_orientation(const std::vector<int>& flags);
    void set_component_orientation(int component, int flag);
    // +1 if the segment is traversed downward under the current orientation
    const std::vector<int>& segment_direction() const { return segment_dir_; }

    std::vector<int> crossing_signs() const;
    int n_plus() const;
    int n_minus() const;

    std::string to_json() const;

private:
    int b_ = 1;
    std::vector<Tile> tiles_;
    std::vector<int> crossing_tile_;
    std::vector<int> tile_crossing_;
    std::vector<int> segment_component_;
    std::vector<int> component_min_segment_;
    std::vector<int> orientation_;
    std::vector<int> segment_dir_;

    void compute_components();
    void compute_directions();
};

TangleDiagram from_braid(const BraidWord& w);

CircleDecomposition resolve(const TangleDiagram& d, const KauffmanState& s);
int circle_count(const TangleDiagram& d, const KauffmanState& s);

KauffmanState oriented_resolution_state(const TangleDiagram& d);

// Replaces the crossing with its 0- or 1-resolution; orientation defaults to all flags downward.
TangleDiagram khovanov_resolution(const TangleDiagram& d, int crossing, int choice);

// Whether the crossing's resolution for a bit is the vertical (identity) picture.
inline bool resolution_is_identity(const Tile& t, int bit) { return (t.sign > 0) == (bit == 0); }

}  // namespace tkh
