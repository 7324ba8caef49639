#include "tkh/tangle.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

#include "tkh/dsu.hpp"

namespace tkh {

std::string KauffmanState::str() const {
    std::string s;
    for (int c = 0; c < length; ++c) s.push_back(bit(c) ? '1' : '0');
    return s;
}

TangleDiagram::TangleDiagram(int strands, std::vector<Tile> tiles) : b_(strands), tiles_(std::move(tiles)) {
    if (b_ < 1) throw std::invalid_argument("strand count must be positive");
    for (std::size_t t = 0; t < tiles_.size(); ++t) {
        const Tile& tile = tiles_[t];
        if (tile.index < 1 || tile.index > b_ - 1) throw std::invalid_argument("tile index out of range");
        if (tile.kind == Tile::Kind::Crossing) {
            if (tile.sign != 1 && tile.sign != -1) throw std::invalid_argument("crossing sign must be +1 or -1");
            tile_crossing_.push_back(static_cast<int>(crossing_tile_.size()));
            crossing_tile_.push_back(static_cast<int>(t));
        } else {
            tile_crossing_.push_back(-1);
        }
    }
    compute_components();
    orientation_.assign(component_min_segment_.size(), 1);
    compute_directions();
}

void TangleDiagram::compute_components() {
    Dsu dsu(segment_count());
    int T = static_cast<int>(tiles_.size());
    for (int r = 0; r < T; ++r) {
        const Tile& t = tiles_[static_cast<std::size_t>(r)];
        int i = t.index - 1;
        for (int p = 0; p < b_; ++p) {
            if (p == i || p == i + 1) continue;
            dsu.unite(segment(r, p), segment(r + 1, p));
        }
        if (t.kind == Tile::Kind::Crossing) {
            dsu.unite(segment(r, i), segment(r + 1, i + 1));
            dsu.unite(segment(r, i + 1), segment(r + 1, i));
        } else {
            dsu.unite(segment(r, i), segment(r, i + 1));
            dsu.unite(segment(r + 1, i), segment(r + 1, i + 1));
        }
    }
    segment_component_.assign(static_cast<std::size_t>(segment_count()), -1);
    component_min_segment_.clear();
    for (int s = 0; s < segment_count(); ++s) {
        int root = dsu.find(s);
        if (root == s) {
            segment_component_[s] = static_cast<int>(component_min_segment_.size());
            component_min_segment_.push_back(s);
        } else {
            segment_component_[s] = segment_component_[root];
        }
    }
}

void TangleDiagram::compute_directions() {
    segment_dir_.assign(static_cast<std::size_t>(segment_count()), 0);
    int T = static_cast<int>(tiles_.size());
    for (std::size_t comp = 0; comp < component_min_segment_.size(); ++comp) {
        int start = component_min_segment_[comp];
        int dir = orientation_[comp];
        int row = start / b_, pos = start % b_;
        while (true) {
            int seg = segment(row, pos);
            if (segment_dir_[seg] != 0) break;
            segment_dir_[seg] = dir;
            if (T == 0) break;
            if (dir > 0) {
                const Tile& t = tiles_[static_cast<std::size_t>(row)];
                int i = t.index - 1;
                if (pos == i || pos == i + 1) {
                    if (t.kind == Tile::Kind::Crossing) {
                        pos = pos == i ? i + 1 : i;
                        row = (row + 1) % T;
                    } else {
                        pos = pos == i ? i + 1 : i;
                        dir = -1;
                    }
                } else {
                    row = (row + 1) % T;
                }
            } else {
                int above = (row - 1 + T) % T;
                const Tile& t = tiles_[static_cast<std::size_t>(above)];
                int i = t.index - 1;
                if (pos == i || pos == i + 1) {
                    if (t.kind == Tile::Kind::Crossing) {
                        pos = pos == i ? i + 1 : i;
                        row = above;
                    } else {
                        pos = pos == i ? i + 1 : i;
                        dir = 1;
                    }
                } else {
                    row = above;
                }
            }
        }
    }
}

void TangleDiagram::set_orientation(const std::vector<int>& flags) {
    if (flags.size() != component_min_segment_.size())
        throw std::invalid_argument("orientation needs one flag per component");
    for (int f : flags)
        if (f != 1 && f != -1) throw std::invalid_argument("orientation flags must be +1 or -1");
    orientation_ = flags;
    compute_directions();
}

void TangleDiagram::set_component_orientation(int component, int flag) {
    if (component < 0 || component >= component_count()) throw std::invalid_argument("no such component");
    auto flags = orientation_;
    flags[static_cast<std::size_t>(component)] = flag;
    set_orientation(flags);
}

std::vector<int> TangleDiagram::crossing_signs() const {
    std::vector<int> signs;
    for (int c = 0; c < crossing_count(); ++c) {
        int r = crossing_tile_[static_cast<std::size_t>(c)];
        const Tile& t = tiles_[static_cast<std::size_t>(r)];
        int i = t.index - 1;
        signs.push_back(t.sign * segment_dir_[segment(r, i)] * segment_dir_[segment(r, i + 1)]);
    }
    return signs;
}

int TangleDiagram::n_plus() const {
    auto s = crossing_signs();
    return static_cast<int>(std::count(s.begin(), s.end(), 1));
}

int TangleDiagram::n_minus() const { return crossing_count() - n_plus(); }

std::string TangleDiagram::to_json() const {
    nlohmann::json j;
    j["strands"] = b_;
    nlohmann::json tiles = nlohmann::json::array();
    for (const Tile& t : tiles_) {
        if (t.kind == Tile::Kind::Crossing)
            tiles.push_back({{"crossing", t.index * t.sign}});
        else
            tiles.push_back({{"capcup", t.index}});
    }
    j["tiles"] = tiles;
    j["orientation"] = orientation_;
    return j.dump();
}

TangleDiagram from_braid(const BraidWord& w) {
    std::vector<Tile> tiles;
    tiles.reserve(w.letters.size());
    for (const Letter& l : w.letters) tiles.push_back(crossing_tile(l.index, l.sign));
    return TangleDiagram(w.strands, std::move(tiles));
}

CircleDecomposition resolve(const TangleDiagram& d, const KauffmanState& s) {
    if (s.length != d.crossing_count()) throw std::invalid_argument("state length does not match crossing count");
    int b = d.strands();
    Dsu dsu(d.segment_count());
    const auto& tiles = d.tiles();
    int T = static_cast<int>(tiles.size());
    for (int r = 0; r < T; ++r) {
        const Tile& t = tiles[static_cast<std::size_t>(r)];
        int i = t.index - 1;
        for (int p = 0; p < b; ++p) {
            if (p == i || p == i + 1) continue;
            dsu.unite(d.segment(r, p), d.segment(r + 1, p));
        }
        bool vertical = t.kind == Tile::Kind::Crossing && resolution_is_identity(t, s.bit(d.crossing_of_tile(r)));
        if (vertical) {
            dsu.unite(d.segment(r, i), d.segment(r + 1, i));
            dsu.unite(d.segment(r, i + 1), d.segment(r + 1, i + 1));
        } else {
            dsu.unite(d.segment(r, i), d.segment(r, i + 1));
            dsu.unite(d.segment(r + 1, i), d.segment(r + 1, i + 1));
        }
    }
    CircleDecomposition out;
    out.segment_circle.assign(static_cast<std::size_t>(d.segment_count()), -1);
    for (int seg = 0; seg < d.segment_count(); ++seg) {
        int root = dsu.find(seg);
        if (root == seg)
            out.segment_circle[seg] = out.circle_count++;
        else
            out.segment_circle[seg] = out.segment_circle[root];
    }
    for (int c = 0; c < d.crossing_count(); ++c) {
        int r = d.tile_of_crossing(c);
        int i = tiles[static_cast<std::size_t>(r)].index - 1;
        out.incident.emplace_back(out.segment_circle[d.segment(r, i)], out.segment_circle[d.segment(r + 1, i + 1)]);
    }
    return out;
}

int circle_count(const TangleDiagram& d, const KauffmanState& s) { return resolve(d, s).circle_count; }

KauffmanState oriented_resolution_state(const TangleDiagram& d) {
    KauffmanState s;
    s.length = d.crossing_count();
    if (s.length > 64) throw std::invalid_argument("state bits limited to 64 crossings");
    auto signs = d.crossing_signs();
    for (int c = 0; c < s.length; ++c)
        if (signs[static_cast<std::size_t>(c)] < 0) s.bits |= std::uint64_t{1} << c;
    return s;
}

TangleDiagram khovanov_resolution(const TangleDiagram& d, int crossing, int choice) {
    if (crossing < 0 || crossing >= d.crossing_count()) throw std::invalid_argument("invalid crossing position");
    if (choice != 0 && choice != 1) throw std::invalid_argument("resolution choice must be 0 or 1");
    std::vector<Tile> tiles;
    int target = d.tile_of_crossing(crossing);
    for (int r = 0; r < static_cast<int>(d.tiles().size()); ++r) {
        const Tile& t = d.tiles()[static_cast<std::size_t>(r)];
        if (r != target) {
            tiles.push_back(t);
        } else if (!resolution_is_identity(t, choice)) {
            tiles.push_back(capcup_tile(t.index));
        }
    }
    return TangleDiagram(d.strands(), std::move(tiles));
}

}  // namespace tkh
