#include "tkh/skeinstab.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tkh {

namespace {

int all_state_circles(const TangleDiagram& d, bool ones) {
    int n = d.crossing_count();
    std::uint64_t bits = ones && n > 0 ? (n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1) : 0;
    return circle_count(d, KauffmanState{bits, n});
}

// Orientation flags for r copying the directions of d, where r's segment s sits on d's segment seg_map(s).
template <class F>
std::vector<int> inherited_flags(const TangleDiagram& d, const TangleDiagram& r, F seg_map) {
    std::vector<int> flags(static_cast<std::size_t>(r.component_count()), 0);
    std::vector<bool> done(flags.size(), false);
    for (int s = 0; s < r.segment_count(); ++s) {
        int c = r.segment_component()[s];
        if (done[c]) continue;
        done[c] = true;
        flags[c] = d.segment_direction()[seg_map(s)];
    }
    return flags;
}

}  // namespace

GradingBox grading_support_bounds(const TangleDiagram& d) {
    int np = d.n_plus(), nm = d.n_minus();
    return {-nm, np, np - 2 * nm - all_state_circles(d, false), all_state_circles(d, true) + 2 * np - nm};
}

LesTerm LesShift::source(Grading g) const {
    if (sign < 0) return {1, {g.i, g.j + 1}};
    return {1, {g.i - u - 1, g.j - 3 * u - 2}};
}

LesTerm LesShift::target(Grading g) const {
    if (sign < 0) return {0, {g.i - u, g.j - 3 * u - 1}};
    return {0, {g.i, g.j - 1}};
}

std::pair<LesTerm, LesTerm> LesShift::flanks(Grading g) const {
    if (sign < 0) return {{0, {g.i - u - 1, g.j - 3 * u - 1}}, {0, {g.i - u, g.j - 3 * u - 1}}};
    return {{1, {g.i - u - 1, g.j - 3 * u - 2}}, {1, {g.i - u, g.j - 3 * u - 2}}};
}

LesShift les_shift_data(const TangleDiagram& d, int crossing, const std::optional<std::vector<int>>& orientation) {
    if (crossing < 0 || crossing >= d.crossing_count()) throw std::invalid_argument("invalid crossing position");
    LesShift s;
    s.crossing = crossing;
    s.sign = d.crossing_signs()[static_cast<std::size_t>(crossing)];
    s.d0 = khovanov_resolution(d, crossing, 0);
    s.d1 = khovanov_resolution(d, crossing, 1);
    int b = d.strands();
    int tile = d.tile_of_crossing(crossing);
    TangleDiagram& ori = s.oriented() ? s.d1 : s.d0;
    TangleDiagram& other = s.oriented() ? s.d0 : s.d1;
    // The oriented resolution drops the tile: rows at or above it keep their index, rows below move up.
    ori.set_orientation(inherited_flags(d, ori, [&](int seg) {
        int row = seg / b, pos = seg % b;
        return d.segment(row <= tile ? row : row + 1, pos);
    }));
    if (orientation) other.set_orientation(*orientation);
    s.u = other.n_minus() - d.n_minus();
    return s;
}

WindowCheck les_window_is_iso(const TangleDiagram& d, int crossing, int i, int j, const WindowOptions& opt) {
    WindowCheck out;
    if (crossing < 0 || crossing >= d.crossing_count()) {
        out.reason = "no such crossing";
        return out;
    }
    LesShift s = les_shift_data(d, crossing, opt.orientation);
    auto [lo, hi] = s.flanks({i, j});
    const TangleDiagram& r = s.resolved(lo.resolution);
    out.columns = {lo.grading.i, hi.grading.i};
    GradingBox box = grading_support_bounds(r);
    auto outside = [&](int col) { return col < box.i_min || col > box.i_max; };
    if (outside(lo.grading.i) && outside(hi.grading.i)) {
        out.iso = true;
        out.reason = "grading bounds: degrees " + std::to_string(lo.grading.i) + ", " + std::to_string(hi.grading.i) +
                     " lie outside [" + std::to_string(box.i_min) + ", " + std::to_string(box.i_max) + "]";
        return out;
    }
    HomologyOptions ho;
    ho.ring = opt.ring;
    ho.marked = opt.marked;
    ho.max_dim = opt.max_dim;
    ho.window = GradingBox{lo.grading.i, hi.grading.i, box.j_min - 1, box.j_max};
    HomologyTable t = homology_table(r, ho);
    if (t.groups.empty()) {
        out.iso = true;
        out.reason = "computed: resolution " + std::to_string(lo.resolution) + " has no homology in degrees " +
                     std::to_string(lo.grading.i) + ", " + std::to_string(hi.grading.i);
        return out;
    }
    auto g = t.groups.begin()->first;
    out.reason = "resolution " + std::to_string(lo.resolution) + " has homology at (" + std::to_string(g.i) + "," +
                 std::to_string(g.j) + ")";
    return out;
}

StabilityReport stability_threshold(const BraidWord& beta, int a, int i, int sign) {
    if (a < 2 || a >= beta.strands) throw std::invalid_argument("twist width must satisfy 2 <= a < strands");
    if (i < 1 || i + a - 1 > beta.strands) throw std::invalid_argument("twist strands out of range");
    if (sign != 1 && sign != -1) throw std::invalid_argument("twist sign must be +1 or -1");
    StabilityReport r;
    r.direction = sign;
    r.a = a;
    r.index = i;
    r.count = sign < 0 ? beta.n_plus() : beta.n_minus();
    r.letters_per_twist = a * (a - 1);
    // m copies contribute l = m a twist letters per strand pair; l > count settles the verdict.
    r.threshold = r.count / a;
    return r;
}

BraidWord stability_member(const BraidWord& beta, int a, int i, int sign, int m) {
    return concat(beta, power(sub_full_twist(a, i, sign, beta.strands), m));
}

std::string StabilityReport::str() const {
    std::ostringstream os;
    os << "N = " << threshold << " (a = " << a << ", i = " << index << ", " << (direction < 0 ? "negative" : "positive")
       << ", " << (direction < 0 ? "n+" : "n-") << " = " << count << ")";
    return os.str();
}

std::string StabilityReport::to_json() const {
    nlohmann::json j = {{"threshold", threshold},
                        {"direction", direction < 0 ? "negative" : "positive"},
                        {"a", a},
                        {"i", index},
                        {"count", count},
                        {"letters_per_twist", letters_per_twist}};
    return j.dump();
}

}  // namespace tkh
