#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "tkh/dsu.hpp"
#include "tkh/tangle.hpp"

using namespace tkh;

namespace {

KauffmanState state_of(int n, std::uint64_t bits) { return KauffmanState{bits, n}; }

BraidWord delta_sigma3(int k) { return concat(full_twist(4), power(BraidWord(4, {{3, 1}}), -k)); }

}  // namespace

TEST_CASE("from_braid components and signs") {
    auto hopf = from_braid(BraidWord(2, {{1, 1}, {1, 1}}));
    CHECK(hopf.crossing_count() == 2);
    CHECK(hopf.component_count() == 2);
    CHECK(hopf.n_plus() == 2);
    CHECK(from_braid(BraidWord(3, {})).component_count() == 3);
    for (int k = 1; k <= 6; ++k) {
        auto d = from_braid(delta_sigma3(k));
        CHECK(d.n_plus() == 12);
        CHECK(d.n_minus() == k);
    }
}

TEST_CASE("resolve counts circles") {
    auto id3 = from_braid(BraidWord(3, {}));
    CHECK(resolve(id3, state_of(0, 0)).circle_count == 3);
    auto s1 = from_braid(BraidWord(2, {{1, 1}}));
    CHECK(resolve(s1, state_of(1, 0)).circle_count == 2);
    CHECK(resolve(s1, state_of(1, 1)).circle_count == 1);
    auto p = from_braid(parse_braid("-1 -2 -2 -2 -2 -2 -1 -2 -2 -2 -2 -2", 3));
    CHECK(resolve(p, oriented_resolution_state(p)).circle_count == 3);
    CHECK(resolve(p, oriented_resolution_state(p)).circle_count == 3);
    CHECK_THROWS(resolve(p, state_of(3, 0)));
}

TEST_CASE("oriented resolution state") {
    auto pos = from_braid(parse_braid("1 2 1 2", 3));
    CHECK(oriented_resolution_state(pos).bits == 0);
    auto d = from_braid(parse_braid("FT (-2)^5", 3));
    CHECK(oriented_resolution_state(d).str() == "00000011111");
    TangleDiagram withcap(3, {crossing_tile(1, 1), capcup_tile(2), crossing_tile(1, -1)});
    CHECK(oriented_resolution_state(withcap).length == 2);
}

TEST_CASE("khovanov_resolution of the last crossing of delta^2 sigma_3^-k") {
    for (int k = 2; k <= 6; ++k) {
        auto d = from_braid(delta_sigma3(k));
        int last = d.crossing_count() - 1;
        auto d0 = khovanov_resolution(d, last, 0);
        CHECK(d0.crossing_count() == 11 + k);
        CHECK(d0.n_minus() == 6);
        auto d1 = khovanov_resolution(d, last, 1);
        auto prev = from_braid(delta_sigma3(k - 1));
        CHECK(d1.tiles() == prev.tiles());
        CHECK(d1.n_minus() == k - 1);
    }
    auto s1 = from_braid(BraidWord(2, {{1, 1}}));
    auto r0 = khovanov_resolution(s1, 0, 0);
    CHECK(r0.crossing_count() == 0);
    CHECK(r0.component_count() == 2);
    CHECK_THROWS(khovanov_resolution(s1, 1, 0));
}

TEST_CASE("orientation changes on crossingless diagrams leave signs empty") {
    TangleDiagram d(2, {capcup_tile(1), capcup_tile(1)});
    CHECK(d.crossing_signs().empty());
    d.set_component_orientation(0, -1);
    CHECK(d.crossing_signs().empty());
}

TEST_CASE("reversing one component flips its mixed crossings") {
    auto d = from_braid(parse_braid("1 1 2 2", 3));
    REQUIRE(d.component_count() == 3);
    auto before = d.crossing_signs();
    d.set_component_orientation(d.segment_component()[d.segment(0, 2)], -1);
    auto after = d.crossing_signs();
    CHECK(before == std::vector<int>{1, 1, 1, 1});
    CHECK(after == std::vector<int>{1, 1, -1, -1});
}

TEST_CASE("merge/split dichotomy and braid-closure circle counts") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int b = 2 + trial % 3;
        auto w = oracle::random_word(rng, b, 9, 1);
        auto d = from_braid(w);
        CHECK(d.component_count() == closure_components(w));
        CHECK(resolve(d, oriented_resolution_state(d)).circle_count == b);
        int n = d.crossing_count();
        std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
        auto s = state_of(n, bits(rng));
        auto cd = resolve(d, s);
        for (int c = 0; c < n; ++c) {
            if (s.bit(c)) continue;
            auto t = s;
            t.bits |= std::uint64_t{1} << c;
            int delta = resolve(d, t).circle_count - cd.circle_count;
            bool merge = cd.incident[c].first != cd.incident[c].second;
            CHECK(delta == (merge ? -1 : 1));
        }
    }
}

TEST_CASE("union-find result does not depend on union order") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 40;
        std::vector<std::pair<int, int>> edges;
        std::uniform_int_distribution<int> v(0, n - 1);
        for (int e = 0; e < 30; ++e) edges.emplace_back(v(rng), v(rng));
        Dsu a(n), b(n);
        for (auto [x, y] : edges) a.unite(x, y);
        std::shuffle(edges.begin(), edges.end(), rng);
        for (auto [x, y] : edges) b.unite(y, x);
        for (int x = 0; x < n; ++x) CHECK(a.find(x) == b.find(x));
    }
}
