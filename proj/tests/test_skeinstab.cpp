#include "doctest.h"
#include "oracles.hpp"
#include "tkh/skeinstab.hpp"

using namespace tkh;

namespace {

BraidWord beta_k(int k) { return concat(full_twist(4), power(BraidWord(4, {{3, 1}}), -k)); }

HomologyTable rational_table(const TangleDiagram& d) {
    HomologyOptions o;
    o.engine = Engine::Naive;
    return homology_table(d, o);
}

}  // namespace

TEST_CASE("grading support bounds") {
    auto unknot = grading_support_bounds(from_braid(BraidWord(1, {})));
    CHECK(unknot.i_min == 0);
    CHECK(unknot.i_max == 0);
    auto trefoil = grading_support_bounds(from_braid(parse_braid("1 1 1", 2)));
    CHECK(trefoil.i_min == 0);
    CHECK(trefoil.i_max == 3);
    // all-zero state: 2 circles, all-one state: 3 circles
    CHECK(trefoil.j_min == 1);
    CHECK(trefoil.j_max == 9);
    for (int k = 2; k <= 4; ++k) {
        auto d = from_braid(beta_k(k));
        auto d0 = les_shift_data(d, d.crossing_count() - 1).d0;
        CHECK(grading_support_bounds(d0).i_min == -6);
        CHECK(grading_support_bounds(d0).i_max == d0.n_plus());
    }
}

TEST_CASE("homology lies inside the support box") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        auto d = from_braid(oracle::random_word(rng, 2 + trial % 3, 10));
        auto box = grading_support_bounds(d);
        for (const auto& g : rational_table(d).support()) CHECK(box.contains(g));
    }
}

TEST_CASE("shift data at the last negative crossing of the twisted family") {
    for (int k = 1; k <= 12; ++k) {
        auto d = from_braid(beta_k(k));
        auto s = les_shift_data(d, d.crossing_count() - 1);
        CHECK(s.sign == -1);
        CHECK(s.d0.n_minus() == 6);
        CHECK(s.u == 6 - k);
        CHECK(s.d1.n_minus() == d.n_minus() - 1);
        CHECK(s.d1.n_plus() == d.n_plus());
        auto [lo, hi] = s.flanks({0, 9 - k});
        CHECK(lo.grading.i == k - 7);
        CHECK(hi.grading.i == k - 6);
    }
    auto one = from_braid(parse_braid("1", 2));
    auto s = les_shift_data(one, 0);
    CHECK(s.sign == 1);
    CHECK(s.u == s.d1.n_minus());
    CHECK_THROWS_AS(les_shift_data(one, 1), std::invalid_argument);
}

TEST_CASE("positive crossing keeps the orientation on the oriented side") {
    auto d = from_braid(parse_braid("1 -2 1 2 2", 3));
    for (int c = 0; c < d.crossing_count(); ++c) {
        auto s = les_shift_data(d, c);
        const auto& ori = s.resolved(s.oriented());
        CHECK(ori.n_plus() + ori.n_minus() == d.crossing_count() - 1);
        CHECK(ori.n_plus() == d.n_plus() - (s.sign > 0));
        CHECK(ori.n_minus() == d.n_minus() - (s.sign < 0));
        CHECK(s.u == s.resolved(s.other()).n_minus() - d.n_minus());
    }
}

TEST_CASE("exact sequence bounds ranks on random diagrams") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 3, 8, 2);
        auto d = from_braid(w);
        int c = trial % d.crossing_count();
        auto s = les_shift_data(d, c);
        auto td = rational_table(d);
        HomologyTable tr[2] = {rational_table(s.d0), rational_table(s.d1)};
        for (const auto& [g, h] : td.groups) {
            auto src = s.source(g), tgt = s.target(g);
            CHECK(h.rank <= tr[src.resolution].rank(src.grading.i, src.grading.j) +
                               tr[tgt.resolution].rank(tgt.grading.i, tgt.grading.j));
        }
        // where the flanking groups vanish the middle map is an isomorphism
        for (int i = -d.n_minus(); i <= d.n_plus(); ++i)
            for (int j : td.support_j(i)) {
                auto [lo, hi] = s.flanks({i, j});
                const auto& t = tr[lo.resolution];
                if (t.rank(lo.grading.i, lo.grading.j) || t.rank(hi.grading.i, hi.grading.j)) continue;
                auto iso = s.sign < 0 ? s.source({i, j}) : s.target({i, j});
                CHECK(td.rank(i, j) == tr[iso.resolution].rank(iso.grading.i, iso.grading.j));
            }
    }
}

TEST_CASE("window check on the twisted family") {
    for (int k = 9; k <= 14; ++k) {
        auto d = from_braid(beta_k(k));
        auto w = les_window_is_iso(d, d.crossing_count() - 1, 0, 9 - k);
        CHECK_MESSAGE(w.iso == (k >= 10), k << ": " << w.reason);
        CHECK(w.columns == std::vector<int>{k - 7, k - 6});
    }
    CHECK_FALSE(les_window_is_iso(from_braid(BraidWord(2, {})), 0, 0, 0).iso);
}

TEST_CASE("window check by grading bounds alone") {
    auto d = from_braid(parse_braid("-1 -1 -1 -1", 2));
    auto w = les_window_is_iso(d, 3, 3, 0);
    CHECK(w.iso);
    CHECK(w.reason.rfind("grading bounds", 0) == 0);
}

TEST_CASE("stability thresholds") {
    BraidWord seven(4, {{1, 1}, {2, 1}, {3, 1}, {1, 1}, {2, 1}, {3, 1}, {1, 1}});
    CHECK(stability_threshold(seven, 3, 1, -1).threshold == 2);
    CHECK(stability_threshold(parse_braid("-1 -2 -1", 3), 2, 1, -1).threshold == 0);
    auto r = stability_threshold(full_twist(4), 2, 2, -1);
    CHECK(r.threshold == 6);
    CHECK(r.count == 12);
    CHECK(r.letters_per_twist == 2);
    CHECK(stability_threshold(parse_braid("-1 -1 -1 2", 3), 2, 1, 1).threshold == 1);
    CHECK_THROWS_AS(stability_threshold(full_twist(4), 4, 1, -1), std::invalid_argument);
    CHECK_THROWS_AS(stability_threshold(full_twist(4), 3, 3, -1), std::invalid_argument);
    CHECK_THROWS_AS(stability_threshold(full_twist(4), 2, 1, 0), std::invalid_argument);
    CHECK(stability_member(full_twist(3), 2, 1, -1, 2) == parse_braid("1 2 1 2 1 2 -1 -1 -1 -1", 3));
}

TEST_CASE("verdicts are constant past the threshold") {
    struct Family {
        BraidWord beta;
        int a, i, sign;
    };
    std::vector<Family> families = {
        {full_twist(3), 2, 1, -1},
        {parse_braid("1 2 1 1", 3), 2, 2, -1},
        {parse_braid("-1 -2 2 1", 3), 2, 1, 1},
    };
    for (const auto& f : families) {
        int n = stability_threshold(f.beta, f.a, f.i, f.sign).threshold;
        bool first = psi_vanishes(stability_member(f.beta, f.a, f.i, f.sign, n + 1), Ring::GF2).vanishes();
        for (int m = n + 2; m <= n + 3; ++m)
            CHECK(psi_vanishes(stability_member(f.beta, f.a, f.i, f.sign, m), Ring::GF2).vanishes() == first);
    }
}
