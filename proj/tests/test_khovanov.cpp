#include "doctest.h"
#include "oracles.hpp"
#include "tkh/khovanov.hpp"
#include "tkh/tangle_complex.hpp"

using namespace tkh;

namespace {

TangleDiagram closure(const std::string& word, int strands) { return from_braid(parse_braid(word, strands)); }

std::map<int, long long> euler_characteristic(const HomologyTable& t) {
    std::map<int, long long> chi;
    for (const auto& [g, h] : t.groups) chi[g.j] += (g.i % 2 ? -1 : 1) * h.rank;
    for (auto it = chi.begin(); it != chi.end();) it = it->second == 0 ? chi.erase(it) : std::next(it);
    return chi;
}

HomologyTable table(const TangleDiagram& d, Ring ring, Engine e, int marked = -1) {
    HomologyOptions o;
    o.ring = ring;
    o.engine = e;
    o.marked = marked;
    return homology_table(d, o);
}

bool same_groups(const HomologyTable& a, const HomologyTable& b) {
    if (a.groups.size() != b.groups.size()) return false;
    for (const auto& [g, h] : a.groups) {
        auto it = b.groups.find(g);
        if (it == b.groups.end() || it->second.rank != h.rank || it->second.torsion != h.torsion) return false;
    }
    return true;
}

BraidWord delta_sigma1_sigma2(int k) {
    return concat(concat(full_twist(3), BraidWord(3, {{1, 1}})), power(BraidWord(3, {{2, 1}}), -k));
}

}  // namespace

TEST_CASE("graded bases") {
    auto unknot = from_braid(BraidWord(1, {}));
    auto b = graded_basis(unknot, 0, 1);
    REQUIRE(b.size() == 1);
    CHECK(b[0].labeling.str() == "+");
    auto s1 = closure("1", 2);
    CHECK(graded_basis(s1, 0, 1).size() == 2);
    CHECK(graded_basis(s1, 0, 3).size() == 1);
    CHECK(graded_basis(s1, 0, -1).size() == 1);
    CHECK(graded_basis(s1, 0, 0).empty());
    CHECK(graded_basis(s1, 0, 5).empty());
    // basis order: states ascending, then labelings
    auto m = closure("1 1 1", 2);
    auto basis = graded_basis(m, 1, 3);
    for (std::size_t k = 1; k < basis.size(); ++k)
        CHECK(std::make_pair(basis[k - 1].state.bits, basis[k - 1].labeling.plus) <
              std::make_pair(basis[k].state.bits, basis[k].labeling.plus));
    for (const auto& g : basis) CHECK(generator_grading(m, g) == Grading{1, 3});
}

TEST_CASE("the graded piece of delta^2 sigma_3^-9 at i=0 ranges over C(21,9) states") {
    auto d = from_braid(concat(full_twist(4), power(BraidWord(4, {{3, 1}}), -9)));
    CHECK(d.crossing_count() == 21);
    CHECK(d.n_minus() == 9);
    long long states = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << 21); ++s)
        if (__builtin_popcountll(s) == 9) ++states;
    CHECK(states == 293930);
    CHECK_THROWS_AS(graded_basis(d, 0, -1, 1000), ResourceLimit);
}

TEST_CASE("merge map on the closure of sigma_1") {
    auto d = closure("1", 2);
    auto src = graded_basis(d, 0, 1);
    auto tgt = graded_basis(d, 1, 1);
    REQUIRE(src.size() == 2);
    REQUIRE(tgt.size() == 1);
    CHECK(tgt[0].labeling.str() == "-");
    auto m = differential_matrix(d, 0, 1, Ring::Integer);
    CHECK(m.to_dense() == std::vector<std::vector<long long>>{{1, 1}});
    ChainElement pp(d, Ring::Integer);
    pp.add(graded_basis(d, 0, 3)[0], 1);
    CHECK_FALSE(is_cycle(pp));
    CHECK(d_of(pp).generators()[0].first.labeling.str() == "+");
    CHECK(is_cycle(ChainElement(d, Ring::Integer)));
}

TEST_CASE("homology examples") {
    auto unknot = table(from_braid(BraidWord(1, {})), Ring::Rational, Engine::Naive);
    CHECK(unknot.str() == "(0,-1):1 (0,1):1");
    auto hopf = table(closure("1 1", 2), Ring::Rational, Engine::Naive);
    CHECK(hopf.str() == "(0,0):1 (0,2):1 (2,4):1 (2,6):1");
    auto trefoil_z = table(closure("1 1 1", 2), Ring::Integer, Engine::Naive);
    CHECK(trefoil_z.str() == "(0,1):1 (0,3):1 (2,5):1 (3,7):0+Z/2 (3,9):1");
    auto pretzel = table(closure("-1 -2 -2 -2 -2 -2 -1 -2 -2 -2 -2 -2", 3), Ring::Integer, Engine::Auto);
    CHECK(pretzel.support_j(0) == std::set<int>{-11, -9});
    auto reduced_unknot = table(from_braid(BraidWord(1, {})), Ring::GF2, Engine::Naive, 0);
    CHECK(reduced_unknot.str() == "(0,0):1");
}

TEST_CASE("reduced homology of a knot has half the unreduced dimension over GF2") {
    for (auto [w, b] : {std::pair{"1 1 1", 2}, {"1 -2 1 -2", 3}, {"1 1 1 1 1", 2}}) {
        auto d = closure(w, b);
        long full = 0, red = 0;
        for (const auto& [g, h] : table(d, Ring::GF2, Engine::Naive).groups) full += h.rank;
        for (const auto& [g, h] : table(d, Ring::GF2, Engine::Naive, 0).groups) red += h.rank;
        CHECK(full == 2 * red);
    }
}

TEST_CASE("reduced homology of the resolved diagram D0^k") {
    for (int k = 2; k <= 3; ++k) {
        auto beta = from_braid(concat(full_twist(4), power(BraidWord(4, {{3, 1}}), -k)));
        auto d0 = khovanov_resolution(beta, beta.crossing_count() - 1, 0);
        CHECK(d0.n_minus() == 6);
        for (Engine e : {Engine::Naive, Engine::Local})
            CHECK(table(d0, Ring::GF2, e, 0).str() == "(0,0):1 (0,2):1 (2,4):1 (2,6):1");
    }
}

TEST_CASE("d squared vanishes and gradings are preserved on random words") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        int b = 2 + trial % 3;
        auto w = oracle::random_word(rng, b, 12, 1);
        auto d = from_braid(w);
        int n = d.crossing_count();
        std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
        for (int sample = 0; sample < 4; ++sample) {
            KauffmanState s{bits(rng), n};
            int m = circle_count(d, s);
            Generator g{s, Labeling{bits(rng) & ((std::uint64_t{1} << m) - 1), m}};
            for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer}) {
                ChainElement x(d, ring);
                x.add(g, 1);
                auto dx = d_of(x);
                for (const auto& [t, c] : dx.generators()) CHECK(generator_grading(d, t) == Grading{generator_grading(d, g).i + 1, generator_grading(d, g).j});
                CHECK(d_of(dx).is_zero());
            }
        }
    }
}

TEST_CASE("differential matrices compose to zero in every graded piece") {
    auto d = closure("1 1 1", 2);
    for (int i = 0; i <= 2; ++i)
        for (int j = 1; j <= 9; j += 2) {
            auto a = differential_matrix(d, i, j, Ring::Integer).to_dense();
            auto b = differential_matrix(d, i + 1, j, Ring::Integer).to_dense();
            if (a.empty() || b.empty() || b[0].empty()) continue;
            for (std::size_t r = 0; r < b.size(); ++r)
                for (std::size_t c = 0; c < a[0].size(); ++c) {
                    long long s = 0;
                    for (std::size_t k = 0; k < a.size(); ++k) s += b[r][k] * a[k][c];
                    CHECK(s == 0);
                }
        }
}

TEST_CASE("Euler characteristic equals the Jones polynomial oracle") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 40; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 3, 9, 1);
        auto d = from_braid(w);
        CHECK(euler_characteristic(table(d, Ring::Rational, Engine::Naive)) == oracle::jones_unnormalized(w));
    }
}

TEST_CASE("tangle reduction agrees with graded-piece homology") {
    std::mt19937_64 rng(4711);
    for (int trial = 0; trial < 60; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 4, 10, 1);
        auto d = from_braid(w);
        for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer}) {
            auto a = table(d, ring, Engine::Naive);
            auto b = table(d, ring, Engine::Local);
            CHECK_MESSAGE(same_groups(a, b), w.str() << " " << ring_tag(ring) << ": " << a.str() << " vs " << b.str());
        }
        auto ra = table(d, Ring::GF2, Engine::Naive, 0);
        auto rb = table(d, Ring::GF2, Engine::Local, 0);
        CHECK_MESSAGE(same_groups(ra, rb), w.str() << " reduced: " << ra.str() << " vs " << rb.str());
    }
}

TEST_CASE("tangle reduction handles cap-cup tiles") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        int b = 3 + trial % 2;
        auto w = oracle::random_word(rng, b, 8, 2);
        auto d = from_braid(w);
        auto resolved = khovanov_resolution(d, trial % d.crossing_count(), trial % 2);
        CHECK(same_groups(table(resolved, Ring::Integer, Engine::Naive), table(resolved, Ring::Integer, Engine::Local)));
    }
}

TEST_CASE("psi tilde") {
    auto u = psi_tilde(BraidWord(1, {}), Ring::Integer);
    CHECK(u.grading() == Grading{0, -1});
    CHECK(u.generators()[0].first.labeling.str() == "-");
    auto a5 = concat(full_twist(3), power(BraidWord(3, {{2, 1}}), -5));
    CHECK(psi_tilde(a5, Ring::Integer).grading() == Grading{0, -2});
    auto pos = psi_tilde(parse_braid("1 2 1 2 2", 3), Ring::GF2);
    CHECK(pos.generators()[0].first.state.bits == 0);
    auto pp = psi_tilde_prime(parse_braid("1 2 -1", 3));
    CHECK(pp.grading() == Grading{0, self_linking(parse_braid("1 2 -1", 3)) + 1});
}

TEST_CASE("psi tilde and its reduced version are cycles") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = oracle::random_word(rng, 1 + (trial % 4) + 1, 10);
        for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer}) CHECK(is_cycle(psi_tilde(w, ring)));
        CHECK(is_cycle(psi_tilde_prime(w, 0)));
    }
}

TEST_CASE("psi vanishes with certificates for the two smallest table families") {
    auto a = parse_braid("1 2 2 1 -2 -2 -2", 3);
    auto b = parse_braid("1 2 3 3 2 1 -3 -3 -3", 4);
    for (const auto& w : {a, b}) {
        auto v = psi_vanishes(w, Ring::Integer);
        REQUIRE(v.kind == VerdictKind::ZeroWithCertificate);
        CHECK(verify_certificate(w, *v.certificate));
        // the integral certificate reduces to the other rings
        for (Ring ring : {Ring::GF2, Ring::Rational}) {
            ChainElement phi(v.certificate->diagram(), ring);
            for (const auto& [g, c] : v.certificate->generators()) phi.add(g, c);
            CHECK(verify_certificate(w, phi));
            CHECK(psi_vanishes(w, ring).vanishes());
        }
    }
}

TEST_CASE("psi is nonzero for delta^2 sigma_1 sigma_2^-k") {
    for (int k = 0; k <= 4; ++k) {
        auto w = delta_sigma1_sigma2(k);
        for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer})
            CHECK(psi_vanishes(w, ring).kind == VerdictKind::NonzeroClass);
        CHECK(psi_prime_vanishes(w).kind == VerdictKind::NonzeroClass);
    }
}

TEST_CASE("dotted certificates from the families with sub-twist tails") {
    struct Fixture {
        std::string word;
        int strands;
        std::vector<DottedTerm> terms;
    };
    std::vector<Fixture> fixtures = {
        {"1 1 -2 3 -2 -1 2 3 3 2 3", 4, {{{3, 5}, {}, 1}, {{2, 3}, {}, -1}, {{1, 3}, {}, -1}}},
        {"1 -2 3 -4 -2 -1 2 2 3 4 4 2 3", 5, {{{2, 4, 5}, {}, 1}, {{1, 2, 4}, {}, 1}}},
        {"4 1 2 4 -5 -4 3 5 -1 2 2 3", 6, {{{6, 9}, {}, 1}, {{8, 9}, {}, 1}}},
    };
    for (const auto& f : fixtures) {
        auto w = parse_braid(f.word, f.strands);
        for (Ring ring : {Ring::Integer, Ring::GF2}) {
            auto phi = certificate_from_dotted(w, ring, f.terms);
            CHECK_MESSAGE(verify_certificate(w, phi), f.word);
            auto back = certificate_from_json(certificate_to_json(w, phi));
            CHECK(back.first == w);
            CHECK(back.second == phi);
        }
        CHECK_FALSE(verify_certificate(w, ChainElement(from_braid(w), Ring::Integer)));
    }
}

TEST_CASE("the opposite relative sign fails integrally but agrees mod 2") {
    auto w = parse_braid("1 -2 3 -4 -2 -1 2 2 3 4 4 2 3", 5);
    std::vector<DottedTerm> terms = {{{2, 4, 5}, {}, 1}, {{1, 2, 4}, {}, -1}};
    CHECK_FALSE(verify_certificate(w, certificate_from_dotted(w, Ring::Integer, terms)));
    CHECK(verify_certificate(w, certificate_from_dotted(w, Ring::GF2, terms)));
}

TEST_CASE("verdicts of the two engines agree on random words") {
    std::mt19937_64 rng(8080);
    VerdictOptions naive, local;
    naive.engine = Engine::Naive;
    local.engine = Engine::Local;
    for (int trial = 0; trial < 60; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 3, 11, 1);
        for (Ring ring : {Ring::GF2, Ring::Integer}) {
            auto a = psi_vanishes(w, ring, naive), b = psi_vanishes(w, ring, local);
            CHECK_MESSAGE(a.vanishes() == b.vanishes(), w.str());
        }
        CHECK_MESSAGE(psi_prime_vanishes(w, naive).vanishes() == psi_prime_vanishes(w, local).vanishes(), w.str());
    }
}

TEST_CASE("verdicts are invariant under conjugation and positive stabilization") {
    std::mt19937_64 rng(1001);
    int zeros = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int b = 2 + trial % 2;
        auto w = oracle::random_word(rng, b, 8, 2);
        std::uniform_int_distribution<int> gi(1, b - 1);
        Letter g{gi(rng), trial % 2 ? 1 : -1};
        bool base = psi_vanishes(w, Ring::GF2).vanishes();
        zeros += base;
        CHECK(psi_vanishes(conjugate(w, g), Ring::GF2).vanishes() == base);
        CHECK(psi_vanishes(stabilize_pos(w), Ring::GF2).vanishes() == base);
    }
    CHECK(zeros > 0);
}

TEST_CASE("deleting a positive letter preserves vanishing") {
    std::mt19937_64 rng(606);
    int checked = 0;
    for (int trial = 0; checked < 50 && trial < 2000; ++trial) {
        auto w = oracle::random_word(rng, 3, 9, 3);
        if (!psi_vanishes(w, Ring::GF2).vanishes()) continue;
        std::vector<std::size_t> pos;
        for (std::size_t k = 0; k < w.letters.size(); ++k)
            if (w.letters[k].sign > 0) pos.push_back(k);
        if (pos.empty()) continue;
        auto smaller = w;
        smaller.letters.erase(smaller.letters.begin() + static_cast<long>(pos[trial % pos.size()]));
        CHECK_MESSAGE(psi_vanishes(smaller, Ring::GF2).vanishes(), w.str());
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("reduced verdict does not depend on the marked strand") {
    std::mt19937_64 rng(4040);
    for (int trial = 0; trial < 20; ++trial) {
        int b = 3 + trial % 2;
        auto w = oracle::random_word(rng, b, 9, 2);
        VerdictOptions o;
        o.marked = 0;
        bool base = psi_prime_vanishes(w, o).vanishes();
        for (int m = 1; m < b; ++m) {
            o.marked = m;
            CHECK(psi_prime_vanishes(w, o).vanishes() == base);
        }
    }
}

TEST_CASE("certificate search near the oriented state") {
    auto w = parse_braid("1 2 2 1 -2 -2 -2", 3);
    auto phi = search_certificate(w, Ring::Integer, -1, 5);
    REQUIRE(phi);
    CHECK(verify_certificate(w, *phi));
    CHECK_FALSE(search_certificate(delta_sigma1_sigma2(2), Ring::GF2, -1, 3));
}

TEST_CASE("verify_certificate rejects wrong gradings") {
    auto w = parse_braid("1 2 2 1 -2 -2 -2", 3);
    auto psi = psi_tilde(w, Ring::Integer);
    CHECK_THROWS_AS(verify_certificate(w, psi), std::invalid_argument);
}
