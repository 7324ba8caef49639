#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "tkh/report.hpp"

using namespace tkh;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail << "failed: ";
        else detail << "; ";
        detail << what;
        pass = false;
    }
};

BraidWord twisted(int strands, int twists, const std::string& tail, int k) {
    return concat(power(full_twist(strands), twists), power(parse_braid(tail, strands), k));
}

BraidWord pretzel255() { return parse_braid("-1 -2 -2 -2 -2 -2 -1 -2 -2 -2 -2 -2", 3); }

std::string set_str(const std::set<int>& s) {
    std::string out = "{";
    for (int x : s) out += (out.size() > 1 ? ", " : "") + std::to_string(x);
    return out + "}";
}

void certificates(Outcome& o) {
    for (const auto& w : {parse_braid("1 2 2 1 -2 -2 -2", 3), parse_braid("1 2 3 3 2 1 -3 -3 -3", 4)}) {
        auto v = psi_vanishes(w, Ring::Integer);
        o.check(v.kind == VerdictKind::ZeroWithCertificate, w.str() + ": " + verdict_tag(v.kind));
        if (v.certificate) o.check(verify_certificate(w, *v.certificate), w.str() + ": certificate rejected");
    }
    int n = 0;
    for (const auto& [name, text] : certificate_fixtures()) {
        auto [w, phi] = certificate_from_json(text);
        o.check(verify_certificate(w, phi), name);
        ++n;
    }
    o.check(n == 3, "expected three fixtures");
    if (o.pass) o.detail << "2 searched certificates over Z, " << n << " fixture certificates verified";
}

void nonvanishing_family(Outcome& o) {
    for (int k = 0; k <= 8; ++k) {
        auto w = concat(twisted(3, 1, "1", 1), power(parse_braid("-2", 3), k));
        for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer}) {
            auto v = psi_vanishes(w, ring);
            o.check(v.kind == VerdictKind::NonzeroClass, "k=" + std::to_string(k) + " " + ring_tag(ring) + ": " + verdict_tag(v.kind));
        }
        auto p = psi_prime_vanishes(w);
        o.check(p.kind == VerdictKind::NonzeroClass, "k=" + std::to_string(k) + " psi': " + verdict_tag(p.kind));
    }
    if (o.pass) o.detail << "36 verdicts nonzero for k = 0..8";
}

void base_case(Outcome& o) {
    auto v = psi_prime_vanishes(twisted(4, 1, "-3", 9));
    o.check(v.kind == VerdictKind::NonzeroClass, verdict_tag(v.kind) + " " + v.detail);
    if (o.pass) o.detail << "psi' nonzero by " << v.method << " (" << v.detail << ")";
}

void resolved_diagram(Outcome& o) {
    for (int k = 2; k <= 3; ++k) {
        auto beta = from_braid(twisted(4, 1, "-3", k));
        auto d0 = khovanov_resolution(beta, beta.crossing_count() - 1, 0);
        HomologyOptions opt;
        opt.ring = Ring::GF2;
        opt.marked = 0;
        auto t = homology_table(d0, opt);
        o.check(t.str() == "(0,0):1 (0,2):1 (2,4):1 (2,6):1", "k=" + std::to_string(k) + ": " + t.str());
    }
    if (o.pass) o.detail << "GF2 at (0,0), (0,2), (2,4), (2,6) for k = 2, 3";
}

void les_window(Outcome& o) {
    for (int k = 9; k <= 14; ++k) {
        auto d = from_braid(twisted(4, 1, "-3", k));
        auto w = les_window_is_iso(d, d.crossing_count() - 1, 0, 9 - k);
        o.check(w.iso == (k >= 10), "k=" + std::to_string(k) + ": " + w.reason);
    }
    if (o.pass) o.detail << "iso for k = 10..14, not for k = 9";
}

void pretzel_polynomial(Outcome& o) {
    const char* expected =
        "10a^10 - 13a^12 + 4a^14 + 39a^10z^2 - 32a^12z^2 + 4a^14z^2 + 57a^10z^4 - 27a^12z^4 + a^14z^4 + "
        "36a^10z^6 - 9a^12z^6 + 10a^10z^8 - a^12z^8 + a^10z^10";
    auto p = homfly(pretzel255());
    o.check(p == LaurentPoly2::parse(expected), "P = " + p.str());
    o.check(p.terms().size() == 14, "term count");
    o.check(a_degree(p) == 14, "deg_a = " + std::to_string(a_degree(p)));
    o.check(msl_upper_bound(p) == -15, "msl bound = " + std::to_string(msl_upper_bound(p)));
    auto ob = whole_link_psi_obstruction(pretzel255(), p);
    o.check(ob.support == std::set<int>{-11, -9}, "support " + set_str(ob.support));
    o.check(ob.kind == ObstructionKind::AllRepresentativesVanish, ob.str());
    if (o.pass) o.detail << "14 terms, deg_a 14, bound -15, " << ob.str();
}

void torus_links(Outcome& o) {
    for (int q = 2; q <= 9; ++q) {
        auto t = torus_homfly(q);
        std::string tag = "q=" + std::to_string(q);
        o.check(t == homfly(power(parse_braid("-1", 2), q)), tag + ": closure differs");
        o.check(a_degree(t) == q + 1, tag + ": deg_a " + std::to_string(a_degree(t)));
        for (const auto& [e, c] : t.terms())
            if (e.first == q + 1) o.check(q % 2 ? c < 0 : c > 0, tag + ": top coefficient sign");
    }
    if (o.pass) o.detail << "q = 2..9";
}

void pretzel_support(Outcome& o) {
    HomologyOptions opt;
    opt.ring = Ring::Integer;
    opt.window = GradingBox{0, 0, -40, 40};
    auto t = homology_table(from_braid(pretzel255()), opt);
    auto support = t.support_j(0);
    o.check(support == std::set<int>{-11, -9}, "Kh^0 support " + set_str(support));
    o.check(support == pretzel_support_formula(2, 5).support, "formula mismatch");
    ReportOptions ro;
    ro.homfly = true;
    ro.psi_prime = false;
    auto r = transverse_report(pretzel255(), ro);
    o.check(r.concludes(kNoQuasipositiveRepresentative), "no R5 fact");
    o.check(ledger_sound(r), "ledger unsound");
    if (o.pass) o.detail << "Kh^0 over Z at j in " << set_str(support) << "; ledger: " << kNoQuasipositiveRepresentative;
}

void properties(Outcome& o) {
    int failures = 0;
    auto fail = [&](bool ok) { failures += !ok; };

    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 3, 12, 1);
        auto d = from_braid(w);
        int n = d.crossing_count();
        std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
        KauffmanState s{bits(rng), n};
        int m = circle_count(d, s);
        Generator g{s, Labeling{bits(rng) & ((std::uint64_t{1} << m) - 1), m}};
        auto gr = generator_grading(d, g);
        for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer}) {
            ChainElement x(d, ring);
            x.add(g, 1);
            auto dx = d_of(x);
            for (const auto& [t, c] : dx.generators()) fail(generator_grading(d, t) == Grading{gr.i + 1, gr.j});
            fail(d_of(dx).is_zero());
        }
    }
    o.check(failures == 0, "d^2 / grading: " + std::to_string(failures));

    failures = 0;
    rng.seed(555);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 4, 10);
        for (Ring ring : {Ring::GF2, Ring::Rational, Ring::Integer}) fail(is_cycle(psi_tilde(w, ring)));
        fail(is_cycle(psi_tilde_prime(w, 0)));
    }
    o.check(failures == 0, "psi cycles: " + std::to_string(failures));

    failures = 0;
    rng.seed(1001);
    for (int trial = 0; trial < 50; ++trial) {
        int b = 2 + trial % 2;
        auto w = oracle::random_word(rng, b, 8, 2);
        std::uniform_int_distribution<int> gi(1, b - 1);
        Letter g{gi(rng), trial % 2 ? 1 : -1};
        bool base = psi_vanishes(w, Ring::GF2).vanishes();
        fail(psi_vanishes(conjugate(w, g), Ring::GF2).vanishes() == base);
        fail(psi_vanishes(stabilize_pos(w), Ring::GF2).vanishes() == base);
    }
    o.check(failures == 0, "conjugation/stabilization: " + std::to_string(failures));

    failures = 0;
    rng.seed(606);
    int checked = 0;
    for (int trial = 0; checked < 50 && trial < 2000; ++trial) {
        auto w = oracle::random_word(rng, 3, 9, 3);
        if (!psi_vanishes(w, Ring::GF2).vanishes()) continue;
        std::vector<std::size_t> pos;
        for (std::size_t k = 0; k < w.letters.size(); ++k)
            if (w.letters[k].sign > 0) pos.push_back(k);
        if (pos.empty()) continue;
        auto smaller = w;
        smaller.letters.erase(smaller.letters.begin() + static_cast<long>(pos[static_cast<std::size_t>(trial) % pos.size()]));
        fail(psi_vanishes(smaller, Ring::GF2).vanishes());
        ++checked;
    }
    o.check(failures == 0 && checked == 50, "positive-letter deletion: " + std::to_string(failures) + " of " + std::to_string(checked));

    failures = 0;
    rng.seed(4040);
    for (int trial = 0; trial < 20; ++trial) {
        int b = 3 + trial % 2;
        auto w = oracle::random_word(rng, b, 9, 2);
        VerdictOptions vo;
        bool base = psi_prime_vanishes(w, vo).vanishes();
        for (vo.marked = 1; vo.marked < b; ++vo.marked) fail(psi_prime_vanishes(w, vo).vanishes() == base);
    }
    o.check(failures == 0, "marked point: " + std::to_string(failures));

    failures = 0;
    rng.seed(9001);
    for (int trial = 0; trial < 50; ++trial) {
        int b = 2 + trial % 3;
        auto w = oracle::random_word(rng, b, 9);
        auto p = homfly(w);
        std::uniform_int_distribution<int> gi(1, b - 1);
        Letter g{gi(rng), trial % 2 ? 1 : -1};
        fail(homfly(conjugate(w, g)) == p);
        fail(homfly(stabilize_pos(w)) == p);
        fail(homfly(stabilize_neg(w)) == p);
    }
    o.check(failures == 0, "Markov moves: " + std::to_string(failures));
    if (o.pass) o.detail << "all six suites clean";
}

void stability(Outcome& o) {
    auto s = stability_threshold(full_twist(4), 2, 2, -1);
    o.check(s.threshold == 6, "N = " + std::to_string(s.threshold));
    std::vector<std::string> tags;
    for (int m = 7; m <= 9; ++m) {
        auto v = psi_vanishes(stability_member(full_twist(4), 2, 2, -1, m), Ring::GF2);
        o.check(v.decided(), "m=" + std::to_string(m) + " undecided");
        tags.push_back(v.vanishes() ? "zero" : "nonzero");
    }
    o.check(tags[0] == tags[1] && tags[1] == tags[2], "verdicts differ");
    if (o.pass) o.detail << "N = 6; psi " << tags[0] << " for m = 7, 8, 9";
}

void fdtc(Outcome& o) {
    for (int k = 1; k <= 8; ++k)
        for (const char* tail : {"2", "3", "2 3"}) {
            auto w = twisted(4, 1, tail, -k);
            auto p = fdtc_pattern(w);
            o.check(p && *p == 1, std::string("pattern for (") + tail + ")^-k, k=" + std::to_string(k));
        }
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = oracle::random_word(rng, 2, 12);
        w.strands = 3;
        auto b = fdtc_letter_bounds(w);
        o.check(b.lower == 0 && b.upper == 0, "sigma_2-free " + w.str() + ": " + b.str());
    }
    rng.seed(31337);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto w = oracle::random_word(rng, 2 + trial % 4, 15);
        auto s = dehornoy_sign(w), t = dehornoy_sign(inverse(w));
        bad += static_cast<int>(s) != -static_cast<int>(t);
        bad += (s == DehornoySign::Trivial) != free_reduce(w).empty();
        int f = dehornoy_floor(w);
        auto shifted = [&](int m) { return dehornoy_sign(concat(power(full_twist(w.strands), -m), w)); };
        bad += shifted(f) == DehornoySign::Negative;
        bad += shifted(f + 1) != DehornoySign::Negative;
    }
    o.check(bad == 0, "trichotomy/monotonicity violations: " + std::to_string(bad));
    if (o.pass) o.detail << "24 patterns = 1, 50 sigma_2-free bounds [0, 0], 200 words ordered consistently";
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"certificate suite", certificates},
        {"psi nonzero on delta^2 sigma_1 sigma_2^-k", nonvanishing_family},
        {"psi' nonzero on delta^2 sigma_3^-9", base_case},
        {"reduced homology of D0^k", resolved_diagram},
        {"exact sequence window", les_window},
        {"HOMFLY-PT of P(2,-5,-5)", pretzel_polynomial},
        {"torus links T(2,-q)", torus_links},
        {"Kh^0 support of P(2,-5,-5)", pretzel_support},
        {"property suites", properties},
        {"twist stability", stability},
        {"fractional Dehn twist coefficient", fdtc},
    };
    int failed = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        Outcome o;
        auto start = std::chrono::steady_clock::now();
        try {
            criteria[n].second(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n + 1 << " " << criteria[n].first << " ("
                  << std::fixed << std::setprecision(1) << secs << " s): " << o.detail.str() << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria pass\n";
    return failed ? 1 : 0;
}
