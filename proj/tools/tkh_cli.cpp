#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tkh/report.hpp"

using namespace tkh;
using nlohmann::json;

namespace {

constexpr int kUndecided = 2;

struct Common {
    int strands = 0;
    std::string word;
    std::vector<std::string> rings;
    std::vector<std::string> orient;
    std::string cache_dir;
    std::size_t max_dim = kDefaultMaxDim;
    std::string method = "auto";
    bool json = false;
};

Engine engine_of(const Common& c) {
    if (c.method == "graded-piece") return Engine::Naive;
    if (c.method == "tangle") return Engine::Local;
    return Engine::Auto;
}

void add_common(CLI::App* app, Common& c, bool needs_word = true) {
    auto* s = app->add_option("--strands,-n", c.strands, "number of strands");
    auto* w = app->add_option("--word,-w", c.word, "braid word, e.g. \"FT (-2)^7\"");
    if (needs_word) {
        s->required();
        w->required();
    }
    app->add_option("--ring,-r", c.rings, "coefficient ring")->check(CLI::IsMember({"gf2", "q", "z"}));
    app->add_option("--orient", c.orient, "component:direction pairs, direction up or down");
    app->add_option("--cache-dir", c.cache_dir, "result cache directory (default $TKH_CACHE_DIR)");
    app->add_option("--max-dim", c.max_dim, "largest chain group dimension before giving up");
    app->add_option("--method", c.method, "homology engine")->check(CLI::IsMember({"auto", "graded-piece", "tangle"}));
    app->add_flag("--json", c.json, "print JSON");
}

BraidWord word_of(const Common& c) { return parse_braid(c.word, c.strands); }

std::vector<Ring> rings_of(const Common& c, Ring fallback) {
    if (c.rings.empty()) return {fallback};
    std::vector<Ring> out;
    for (const auto& r : c.rings) out.push_back(ring_from_tag(r));
    return out;
}

std::optional<std::filesystem::path> cache_of(const Common& c) {
    if (!c.cache_dir.empty()) return std::filesystem::path(c.cache_dir);
    return ResultCache::from_environment();
}

// Component orientation flags, +1 downward.
std::vector<int> orientation_of(const Common& c, const TangleDiagram& d) {
    std::vector<int> flags(static_cast<std::size_t>(d.component_count()), 1);
    for (const auto& pair : c.orient) {
        auto colon = pair.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("--orient expects component:direction, got " + pair);
        int comp = std::stoi(pair.substr(0, colon));
        std::string dir = pair.substr(colon + 1);
        if (comp < 0 || comp >= d.component_count()) throw std::invalid_argument("no component " + std::to_string(comp));
        if (dir != "up" && dir != "down" && dir != "+1" && dir != "-1" && dir != "1")
            throw std::invalid_argument("direction must be up or down, got " + dir);
        flags[static_cast<std::size_t>(comp)] = (dir == "up" || dir == "-1") ? -1 : 1;
    }
    return flags;
}

void require_braid_orientation(const Common& c, const BraidWord& w) {
    auto flags = orientation_of(c, from_braid(w));
    for (int f : flags)
        if (f != 1) throw std::invalid_argument("this invariant uses the braid orientation; drop --orient");
}

VerdictOptions verdict_options(const Common& c, int marked = 0) {
    VerdictOptions v;
    v.max_dim = c.max_dim;
    v.engine = engine_of(c);
    v.marked = marked;
    return v;
}

std::optional<Verdict> cached_verdict(const Common& c, const std::string& op, const BraidWord& w, Ring ring,
                                      int marked) {
    if (auto dir = cache_of(c)) return ResultCache(*dir).get_verdict(op, w, ring, marked);
    return std::nullopt;
}

void store_verdict(const Common& c, const std::string& op, const BraidWord& w, int marked, const Verdict& v) {
    if (!v.decided()) return;
    if (auto dir = cache_of(c)) ResultCache(*dir).put_verdict(op, w, marked, v);
}

void print_verdict(const Common& c, const BraidWord& w, const Verdict& v) {
    if (c.json) {
        std::cout << verdict_to_json(w, v) << "\n";
        return;
    }
    std::cout << (v.reduced ? "psi'" : "psi") << " over " << ring_tag(v.ring) << " at (" << v.grading.i << ", "
              << v.grading.j << "): " << verdict_tag(v.kind) << " [" << v.method << "]";
    if (!v.detail.empty()) std::cout << " " << v.detail;
    std::cout << "\n";
}

int run_psi(const Common& c) {
    auto w = word_of(c);
    require_braid_orientation(c, w);
    int code = 0;
    for (Ring ring : rings_of(c, Ring::GF2)) {
        auto v = cached_verdict(c, "psi", w, ring, -1);
        if (!v) {
            v = psi_vanishes(w, ring, verdict_options(c));
            store_verdict(c, "psi", w, -1, *v);
        }
        print_verdict(c, w, *v);
        if (!v->decided()) code = kUndecided;
    }
    return code;
}

int run_psi_prime(const Common& c, int marked) {
    auto w = word_of(c);
    require_braid_orientation(c, w);
    for (Ring ring : rings_of(c, Ring::GF2))
        if (ring != Ring::GF2) throw std::invalid_argument("reduced psi is defined over gf2");
    auto v = cached_verdict(c, "psiprime", w, Ring::GF2, marked);
    if (!v) {
        v = psi_prime_vanishes(w, verdict_options(c, marked));
        store_verdict(c, "psiprime", w, marked, *v);
    }
    print_verdict(c, w, *v);
    return v->decided() ? 0 : kUndecided;
}

int run_homfly(const Common& c) {
    auto w = word_of(c);
    require_braid_orientation(c, w);
    std::optional<ResultCache> cache;
    if (auto dir = cache_of(c)) cache.emplace(*dir);
    std::optional<LaurentPoly2> p;
    if (cache) p = cache->get_homfly(w);
    if (!p) {
        try {
            p = homfly(w);
        } catch (const ResourceLimit& e) {
            std::cerr << "undecided: " << e.what() << "\n";
            return kUndecided;
        }
        if (cache) cache->put_homfly(w, *p);
    }
    if (c.json) {
        json j;
        j["polynomial"] = json::parse(p->to_json());
        j["deg_a"] = a_degree(*p);
        j["msl_bound"] = msl_upper_bound(*p);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "P = " << p->str() << "\n"
                  << "deg_a = " << a_degree(*p) << "\n"
                  << "msl bound = " << msl_upper_bound(*p) << "\n";
    }
    return 0;
}

json mpq_json(const mpq_class& q) {
    if (q.get_den() == 1) return json(q.get_num().get_si());
    return json(q.get_str());
}

int run_fdtc(const Common& c, int k_max) {
    auto w = word_of(c);
    json j;
    try {
        j["sign"] = to_string(dehornoy_sign(w));
        j["floor"] = dehornoy_floor(w);
        auto b = fdtc_bounds(w);
        j["bounds"] = {{"lower", mpq_json(b.lower)}, {"upper", mpq_json(b.upper)}, {"provenance", b.str()}};
        auto p = fdtc_pattern(w);
        j["pattern"] = p ? mpq_json(*p) : json(nullptr);
        json seq = json::array();
        for (const auto& q : floor_sequence(w, k_max)) seq.push_back(mpq_json(q));
        j["floor_sequence"] = seq;
    } catch (const HandleReductionLimit& e) {
        std::cerr << "undecided: " << e.what() << "\n";
        return kUndecided;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_stability(const Common& c, int a, int index, int sign) {
    auto report = stability_threshold(word_of(c), a, index, sign);
    std::cout << (c.json ? report.to_json() : report.str()) << "\n";
    return 0;
}

int run_khovanov(const Common& c, int marked, int i_lo, int i_hi, int j_lo, int j_hi) {
    auto d = from_braid(word_of(c));
    d.set_orientation(orientation_of(c, d));
    HomologyOptions opt;
    auto rings = rings_of(c, Ring::Rational);
    opt.ring = rings.front();
    opt.marked = marked;
    opt.max_dim = c.max_dim;
    opt.engine = engine_of(c);
    if (i_lo <= i_hi && j_lo <= j_hi) opt.window = GradingBox{i_lo, i_hi, j_lo, j_hi};
    HomologyTable t;
    try {
        t = homology_table(d, opt);
    } catch (const ResourceLimit& e) {
        std::cerr << "undecided: " << e.what() << "\n";
        return kUndecided;
    }
    if (!c.json) {
        std::cout << t.str() << "\n";
        return 0;
    }
    json groups = json::array();
    for (const auto& [g, h] : t.groups) {
        json torsion = json::array();
        for (const auto& f : h.torsion) torsion.push_back(f.get_str());
        groups.push_back({{"i", g.i}, {"j", g.j}, {"rank", h.rank}, {"torsion", torsion}});
    }
    json j{{"ring", ring_tag(t.ring)}, {"reduced", t.reduced}, {"groups", groups}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_report(const Common& c, bool with_homfly, int marked) {
    auto w = word_of(c);
    require_braid_orientation(c, w);
    ReportOptions o;
    o.rings = rings_of(c, Ring::GF2);
    o.homfly = with_homfly;
    o.verdict = verdict_options(c, marked);
    o.cache_dir = cache_of(c);
    auto r = transverse_report(w, o);
    if (c.json) {
        std::cout << r.to_json() << "\n";
    } else {
        std::cout << "word: " << w.str() << " (" << w.strands << " strands)\n"
                  << "writhe " << r.writhe << ", self-linking " << r.self_linking << "\n";
        for (const auto& v : r.psi) print_verdict(c, w, v);
        if (r.psi_prime) print_verdict(c, w, *r.psi_prime);
        if (r.homfly) std::cout << "deg_a " << *r.deg_a << ", msl bound " << *r.msl_bound << "\n";
        if (r.whole_link) std::cout << r.whole_link->str() << "\n";
        if (r.fdtc) std::cout << "fdtc " << r.fdtc->str() << "\n";
        for (const auto& f : r.ledger) std::cout << f.rule << ": " << f.conclusion << " (" << f.citation << ")\n";
        std::cout << "quasipositive: " << r.quasipositive() << "\nright-veering: " << r.right_veering() << "\n";
        for (const auto& u : r.undecided) std::cout << "undecided: " << u << "\n";
    }
    return r.undecided.empty() ? 0 : kUndecided;
}

int run_family(const Common& c, const std::string& base, const std::string& insert, int k_min, int k_max,
               const std::vector<std::string>& engines, bool use_stability, int margin) {
    FamilyTemplate f{parse_braid(base, c.strands), parse_braid(insert, c.strands), k_min, k_max};
    SweepOptions o;
    o.engines.clear();
    for (const auto& e : engines) o.engines.push_back(sweep_engine_from_tag(e));
    if (o.engines.empty()) o.engines = {SweepEngine::PsiGF2};
    o.use_stability = use_stability;
    o.margin = margin;
    o.verdict = verdict_options(c);
    o.cache_dir = cache_of(c);
    auto t = family_sweep(f, o);
    std::cout << (c.json ? t.to_json() : t.str()) << "\n";
    for (const auto& cell : t.cells)
        for (const auto& v : cell.verdicts)
            if (v == verdict_tag(VerdictKind::UndecidedResource)) return kUndecided;
    return 0;
}

int run_fixtures(const Common& c) {
    auto results = verify_reference_fixtures();
    bool all = true;
    json j = json::array();
    for (const auto& r : results) {
        all = all && r.pass;
        j.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        if (!c.json) std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
    }
    if (c.json) std::cout << j.dump(2) << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transverse invariants of braid closures"};
    app.require_subcommand(1);

    Common psi_c, prime_c, homfly_c, fdtc_c, stab_c, kh_c, report_c, family_c, fix_c;
    int prime_marked = 0, report_marked = 0, kh_marked = -1;
    int k_max_fdtc = 8;
    int stab_a = 2, stab_index = 1, stab_sign = -1;
    std::vector<int> window;
    bool report_homfly = false;
    std::string fam_base, fam_insert;
    int fam_kmin = 0, fam_kmax = 0, fam_margin = 1;
    std::vector<std::string> fam_engines;
    bool fam_stable = false;

    auto* psi = app.add_subcommand("psi", "vanishing of the transverse element psi");
    add_common(psi, psi_c);

    auto* prime = app.add_subcommand("psiprime", "vanishing of the reduced transverse element psi'");
    add_common(prime, prime_c);
    prime->add_option("--marked", prime_marked, "strand position of the marked point");

    auto* hom = app.add_subcommand("homfly", "HOMFLY-PT polynomial and self-linking bound");
    add_common(hom, homfly_c);

    auto* fd = app.add_subcommand("fdtc", "Dehornoy order data and fractional Dehn twist coefficient bounds");
    add_common(fd, fdtc_c);
    fd->add_option("--kmax", k_max_fdtc, "length of the floor sequence")->check(CLI::PositiveNumber);

    auto* st = app.add_subcommand("stability", "threshold past which added sub-full twists keep psi constant");
    add_common(st, stab_c);
    st->add_option("--a", stab_a, "strands in the twist")->check(CLI::Range(2, 1 << 20));
    st->add_option("--index", stab_index, "first strand of the twist");
    st->add_option("--sign", stab_sign, "+1 or -1")->check(CLI::IsMember({-1, 1}));

    auto* kh = app.add_subcommand("khovanov", "Khovanov homology table of the closure");
    add_common(kh, kh_c);
    kh->add_option("--marked", kh_marked, "marked strand for reduced homology over gf2");
    kh->add_option("--window", window, "i_min i_max j_min j_max")->expected(4);

    auto* rep = app.add_subcommand("report", "obstruction report for quasipositivity and right-veering");
    add_common(rep, report_c);
    rep->add_flag("--homfly", report_homfly, "include the HOMFLY-PT bound and the whole-link test");
    rep->add_option("--marked", report_marked, "marked strand for psi'");

    auto* fam = app.add_subcommand("family", "sweep base * insert^k over a range of k");
    add_common(fam, family_c, false);
    fam->get_option("--strands")->required();
    fam->add_option("--base", fam_base, "base word")->required();
    fam->add_option("--insert", fam_insert, "repeated word")->required();
    fam->add_option("--kmin", fam_kmin)->required();
    fam->add_option("--kmax", fam_kmax)->required();
    fam->add_option("--engine", fam_engines, "psi-gf2, psi-q, psi-z or psiprime")
        ->check(CLI::IsMember({"psi-gf2", "psi-q", "psi-z", "psiprime"}));
    fam->add_flag("--use-stability", fam_stable, "copy verdicts past the stability threshold");
    fam->add_option("--margin", fam_margin, "members computed past the threshold")->check(CLI::PositiveNumber);

    auto* fix = app.add_subcommand("fixtures", "check the built-in reference values");
    add_common(fix, fix_c, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*psi) return run_psi(psi_c);
        if (*prime) return run_psi_prime(prime_c, prime_marked);
        if (*hom) return run_homfly(homfly_c);
        if (*fd) return run_fdtc(fdtc_c, k_max_fdtc);
        if (*st) return run_stability(stab_c, stab_a, stab_index, stab_sign);
        if (*kh) {
            if (window.empty()) window = {1, 0, 1, 0};
            return run_khovanov(kh_c, kh_marked, window[0], window[1], window[2], window[3]);
        }
        if (*rep) return run_report(report_c, report_homfly, report_marked);
        if (*fam)
            return run_family(family_c, fam_base, fam_insert, fam_kmin, fam_kmax, fam_engines, fam_stable, fam_margin);
        if (*fix) return run_fixtures(fix_c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
