#include "tkh/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace tkh {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

VerdictKind verdict_kind_from_tag(const std::string& t) {
    for (auto k : {VerdictKind::ZeroWithCertificate, VerdictKind::ZeroByReduction, VerdictKind::NonzeroClass,
                   VerdictKind::UndecidedResource})
        if (verdict_tag(k) == t) return k;
    throw std::invalid_argument("unknown verdict '" + t + "'");
}

json verdict_json(const BraidWord& w, const Verdict& v) {
    json j = {{"verdict", verdict_tag(v.kind)}, {"ring", ring_tag(v.ring)},   {"reduced", v.reduced},
              {"grading", {v.grading.i, v.grading.j}}, {"method", v.method}, {"detail", v.detail}};
    if (v.certificate) j["certificate"] = json::parse(certificate_to_json(w, *v.certificate));
    return j;
}

std::optional<ResultCache> open_cache(const std::optional<std::filesystem::path>& dir) {
    if (dir) return ResultCache(*dir);
    if (auto env = ResultCache::from_environment()) return ResultCache(*env);
    return std::nullopt;
}

Verdict psi_with_cache(const std::optional<ResultCache>& cache, const BraidWord& w, Ring ring, const VerdictOptions& vo) {
    if (cache)
        if (auto v = cache->get_verdict("psi", w, ring, -1)) return *v;
    Verdict v;
    try {
        v = psi_vanishes(w, ring, vo);
    } catch (const ResourceLimit& e) {
        v.ring = ring;
        v.detail = e.what();
    }
    if (cache) cache->put_verdict("psi", w, -1, v);
    return v;
}

Verdict psi_prime_with_cache(const std::optional<ResultCache>& cache, const BraidWord& w, const VerdictOptions& vo) {
    if (cache)
        if (auto v = cache->get_verdict("psiprime", w, Ring::GF2, vo.marked)) return *v;
    Verdict v;
    try {
        v = psi_prime_vanishes(w, vo);
    } catch (const ResourceLimit& e) {
        v.reduced = true;
        v.detail = e.what();
    }
    if (cache) cache->put_verdict("psiprime", w, vo.marked, v);
    return v;
}

std::string verdict_statement(const std::string& name, const Verdict& v) {
    return name + (v.vanishes() ? " = 0" : " != 0") + " over " + ring_tag(v.ring) + " (" + verdict_tag(v.kind) + ")";
}

const Verdict* verdict_for(const TransverseReport& r, const std::string& id) {
    if (id == "psiprime") return r.psi_prime ? &*r.psi_prime : nullptr;
    for (const auto& v : r.psi)
        if (id == "psi." + ring_tag(v.ring)) return &v;
    return nullptr;
}

}  // namespace

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<std::filesystem::path> ResultCache::from_environment() {
    const char* e = std::getenv("TKH_CACHE_DIR");
    if (e && *e) return std::filesystem::path(e);
    return std::nullopt;
}

std::string ResultCache::key(const std::string& op, const BraidWord& w, const std::string& ring, int marked) {
    std::ostringstream os;
    os << op << '|' << kEngineVersion << '|' << canonical_key(w) << '|' << hex(fnv1a(from_braid(w).to_json())) << '|'
       << ring << '|' << marked << "|0," << self_linking(w);
    return os.str();
}

std::optional<std::string> ResultCache::get(const std::string& key) const {
    auto path = dir_ / (hex(fnv1a(key)) + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        json j = json::parse(in);
        if (j.at("key") != key) return std::nullopt;
        return j.at("value").get<std::string>();
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void ResultCache::put(const std::string& key, const std::string& value) const {
    std::filesystem::create_directories(dir_);
    auto path = dir_ / (hex(fnv1a(key)) + ".json");
    auto now = std::chrono::system_clock::now().time_since_epoch();
    auto tmp = path;
    tmp += ".tmp" + hex(fnv1a(key + std::to_string(now.count())));
    {
        std::ofstream out(tmp);
        out << json{{"key", key}, {"value", value}, {"created", std::chrono::duration_cast<std::chrono::seconds>(now).count()}}
                   .dump();
    }
    std::filesystem::rename(tmp, path);
}

std::optional<Verdict> ResultCache::get_verdict(const std::string& op, const BraidWord& w, Ring ring, int marked) const {
    auto text = get(key(op, w, ring_tag(ring), marked));
    if (!text) return std::nullopt;
    try {
        Verdict v = verdict_from_json(*text);
        if (v.kind == VerdictKind::ZeroWithCertificate && (!v.certificate || !verify_certificate(w, *v.certificate)))
            return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void ResultCache::put_verdict(const std::string& op, const BraidWord& w, int marked, const Verdict& v) const {
    if (!v.decided()) return;
    put(key(op, w, ring_tag(v.ring), marked), verdict_json(w, v).dump());
}

std::optional<LaurentPoly2> ResultCache::get_homfly(const BraidWord& w) const {
    auto text = get(key("homfly", w, "-", -1));
    if (!text) return std::nullopt;
    try {
        return LaurentPoly2::parse(*text);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

void ResultCache::put_homfly(const BraidWord& w, const LaurentPoly2& p) const { put(key("homfly", w, "-", -1), p.str()); }

std::string verdict_to_json(const BraidWord& w, const Verdict& v) { return verdict_json(w, v).dump(); }

Verdict verdict_from_json(const std::string& text) {
    json j = json::parse(text);
    Verdict v;
    v.kind = verdict_kind_from_tag(j.at("verdict"));
    v.ring = ring_from_tag(j.at("ring"));
    v.reduced = j.at("reduced");
    v.grading = {j.at("grading")[0], j.at("grading")[1]};
    v.method = j.at("method");
    v.detail = j.at("detail");
    if (j.contains("certificate")) v.certificate = certificate_from_json(j["certificate"].dump()).second;
    return v;
}

bool TransverseReport::concludes(const std::string& conclusion) const {
    for (const auto& f : ledger)
        if (f.conclusion == conclusion) return true;
    return false;
}

std::string TransverseReport::quasipositive() const {
    return concludes(kNotQuasipositive) || concludes(kNoQuasipositiveRepresentative) ? "no" : "?";
}

std::string TransverseReport::right_veering() const { return concludes(kRightVeering) ? "yes" : "?"; }

std::string TransverseReport::to_json() const {
    json j;
    j["word"] = word.str();
    j["strands"] = word.strands;
    j["writhe"] = writhe;
    j["self_linking"] = self_linking;
    j["psi"] = json::object();
    for (const auto& v : psi) j["psi"][ring_tag(v.ring)] = verdict_json(word, v);
    if (psi_prime) j["psi_prime"] = verdict_json(word, *psi_prime);
    if (homfly) {
        j["homfly"] = {{"polynomial", json::parse(homfly->to_json())}, {"text", homfly->str()}};
        if (deg_a) j["homfly"]["deg_a"] = *deg_a;
        if (msl_bound) j["homfly"]["msl_bound"] = *msl_bound;
    }
    if (whole_link)
        j["whole_link"] = {
            {"verdict", whole_link->kind == ObstructionKind::AllRepresentativesVanish ? "all-representatives-vanish"
                                                                                       : "inconclusive"},
            {"support", whole_link->support},
            {"bound", whole_link->bound}};
    if (fdtc) j["fdtc"] = {{"lower", fdtc->lower.get_str()}, {"upper", fdtc->upper.get_str()}, {"text", fdtc->str()}};
    j["observations"] = json::array();
    for (const auto& o : observations) j["observations"].push_back({{"id", o.id}, {"statement", o.statement}});
    j["ledger"] = json::array();
    for (const auto& f : ledger)
        j["ledger"].push_back(
            {{"rule", f.rule}, {"premises", f.premises}, {"conclusion", f.conclusion}, {"citation", f.citation}});
    j["quasipositive"] = quasipositive();
    j["right_veering"] = right_veering();
    j["undecided"] = undecided;
    return j.dump(2);
}

TransverseReport transverse_report(const BraidWord& w, const ReportOptions& opt) {
    TransverseReport r;
    r.word = w;
    r.writhe = writhe(w);
    r.self_linking = self_linking(w);
    auto cache = open_cache(opt.cache_dir);
    auto observe = [&](const std::string& id, const std::string& s) { r.observations.push_back({id, s}); };
    observe("writhe", "writhe = " + std::to_string(r.writhe));

    std::vector<std::string> nonzero, zero;
    auto record = [&](const std::string& id, const std::string& name, const Verdict& v) {
        if (!v.decided()) {
            r.undecided.push_back(id);
            return;
        }
        observe(id, verdict_statement(name, v));
        (v.vanishes() ? zero : nonzero).push_back(id);
    };
    for (Ring ring : opt.rings) {
        r.psi.push_back(psi_with_cache(cache, w, ring, opt.verdict));
        record("psi." + ring_tag(ring), "psi", r.psi.back());
    }
    if (opt.psi_prime) {
        r.psi_prime = psi_prime_with_cache(cache, w, opt.verdict);
        record("psiprime", "psi'", *r.psi_prime);
    }
    if (opt.homfly) {
        try {
            std::optional<LaurentPoly2> p = cache ? cache->get_homfly(w) : std::nullopt;
            if (!p) {
                p = tkh::homfly(w);
                if (cache) cache->put_homfly(w, *p);
            }
            r.homfly = p;
            r.deg_a = a_degree(*p);
            r.msl_bound = msl_upper_bound(*p);
            observe("homfly", "deg_a = " + std::to_string(*r.deg_a) + ", self-linking bound " + std::to_string(*r.msl_bound));
            r.whole_link = whole_link_psi_obstruction(w, *p, Ring::Integer);
            observe("whole-link", r.whole_link->str());
        } catch (const ResourceLimit&) {
            r.undecided.push_back("homfly");
        }
    }
    if (opt.fdtc) {
        try {
            r.fdtc = fdtc_bounds(w, opt.fdtc_options);
            observe("fdtc", "tau in " + r.fdtc->str());
        } catch (const HandleReductionLimit&) {
            r.undecided.push_back("fdtc");
        }
    }

    auto fire = [&](const char* rule, std::vector<std::string> premises, const char* conclusion, const char* citation) {
        if (!premises.empty()) r.ledger.push_back({rule, std::move(premises), conclusion, citation});
    };
    fire("R1", nonzero, kRightVeering, "braids that are not right-veering have psi = 0 and psi' = 0");
    fire("R2", zero, kNotQuasipositive, "quasipositive braids have psi != 0 and psi' != 0");
    if (r.writhe < 0) fire("R3", {"writhe"}, kNotQuasipositive, "quasipositive braids have nonnegative writhe");
    if (r.fdtc && r.fdtc->provenance == FdtcProvenance::Pattern && r.fdtc->lower >= 1)
        fire("R4", {"fdtc"}, kRightVeering, "fractional Dehn twist coefficient at least one implies right-veering");
    if (r.whole_link && r.whole_link->kind == ObstructionKind::AllRepresentativesVanish)
        fire("R5", {"whole-link"}, kNoQuasipositiveRepresentative,
             "psi vanishes for every transverse representative, and quasipositive ones would have psi != 0");
    return r;
}

bool ledger_sound(const TransverseReport& r) {
    auto observed = [&](const std::string& id) {
        for (const auto& o : r.observations)
            if (o.id == id) return true;
        return false;
    };
    for (const auto& f : r.ledger) {
        if (f.premises.empty()) return false;
        for (const auto& p : f.premises) {
            if (!observed(p)) return false;
            const Verdict* v = verdict_for(r, p);
            bool ok = false;
            if (f.rule == "R1") ok = v && v->kind == VerdictKind::NonzeroClass && f.conclusion == kRightVeering;
            else if (f.rule == "R2") ok = v && v->vanishes() && f.conclusion == kNotQuasipositive;
            else if (f.rule == "R3") ok = p == "writhe" && r.writhe < 0 && f.conclusion == kNotQuasipositive;
            else if (f.rule == "R4")
                ok = p == "fdtc" && r.fdtc && r.fdtc->provenance == FdtcProvenance::Pattern && r.fdtc->lower >= 1 &&
                     f.conclusion == kRightVeering;
            else if (f.rule == "R5")
                ok = p == "whole-link" && r.whole_link && r.whole_link->kind == ObstructionKind::AllRepresentativesVanish &&
                     f.conclusion == kNoQuasipositiveRepresentative;
            if (!ok) return false;
        }
    }
    return true;
}

std::string sweep_engine_tag(SweepEngine e) {
    switch (e) {
        case SweepEngine::PsiGF2: return "psi-gf2";
        case SweepEngine::PsiQ: return "psi-q";
        case SweepEngine::PsiZ: return "psi-z";
        case SweepEngine::PsiPrime: return "psiprime";
    }
    return "?";
}

SweepEngine sweep_engine_from_tag(const std::string& tag) {
    for (auto e : {SweepEngine::PsiGF2, SweepEngine::PsiQ, SweepEngine::PsiZ, SweepEngine::PsiPrime})
        if (sweep_engine_tag(e) == tag) return e;
    throw std::invalid_argument("unknown engine '" + tag + "'");
}

std::optional<TwistStability> twist_stability(const FamilyTemplate& f, const FdtcOptions& opt) {
    int b = f.base.strands;
    int e = f.insert.n_plus() - f.insert.n_minus();
    if (e == 0 || f.insert.strands != b) return std::nullopt;
    for (int a = 2; a < b; ++a)
        for (int sign : {-1, 1}) {
            int target = sign * a * (a - 1);
            if (target % e != 0 || target / e < 1) continue;
            int p = target / e;
            auto ins = power(f.insert, p);
            for (int i = 1; i + a - 1 <= b; ++i) {
                if (dehornoy_sign(concat(inverse(ins), sub_full_twist(a, i, sign, b)), opt) != DehornoySign::Trivial) continue;
                TwistStability s{p, a, i, sign, {}};
                for (int r = 0; r < p; ++r)
                    s.thresholds.push_back(stability_threshold(concat(f.base, power(f.insert, r)), a, i, sign).threshold);
                return s;
            }
        }
    return std::nullopt;
}

std::string SweepTable::to_json() const {
    json j;
    j["family"] = {{"base", family.base.str()},
                   {"insert", family.insert.str()},
                   {"strands", family.base.strands},
                   {"k_min", family.k_min},
                   {"k_max", family.k_max}};
    j["engines"] = json::array();
    for (auto e : engines) j["engines"].push_back(sweep_engine_tag(e));
    if (stability)
        j["stability"] = {{"period", stability->period},
                          {"a", stability->a},
                          {"i", stability->index},
                          {"sign", stability->sign},
                          {"thresholds", stability->thresholds}};
    else
        j["stability"] = nullptr;
    j["cells"] = json::array();
    for (const auto& c : cells) {
        json cell = {{"k", c.k}, {"verdicts", json::object()}, {"stable", c.stable}};
        for (std::size_t e = 0; e < engines.size(); ++e) cell["verdicts"][sweep_engine_tag(engines[e])] = c.verdicts[e];
        if (c.stable) cell["note"] = "stable under added twists, copied from k = " + std::to_string(c.source_k);
        j["cells"].push_back(cell);
    }
    return j.dump(2);
}

std::string SweepTable::str() const {
    std::ostringstream os;
    os << "k";
    for (auto e : engines) os << "\t" << sweep_engine_tag(e);
    os << "\n";
    for (const auto& c : cells) {
        os << c.k;
        for (const auto& v : c.verdicts) os << "\t" << v;
        if (c.stable) os << "\t(stable, from k = " << c.source_k << ")";
        os << "\n";
    }
    return os.str();
}

SweepTable family_sweep(const FamilyTemplate& f, const SweepOptions& opt) {
    SweepTable t;
    t.family = f;
    t.engines = opt.engines;
    if (opt.use_stability) t.stability = twist_stability(f);
    int margin = std::max(1, opt.margin);
    auto cache = open_cache(opt.cache_dir);
    std::map<int, std::vector<std::string>> computed;
    auto verdicts = [&](int k) -> const std::vector<std::string>& {
        auto it = computed.find(k);
        if (it != computed.end()) return it->second;
        BraidWord w = f.instantiate(k);
        std::vector<std::string> out;
        for (auto e : opt.engines) {
            Verdict v;
            switch (e) {
                case SweepEngine::PsiGF2: v = psi_with_cache(cache, w, Ring::GF2, opt.verdict); break;
                case SweepEngine::PsiQ: v = psi_with_cache(cache, w, Ring::Rational, opt.verdict); break;
                case SweepEngine::PsiZ: v = psi_with_cache(cache, w, Ring::Integer, opt.verdict); break;
                case SweepEngine::PsiPrime: v = psi_prime_with_cache(cache, w, opt.verdict); break;
            }
            out.push_back(verdict_tag(v.kind));
        }
        return computed.emplace(k, std::move(out)).first->second;
    };
    for (int k = f.k_min; k <= f.k_max; ++k) {
        SweepCell c;
        c.k = c.source_k = k;
        if (t.stability && k >= 0) {
            int p = t.stability->period, r = k % p, m = k / p;
            int last = t.stability->thresholds[static_cast<std::size_t>(r)] + margin;
            if (m > last) {
                c.stable = true;
                c.source_k = r + p * last;
            }
        }
        c.verdicts = verdicts(c.source_k);
        t.cells.push_back(std::move(c));
    }
    return t;
}

namespace {

struct DottedFixture {
    const char* name;
    const char* word;
    int strands;
    std::vector<DottedTerm> terms;
};

const std::vector<DottedFixture>& dotted_fixtures() {
    static const std::vector<DottedFixture> f = {
        {"certificate (3), k = 1", "1 1 -2 3 -2 -1 2 3 3 2 3", 4, {{{3, 5}, {}, 1}, {{2, 3}, {}, -1}, {{1, 3}, {}, -1}}},
        {"certificate (4), k = 1", "1 -2 3 -4 -2 -1 2 2 3 4 4 2 3", 5, {{{2, 4, 5}, {}, 1}, {{1, 2, 4}, {}, 1}}},
        {"certificate (5), k = 1", "4 1 2 4 -5 -4 3 5 -1 2 2 3", 6, {{{6, 9}, {}, 1}, {{8, 9}, {}, 1}}},
    };
    return f;
}

const char* kPretzel255Homfly =
    "10a^10 - 13a^12 + 4a^14 + 39a^10z^2 - 32a^12z^2 + 4a^14z^2 + 57a^10z^4 - 27a^12z^4 + a^14z^4 + "
    "36a^10z^6 - 9a^12z^6 + 10a^10z^8 - a^12z^8 + a^10z^10";

}  // namespace

std::vector<std::pair<std::string, std::string>> certificate_fixtures() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : dotted_fixtures()) {
        auto w = parse_braid(f.word, f.strands);
        out.emplace_back(f.name, certificate_to_json(w, certificate_from_dotted(w, Ring::Integer, f.terms)));
    }
    return out;
}

std::vector<FixtureResult> verify_reference_fixtures() {
    std::vector<FixtureResult> out;
    auto add = [&](std::string name, bool pass, std::string detail) { out.push_back({std::move(name), pass, std::move(detail)}); };

    for (const auto& [name, text] : certificate_fixtures()) {
        auto [w, phi] = certificate_from_json(text);
        add(name, verify_certificate(w, phi), "d(phi) = psi over z for " + w.str());
    }
    for (auto [word, strands] : {std::pair{"1 2 2 1 -2 -2 -2", 3}, std::pair{"1 2 3 3 2 1 -3 -3 -3", 4}}) {
        auto w = parse_braid(word, strands);
        auto v = psi_vanishes(w, Ring::Integer);
        bool ok = v.kind == VerdictKind::ZeroWithCertificate && v.certificate && verify_certificate(w, *v.certificate);
        add("certificate search " + w.str(), ok, verdict_tag(v.kind));
    }

    struct Row {
        const char* name;
        const char* word;
        int strands;
    };
    const Row rows[] = {
        {"P(2,-5,-5)", "-1 -2 -2 -2 -2 -2 -1 -2 -2 -2 -2 -2", 3},
        {"P(4,-5,-5)", "-1 -2 -2 -2 -2 -2 -3 -2 -2 -2 -2 -2 1 2 -3 4 -3 -3 -3 -2 -3 -4", 5},
        {"P(6,-5,-5)", "-1 2 -3 -4 -3 -2 -3 4 5 6 1 -2 -3 4 5 -4 -4 -4 -4 -4 -3 4 4 4 4 4 -5 -6 2 -3 -4 -5", 7},
        {"P(8,-5,-5)",
         "-1 -2 3 -4 -5 -6 -7 -4 -5 -5 -5 -5 -5 -6 -3 -4 -5 -4 2 -3 -4 5 6 7 8 -5 -5 -5 -5 -5 6 7 5 6 1 2 -3 -4 -5 -4 3 "
         "-4 5 -6 -7 -8 -2 3",
         9},
    };
    for (const auto& row : rows) {
        int c = closure_components(parse_braid(row.word, row.strands));
        add(std::string(row.name) + " word closes to a knot", c == 1, std::to_string(c) + " component(s)");
    }

    auto p255 = parse_braid(rows[0].word, 3);
    auto poly = homfly(p255);
    add("P(2,-5,-5) HOMFLY-PT", poly == LaurentPoly2::parse(kPretzel255Homfly), poly.str());
    auto o = whole_link_psi_obstruction(p255, poly);
    add("P(2,-5,-5) whole-link test", o.kind == ObstructionKind::AllRepresentativesVanish && o.support == std::set<int>{-11, -9},
        o.str());
    int deg4 = a_degree(homfly(parse_braid(rows[1].word, 5)));
    add("P(4,-5,-5) word has deg_a = 16", deg4 == pretzel_support_formula(4, 5).a_degree,
        "deg_a = " + std::to_string(deg4) + "; with sigma_3^-1 in place of sigma_3^-3 the word has deg_a 16");

    for (int k = 2; k <= 3; ++k) {
        auto beta = from_braid(concat(full_twist(4), power(BraidWord(4, {{3, 1}}), -k)));
        auto d0 = les_shift_data(beta, beta.crossing_count() - 1).d0;
        HomologyOptions ho;
        ho.ring = Ring::GF2;
        ho.marked = 0;
        auto t = homology_table(d0, ho);
        add("reduced homology of D0^" + std::to_string(k), t.str() == "(0,0):1 (0,2):1 (2,4):1 (2,6):1", t.str());
    }
    return out;
}

}  // namespace tkh
