#include "tkh/tangle_complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace tkh {

namespace {

using Coeff = long long;
using Match = std::vector<std::uint8_t>;  // partner of each boundary point

Coeff add_c(Coeff a, Coeff b) {
    Coeff r;
    if (__builtin_add_overflow(a, b, &r)) throw ResourceLimit("coefficient overflow in tangle reduction");
    return r;
}

Coeff mul_c(Coeff a, Coeff b) {
    Coeff r;
    if (__builtin_mul_overflow(a, b, &r)) throw ResourceLimit("coefficient overflow in tangle reduction");
    return r;
}

// Sum of dotted-disk configurations, sorted by mask.
using Morph = std::vector<std::pair<std::uint32_t, Coeff>>;

void morph_add(Morph& m, std::uint32_t mask, Coeff c, bool mod2) {
    auto it = std::lower_bound(m.begin(), m.end(), mask, [](const auto& e, std::uint32_t k) { return e.first < k; });
    if (it != m.end() && it->first == mask) {
        it->second = add_c(it->second, c);
        if (mod2) it->second &= 1;
        if (it->second == 0) m.erase(it);
    } else {
        if (mod2) c &= 1;
        if (c != 0) m.insert(it, {mask, c});
    }
}

struct Cycles {
    int count = 0;
    std::vector<std::uint8_t> of_point;
    std::vector<std::uint8_t> min_point;  // per cycle
};

Cycles cycles_of(const Match& a, const Match& b) {
    Cycles c;
    std::size_t n = a.size();
    c.of_point.assign(n, 0xff);
    for (std::size_t p = 0; p < n; ++p) {
        if (c.of_point[p] != 0xff) continue;
        auto id = static_cast<std::uint8_t>(c.count++);
        c.min_point.push_back(static_cast<std::uint8_t>(p));
        std::size_t x = p;
        do {
            c.of_point[x] = id;
            std::size_t y = a[x];
            c.of_point[y] = id;
            x = b[y];
        } while (x != p);
    }
    return c;
}

// A surface assembled from disks and strips, reduced to dotted disks on its boundary circles.
class Surface {
public:
    int add_piece(int chi, int dots) {
        parent_.push_back(static_cast<int>(parent_.size()));
        chi_.push_back(chi);
        dots_.push_back(dots);
        return static_cast<int>(parent_.size()) - 1;
    }
    // glue along an interval of the boundary
    void glue(int a, int b) { join(a, b, -1); }
    // cap a boundary circle lying on piece a with a disk
    void cap(int a, bool dotted) { join(a, add_piece(1, dotted ? 1 : 0), 0); }

    // Output circle k lies on piece outputs[k]; result masks mark dotted outputs.
    std::vector<std::pair<std::uint32_t, Coeff>> evaluate(const std::vector<int>& outputs) {
        std::map<int, std::vector<int>> comp_outputs;
        for (std::size_t k = 0; k < outputs.size(); ++k) comp_outputs[find(outputs[k])].push_back(static_cast<int>(k));
        std::vector<std::pair<std::uint32_t, Coeff>> terms{{0u, 1}};
        Coeff factor = 1;
        for (std::size_t p = 0; p < parent_.size(); ++p) {
            if (find(static_cast<int>(p)) != static_cast<int>(p)) continue;
            auto it = comp_outputs.find(static_cast<int>(p));
            int k = it == comp_outputs.end() ? 0 : static_cast<int>(it->second.size());
            int twice_g = 2 - chi_[p] - k;
            if (twice_g < 0 || twice_g % 2) throw std::logic_error("inconsistent surface topology");
            int g = twice_g / 2;
            int e = dots_[p] + g;
            if (e >= 2) return {};
            if (k == 0) {
                if (e != 1) return {};
                factor = mul_c(factor, Coeff{1} << g);
                continue;
            }
            std::uint32_t all = 0;
            for (int o : it->second) all |= 1u << o;
            if (e == 1) {
                factor = mul_c(factor, Coeff{1} << g);
                for (auto& t : terms) t.first |= all;
            } else {
                std::vector<std::pair<std::uint32_t, Coeff>> next;
                next.reserve(terms.size() * static_cast<std::size_t>(k));
                for (const auto& t : terms)
                    for (int o : it->second) next.emplace_back(t.first | (all & ~(1u << o)), t.second);
                terms.swap(next);
            }
        }
        for (auto& t : terms) t.second = mul_c(t.second, factor);
        return terms;
    }

private:
    std::vector<int> parent_, chi_, dots_;
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void join(int a, int b, int delta) {
        a = find(a);
        b = find(b);
        if (a == b) {
            chi_[a] += delta;
            return;
        }
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        chi_[a] += chi_[b] + delta;
        dots_[a] += dots_[b];
    }
};

struct PlanarComposite {
    Match result;
    int loops = 0;
    std::vector<int> loop_middle;  // one middle position per loop, loops ordered by min middle position
};

struct Obj {
    int match = 0;
    int shift = 0;
    int height = 0;
    bool alive = true;
};

struct KeyHash {
    std::size_t operator()(const std::vector<long long>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (long long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

class Reducer {
public:
    Reducer(const TangleDiagram& d, const LocalOptions& opt) : d_(d), opt_(opt), b_(d.strands()) {
        if (b_ > 8) throw ResourceLimit("tangle reduction supports at most 8 strands");
        mod2_ = opt.ring == Ring::GF2;
        Match id(static_cast<std::size_t>(2 * b_));
        for (int t = 0; t < b_; ++t) {
            id[t] = static_cast<std::uint8_t>(b_ + t);
            id[b_ + t] = static_cast<std::uint8_t>(t);
        }
        identity_ = intern(id);
    }

    ClosedComplex run() {
        objs_.push_back({identity_, 0, 0, true});
        out_.emplace_back();
        in_.emplace_back();
        if (opt_.tracked != Tracked::None) {
            std::uint64_t label = 0;
            if (opt_.tracked == Tracked::PsiPrime) label = 1ull << closure_cycles(identity_).of_point[opt_.marked];
            psi_[0][label] = 1;
        }
        const auto& tiles = d_.tiles();
        for (std::size_t r = 0; r < tiles.size(); ++r) {
            stack_tile(tiles[r]);
            simplify();
        }
        return close();
    }

private:
    const TangleDiagram& d_;
    LocalOptions opt_;
    int b_;
    bool mod2_ = false;
    int identity_ = 0;
    std::size_t peak_ = 1;

    std::vector<Match> matches_;
    std::map<Match, int> match_index_;
    std::map<std::pair<int, int>, Cycles> cycle_cache_;
    std::unordered_map<std::vector<long long>, Morph, KeyHash> compose_cache_;
    std::unordered_map<std::vector<long long>, std::vector<std::pair<std::uint64_t, Coeff>>, KeyHash> closure_cache_;

    std::vector<Obj> objs_;
    std::vector<std::unordered_map<int, Morph>> out_;
    std::vector<std::unordered_set<int>> in_;
    std::map<int, std::map<std::uint64_t, Coeff>> psi_;

    int intern(const Match& m) {
        auto it = match_index_.find(m);
        if (it != match_index_.end()) return it->second;
        int id = static_cast<int>(matches_.size());
        matches_.push_back(m);
        match_index_.emplace(m, id);
        return id;
    }

    const Cycles& cycles(int a, int b) {
        auto key = std::make_pair(a, b);
        auto it = cycle_cache_.find(key);
        if (it != cycle_cache_.end()) return it->second;
        return cycle_cache_.emplace(key, cycles_of(matches_[a], matches_[b])).first->second;
    }

    const Cycles& closure_cycles(int a) { return cycles(a, identity_); }

    Coeff norm(Coeff c) const { return mod2_ ? (c & 1) : c; }

    // ---- planar composition of a partial tangle (top) with a tile object (bottom)
    PlanarComposite compose_planar(const Match& p, const Match& q) const {
        int b = b_;
        PlanarComposite pc;
        pc.result.assign(static_cast<std::size_t>(2 * b), 0xff);
        std::vector<char> middle_seen(static_cast<std::size_t>(b), 0);
        // walk from an outer point: P-side state (is_p, point)
        auto walk = [&](bool in_p, int x) {
            while (true) {
                if (in_p) {
                    int y = p[x];
                    if (y < b) return y;
                    middle_seen[y - b] = 1;
                    in_p = false;
                    x = y - b;
                } else {
                    int y = q[x];
                    if (y >= b) return y;
                    middle_seen[y] = 1;
                    in_p = true;
                    x = b + y;
                }
            }
        };
        for (int t = 0; t < b; ++t) {
            if (pc.result[t] != 0xff) continue;
            int e = walk(true, t);
            pc.result[t] = static_cast<std::uint8_t>(e);
            pc.result[e] = static_cast<std::uint8_t>(t);
        }
        for (int u = b; u < 2 * b; ++u) {
            if (pc.result[u] != 0xff) continue;
            int e = walk(false, u);
            pc.result[u] = static_cast<std::uint8_t>(e);
            pc.result[e] = static_cast<std::uint8_t>(u);
        }
        for (int m = 0; m < b; ++m) {
            if (middle_seen[m]) continue;
            pc.loop_middle.push_back(m);
            ++pc.loops;
            int x = m;
            do {
                middle_seen[x] = 1;
                int y = q[x];  // y is a middle position on the tile top
                middle_seen[y] = 1;
                x = p[b + y] - b;
            } while (x != m);
        }
        return pc;
    }

    // (f: P->P') tensor (g: Q->Q'): for each source-loop labeling, target-loop labelings with morphisms
    // between the outer composites. Labels: bit set = v+.
    std::map<std::pair<std::uint64_t, std::uint64_t>, Morph> tensor(int P, int P2, std::uint32_t fmask, int Q, int Q2,
                                                                       std::uint32_t gmask) {
        const Match& mp = matches_[P];
        const Match& mp2 = matches_[P2];
        const Match& mq = matches_[Q];
        const Match& mq2 = matches_[Q2];
        PlanarComposite src = compose_planar(mp, mq), tgt = compose_planar(mp2, mq2);
        int M = intern(src.result), M2 = intern(tgt.result);
        const Cycles cp = cycles(P, P2), cq = cycles(Q, Q2), cm = cycles(M, M2);
        std::map<std::pair<std::uint64_t, std::uint64_t>, Morph> result;
        for (std::uint64_t sl = 0; sl < (1ull << src.loops); ++sl) {
            Surface s;
            for (int k = 0; k < cp.count; ++k) s.add_piece(1, (fmask >> k) & 1);
            for (int k = 0; k < cq.count; ++k) s.add_piece(1, (gmask >> k) & 1);
            for (int m = 0; m < b_; ++m) s.glue(cp.of_point[b_ + m], cp.count + cq.of_point[m]);
            for (int l = 0; l < src.loops; ++l) s.cap(cp.of_point[b_ + src.loop_middle[l]], !((sl >> l) & 1));
            std::vector<int> outputs;
            for (int k = 0; k < cm.count; ++k) {
                int pt = cm.min_point[k];
                outputs.push_back(pt < b_ ? cp.of_point[pt] : cp.count + cq.of_point[pt]);
            }
            for (int l = 0; l < tgt.loops; ++l) outputs.push_back(cp.of_point[b_ + tgt.loop_middle[l]]);
            std::uint32_t outer = (1u << cm.count) - 1;
            for (const auto& [mask, c] : s.evaluate(outputs)) {
                std::uint64_t dotted_loops = mask >> cm.count;
                std::uint64_t tl = ~dotted_loops & ((1ull << tgt.loops) - 1);
                morph_add(result[{sl, tl}], mask & outer, c, mod2_);
            }
        }
        return result;
    }

    // g o f for f: A->B, g: B->C
    const Morph& compose(int A, int B, int C, const Morph& f, const Morph& g) {
        static thread_local Morph scratch;
        scratch.clear();
        const Cycles& cab = cycles(A, B);
        const Cycles& cbc = cycles(B, C);
        const Cycles& cac = cycles(A, C);
        const Match& mb = matches_[B];
        for (const auto& [fm, fc] : f)
            for (const auto& [gm, gc] : g) {
                std::vector<long long> key{A, B, C, fm, gm};
                auto it = compose_cache_.find(key);
                if (it == compose_cache_.end()) {
                    Surface s;
                    for (int k = 0; k < cab.count; ++k) s.add_piece(1, (fm >> k) & 1);
                    for (int k = 0; k < cbc.count; ++k) s.add_piece(1, (gm >> k) & 1);
                    for (std::size_t x = 0; x < mb.size(); ++x)
                        if (x < mb[x]) s.glue(cab.of_point[x], cab.count + cbc.of_point[x]);
                    std::vector<int> outputs;
                    for (int k = 0; k < cac.count; ++k) outputs.push_back(cab.of_point[cac.min_point[k]]);
                    Morph m;
                    for (const auto& [mask, c] : s.evaluate(outputs)) morph_add(m, mask, c, mod2_);
                    it = compose_cache_.emplace(std::move(key), std::move(m)).first;
                }
                Coeff fg = mul_c(fc, gc);
                for (const auto& [mask, c] : it->second) morph_add(scratch, mask, mul_c(fg, c), mod2_);
            }
        return scratch;
    }

    // F(closure of a single configuration A -> B) applied to a closure labeling of A.
    const std::vector<std::pair<std::uint64_t, Coeff>>& closure_map(int A, int B, std::uint32_t mask,
                                                                    std::uint64_t label) {
        std::vector<long long> key{A, B, mask, static_cast<long long>(label)};
        auto it = closure_cache_.find(key);
        if (it != closure_cache_.end()) return it->second;
        const Cycles& cab = cycles(A, B);
        const Cycles& ca = closure_cycles(A);
        const Cycles& cb = closure_cycles(B);
        Surface s;
        for (int k = 0; k < cab.count; ++k) s.add_piece(1, (mask >> k) & 1);
        for (int t = 0; t < b_; ++t) {
            int strip = s.add_piece(1, 0);
            s.glue(strip, cab.of_point[t]);
            s.glue(strip, cab.of_point[b_ + t]);
        }
        for (int k = 0; k < ca.count; ++k) s.cap(cab.of_point[ca.min_point[k]], !((label >> k) & 1));
        std::vector<int> outputs;
        for (int k = 0; k < cb.count; ++k) outputs.push_back(cab.of_point[cb.min_point[k]]);
        std::vector<std::pair<std::uint64_t, Coeff>> res;
        std::uint64_t all = (1ull << cb.count) - 1;
        for (const auto& [m, c] : s.evaluate(outputs)) res.emplace_back(~static_cast<std::uint64_t>(m) & all, c);
        return closure_cache_.emplace(std::move(key), std::move(res)).first->second;
    }

    int add_obj(int match, int shift, int height) {
        objs_.push_back({match, shift, height, true});
        out_.emplace_back();
        in_.emplace_back();
        return static_cast<int>(objs_.size()) - 1;
    }

    void add_edge(int x, int y, std::uint32_t mask, Coeff c) {
        if (norm(c) == 0) return;
        Morph& m = out_[x][y];
        morph_add(m, mask, c, mod2_);
        if (m.empty())
            out_[x].erase(y), in_[y].erase(x);
        else
            in_[y].insert(x);
    }

    void add_morph(int x, int y, const Morph& m, Coeff scale) {
        if (m.empty()) return;
        Morph& t = out_[x][y];
        for (const auto& [mask, c] : m) morph_add(t, mask, mul_c(c, scale), mod2_);
        if (t.empty())
            out_[x].erase(y), in_[y].erase(x);
        else
            in_[y].insert(x);
    }

    void stack_tile(const Tile& tile) {
        struct TileObj {
            int match, shift, height;
        };
        std::vector<TileObj> tobj;
        Match id = matches_[identity_];
        Match cc = id;
        int i = tile.index - 1;
        cc[i] = static_cast<std::uint8_t>(i + 1);
        cc[i + 1] = static_cast<std::uint8_t>(i);
        cc[b_ + i] = static_cast<std::uint8_t>(b_ + i + 1);
        cc[b_ + i + 1] = static_cast<std::uint8_t>(b_ + i);
        int capcup = intern(cc);
        int tracked_tile = -1;
        if (tile.kind == Tile::Kind::CapCup) {
            tobj.push_back({capcup, 0, 0});
        } else {
            for (int bit = 0; bit < 2; ++bit)
                tobj.push_back({resolution_is_identity(tile, bit) ? identity_ : capcup, bit, bit});
            tracked_tile = resolution_is_identity(tile, 0) ? 0 : 1;
        }

        std::vector<Obj> old_objs = objs_;
        auto old_out = std::move(out_);
        auto old_psi = std::move(psi_);
        objs_.clear();
        out_.clear();
        in_.clear();
        psi_.clear();

        // new object ids per (old object, tile object, loop label)
        std::vector<std::vector<std::vector<int>>> ids(old_objs.size());
        for (std::size_t x = 0; x < old_objs.size(); ++x) {
            if (!old_objs[x].alive) continue;
            ids[x].resize(tobj.size());
            for (std::size_t q = 0; q < tobj.size(); ++q) {
                PlanarComposite pc = compose_planar(matches_[old_objs[x].match], matches_[tobj[q].match]);
                int m = intern(pc.result);
                for (std::uint64_t l = 0; l < (1ull << pc.loops); ++l) {
                    int s = old_objs[x].shift + tobj[q].shift + 2 * __builtin_popcountll(l) - pc.loops;
                    ids[x][q].push_back(add_obj(m, s, old_objs[x].height + tobj[q].height));
                }
            }
        }
        if (objs_.size() > opt_.max_objects) throw ResourceLimit("tangle complex exceeds object limit");
        peak_ = std::max(peak_, objs_.size());

        // old differentials tensored with the identity of each tile object
        for (std::size_t x = 0; x < old_objs.size(); ++x) {
            if (!old_objs[x].alive) continue;
            for (const auto& [y, f] : old_out[x])
                for (std::size_t q = 0; q < tobj.size(); ++q)
                    for (const auto& [fm, fc] : f)
                        for (const auto& [labels, g] : tensor(old_objs[x].match, old_objs[y].match, fm,
                                                              tobj[q].match, tobj[q].match, 0))
                            add_morph(ids[x][q][labels.first], ids[y][q][labels.second], g, fc);
        }
        // the tile differential with the Koszul sign
        if (tobj.size() == 2) {
            for (std::size_t x = 0; x < old_objs.size(); ++x) {
                if (!old_objs[x].alive) continue;
                Coeff sign = (old_objs[x].height % 2) ? -1 : 1;
                int P = old_objs[x].match;
                for (const auto& [labels, g] : tensor(P, P, 0, tobj[0].match, tobj[1].match, 0))
                    add_morph(ids[x][0][labels.first], ids[x][1][labels.second], g, sign);
            }
        }
        // the tracked element sits over the vertical resolution, so its composite has no loops
        for (const auto& [x, vec] : old_psi) {
            if (tracked_tile < 0) throw std::logic_error("tracked element requires a braid diagram");
            int nx = ids[x][static_cast<std::size_t>(tracked_tile)].at(0);
            psi_[nx] = vec;
        }
    }

    bool is_unit(Coeff c) const { return mod2_ ? (c & 1) : (c == 1 || c == -1); }

    void eliminate(int x, int y, Coeff u) {
        // u is its own inverse
        std::vector<std::pair<int, Morph>> gammas;
        for (const auto& [w, g] : out_[x])
            if (w != y) gammas.emplace_back(w, g);
        std::vector<std::pair<int, Morph>> deltas;
        for (int z : in_[y])
            if (z != x) deltas.emplace_back(z, out_[z].at(y));
        int X = objs_[x].match;
        for (const auto& [z, delta] : deltas)
            for (const auto& [w, gamma] : gammas) {
                const Morph& gd = compose(objs_[z].match, X, objs_[w].match, delta, gamma);
                add_morph(z, w, gd, mod2_ ? 1 : -u);
            }
        auto py = psi_.find(y);
        if (py != psi_.end()) {
            auto vy = py->second;
            for (const auto& [w, gamma] : gammas) {
                auto& vw = psi_[w];
                for (const auto& [mask, c] : gamma)
                    for (const auto& [label, v] : vy)
                        for (const auto& [tl, tc] : closure_map(X, objs_[w].match, mask, label)) {
                            Coeff delta = mul_c(mul_c(c, v), tc);
                            Coeff& slot = vw[tl];
                            slot = norm(add_c(slot, mod2_ ? delta : mul_c(-u, delta)));
                            if (slot == 0) vw.erase(tl);
                        }
                if (vw.empty()) psi_.erase(w);
            }
        }
        psi_.erase(x);
        psi_.erase(y);
        for (int v : {x, y}) {
            for (const auto& [w, m] : out_[v]) in_[w].erase(v);
            for (int z : in_[v]) out_[z].erase(v);
            out_[v].clear();
            in_[v].clear();
            objs_[v].alive = false;
        }
    }

    void simplify() {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t x = 0; x < objs_.size(); ++x) {
                if (!objs_[x].alive) continue;
                int best = -1;
                std::size_t best_cost = SIZE_MAX;
                Coeff unit = 0;
                for (const auto& [y, m] : out_[x]) {
                    if (m.size() != 1 || m[0].first != 0 || !is_unit(m[0].second)) continue;
                    if (objs_[y].match != objs_[x].match) continue;
                    std::size_t cost = (in_[y].size() - 1) * (out_[x].size() - 1);
                    if (cost < best_cost) {
                        best_cost = cost;
                        best = y;
                        unit = mod2_ ? 1 : m[0].second;
                    }
                }
                if (best >= 0) {
                    if (objs_[best].shift != objs_[x].shift) throw std::logic_error("isomorphism between unequal shifts");
                    eliminate(static_cast<int>(x), best, unit);
                    progress = true;
                }
            }
        }
        compact();
    }

    void compact() {
        std::vector<int> remap(objs_.size(), -1);
        std::vector<Obj> objs;
        for (std::size_t x = 0; x < objs_.size(); ++x)
            if (objs_[x].alive) {
                remap[x] = static_cast<int>(objs.size());
                objs.push_back(objs_[x]);
            }
        std::vector<std::unordered_map<int, Morph>> out(objs.size());
        std::vector<std::unordered_set<int>> in(objs.size());
        for (std::size_t x = 0; x < objs_.size(); ++x) {
            if (remap[x] < 0) continue;
            for (auto& [y, m] : out_[x]) {
                out[remap[x]].emplace(remap[y], std::move(m));
                in[remap[y]].insert(remap[x]);
            }
        }
        std::map<int, std::map<std::uint64_t, Coeff>> psi;
        for (auto& [x, v] : psi_) {
            if (remap[x] < 0) throw std::logic_error("tracked element on eliminated object");
            psi[remap[x]] = std::move(v);
        }
        objs_ = std::move(objs);
        out_ = std::move(out);
        in_ = std::move(in);
        psi_ = std::move(psi);
    }

    ClosedComplex close() {
        int np = d_.n_plus(), nm = d_.n_minus();
        bool reduced = opt_.marked >= 0;
        ClosedComplex cc;
        cc.ring = opt_.ring;
        cc.reduced = reduced;
        cc.peak_objects = peak_;
        // generator index per object and label
        std::map<Grading, int> counter;
        std::vector<std::unordered_map<std::uint64_t, std::pair<Grading, int>>> index(objs_.size());
        auto keep = [&](int obj, std::uint64_t label) {
            if (!reduced) return true;
            return ((label >> closure_cycles(objs_[obj].match).of_point[opt_.marked]) & 1) != 0;
        };
        auto grading_of = [&](int obj, std::uint64_t label) {
            int c = closure_cycles(objs_[obj].match).count;
            int p = 2 * __builtin_popcountll(label) - c;
            return Grading{objs_[obj].height - nm, p + objs_[obj].shift + np - 2 * nm - (reduced ? 1 : 0)};
        };
        for (std::size_t x = 0; x < objs_.size(); ++x) {
            int c = closure_cycles(objs_[x].match).count;
            for (std::uint64_t l = 0; l < (1ull << c); ++l) {
                if (!keep(static_cast<int>(x), l)) continue;
                Grading g = grading_of(static_cast<int>(x), l);
                index[x][l] = {g, counter[g]++};
            }
        }
        for (const auto& [g, n] : counter)
            if (static_cast<std::size_t>(n) > opt_.max_dim) throw ResourceLimit("closed complex piece exceeds limit");
        cc.dims = counter;
        std::map<Grading, SparseMatrix> mats;
        for (const auto& [g, n] : counter) {
            auto it = counter.find({g.i + 1, g.j});
            mats.emplace(g, SparseMatrix(it == counter.end() ? 0 : it->second, n));
        }
        for (std::size_t x = 0; x < objs_.size(); ++x) {
            for (const auto& [y, m] : out_[x]) {
                for (const auto& [label, src] : index[x]) {
                    SparseMatrix& mat = mats.at(src.first);
                    for (const auto& [mask, c] : m)
                        for (const auto& [tl, tc] : closure_map(objs_[x].match, objs_[y].match, mask, label)) {
                            auto t = index[y].find(tl);
                            if (t == index[y].end()) continue;  // quotient by the marked v- part
                            if (t->second.first != Grading{src.first.i + 1, src.first.j})
                                throw std::logic_error("differential does not preserve quantum grading");
                            mat.add(t->second.second, src.second, mul_c(c, tc));
                        }
                }
            }
        }
        for (auto& [g, mat] : mats) mat.finalize();
        cc.differential = std::move(mats);
        if (opt_.tracked != Tracked::None) {
            std::optional<Grading> grading;
            std::vector<std::pair<int, Coeff>> entries;
            for (const auto& [x, vec] : psi_)
                for (const auto& [label, c] : vec) {
                    auto it = index[x].find(label);
                    if (it == index[x].end() || norm(c) == 0) continue;
                    if (grading && *grading != it->second.first) throw std::logic_error("tracked element is not homogeneous");
                    grading = it->second.first;
                    entries.emplace_back(it->second.second, c);
                }
            if (grading) {
                cc.tracked_grading = grading;
                cc.tracked = SparseVector(counter.at(*grading));
                std::sort(entries.begin(), entries.end());
                for (const auto& [r, c] : entries) cc.tracked.set(r, cc.tracked.get(r) + mpq_class(static_cast<long>(c)));
            }
        }
        return cc;
    }
};

}  // namespace

ClosedComplex reduce_closure(const TangleDiagram& d, const LocalOptions& opt) {
    if (opt.marked >= d.strands()) throw std::invalid_argument("marked strand out of range");
    if (opt.tracked == Tracked::PsiPrime && opt.marked < 0) throw std::invalid_argument("reduced element needs a marked point");
    if (opt.tracked != Tracked::None)
        for (int dir : d.segment_direction())
            if (dir != 1) throw std::invalid_argument("tracked element requires a downward-oriented braid diagram");
    Reducer r(d, opt);
    return r.run();
}

}  // namespace tkh
