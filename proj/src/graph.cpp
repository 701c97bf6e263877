#include "drcycle/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace drc {

Graph::Graph(std::vector<int> genus_, std::vector<std::array<int, 2>> edges_,
             std::vector<int> legs_, std::vector<int> degree_)
    : genus(std::move(genus_)), degree(std::move(degree_)), edges(std::move(edges_)),
      legs(std::move(legs_)) {
    if (degree.empty()) degree.assign(genus.size(), 0);
}

int Graph::he_vertex(int h) const {
    if (h < nl()) return legs[h];
    int e = (h - nl()) / 2;
    return edges[e][(h - nl()) % 2];
}

int Graph::he_partner(int h) const {
    if (h < nl()) return h;
    return ((h - nl()) % 2 == 0) ? h + 1 : h - 1;
}

std::vector<std::vector<int>> Graph::half_edges_at() const {
    std::vector<std::vector<int>> out(nv());
    for (int h = 0; h < nh(); ++h) out[he_vertex(h)].push_back(h);
    return out;
}

std::vector<int> Graph::valence() const {
    std::vector<int> out(nv(), 0);
    for (int v : legs) ++out[v];
    for (auto& e : edges) {
        ++out[e[0]];
        ++out[e[1]];
    }
    return out;
}

int Graph::total_genus() const {
    return std::accumulate(genus.begin(), genus.end(), 0) + h1();
}

int Graph::total_degree() const { return std::accumulate(degree.begin(), degree.end(), 0); }

namespace {

int uf_find(std::vector<int>& p, int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
}

bool connected_without(const Graph& G, int skip_edge) {
    if (G.nv() == 0) return false;
    std::vector<int> p(G.nv());
    std::iota(p.begin(), p.end(), 0);
    int comps = G.nv();
    for (int e = 0; e < G.ne(); ++e) {
        if (e == skip_edge) continue;
        int a = uf_find(p, G.edges[e][0]), b = uf_find(p, G.edges[e][1]);
        if (a != b) {
            p[a] = b;
            --comps;
        }
    }
    return comps == 1;
}

}  // namespace

bool Graph::connected() const { return connected_without(*this, -1); }

bool Graph::edge_separating(int e) const {
    if (edges[e][0] == edges[e][1]) return false;
    return !connected_without(*this, e);
}

bool Graph::stable() const {
    auto val = valence();
    for (int v = 0; v < nv(); ++v)
        if (2 * genus[v] - 2 + val[v] <= 0) return false;
    return true;
}

std::vector<int> Graph::vertex_map() const {
    std::vector<int> out(nh());
    for (int h = 0; h < nh(); ++h) out[h] = he_vertex(h);
    return out;
}

std::vector<int> Graph::involution() const {
    std::vector<int> out(nh());
    for (int h = 0; h < nh(); ++h) out[h] = he_partner(h);
    return out;
}

void Graph::validate() const {
    if (nv() == 0) throw std::invalid_argument("graph has no vertices");
    if (static_cast<int>(degree.size()) != nv())
        throw std::invalid_argument("degree vector size mismatch");
    for (int g : genus)
        if (g < 0) throw std::invalid_argument("negative vertex genus");
    for (auto& e : edges)
        for (int v : e)
            if (v < 0 || v >= nv()) throw std::invalid_argument("edge endpoint out of range");
    for (int v : legs)
        if (v < 0 || v >= nv()) throw std::invalid_argument("leg vertex out of range");
    if (!connected()) throw std::invalid_argument("graph is not connected");
}

// ---------------------------------------------------------------------------
// Decorations

Decoration Decoration::zero(const Graph& G) {
    Decoration d;
    d.psi.assign(G.nh(), 0);
    d.xi.assign(G.nl(), 0);
    d.exi.assign(G.ne(), 0);
    d.vmono.assign(G.nv(), {});
    return d;
}

int mono_degree(const VertexMono& m) {
    int s = 0;
    for (auto& [a, b] : m) s += a + b - 1;
    return s;
}

int Decoration::degree() const {
    int s = 0;
    for (int x : psi) s += x;
    for (int x : xi) s += x;
    for (int x : exi) s += x;
    for (auto& m : vmono) s += mono_degree(m);
    return s;
}

bool Decoration::has_pic_symbols() const {
    for (int x : xi)
        if (x) return true;
    for (int x : exi)
        if (x) return true;
    for (auto& m : vmono)
        for (auto& [a, b] : m)
            if (b > 0) return true;
    return false;
}

void mono_multiply(VertexMono& m, const VertexMono& other) {
    if (other.empty()) return;
    VertexMono out;
    out.reserve(m.size() + other.size());
    std::merge(m.begin(), m.end(), other.begin(), other.end(), std::back_inserter(out));
    m = std::move(out);
}

Decoration deco_multiply(const Decoration& a, const Decoration& b) {
    Decoration out = a;
    for (size_t i = 0; i < out.psi.size(); ++i) out.psi[i] += b.psi[i];
    for (size_t i = 0; i < out.xi.size(); ++i) out.xi[i] += b.xi[i];
    for (size_t i = 0; i < out.exi.size(); ++i) out.exi[i] += b.exi[i];
    for (size_t i = 0; i < out.vmono.size(); ++i) mono_multiply(out.vmono[i], b.vmono[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct EdgeRec {
    std::array<int, 5> r;  // (pos u, psi u, pos v, psi v, xi)
    int edge;
    bool flipped;          // record side 0 is the edge's side 1
};

class Canonizer {
public:
    explicit Canonizer(const Stratum& s) : s_(s), G_(s.graph), D_(s.deco) {
        V_ = G_.nv();
        adj_.assign(V_, {});
        for (int e = 0; e < G_.ne(); ++e) {
            int u = G_.edges[e][0], v = G_.edges[e][1];
            int pu = D_.psi[G_.edge_half(e, 0)], pv = D_.psi[G_.edge_half(e, 1)];
            if (u == v) continue;
            adj_[u].push_back({v, pu, pv, D_.exi[e]});
            adj_[v].push_back({u, pv, pu, D_.exi[e]});
        }
        std::vector<std::vector<int>> sig(V_);
        for (int v = 0; v < V_; ++v) {
            auto& s0 = sig[v];
            s0.push_back(G_.genus[v]);
            s0.push_back(G_.degree[v]);
            s0.push_back(static_cast<int>(D_.vmono[v].size()));
            for (auto& [a, b] : D_.vmono[v]) {
                s0.push_back(a);
                s0.push_back(b);
            }
        }
        for (int i = 0; i < G_.nl(); ++i) {
            auto& s0 = sig[G_.legs[i]];
            s0.push_back(-1);
            s0.push_back(i);
            s0.push_back(D_.psi[i]);
            s0.push_back(D_.xi[i]);
        }
        std::vector<std::vector<std::array<int, 3>>> loops(V_);
        for (int e = 0; e < G_.ne(); ++e) {
            int u = G_.edges[e][0];
            if (u != G_.edges[e][1]) continue;
            int p0 = D_.psi[G_.edge_half(e, 0)], p1 = D_.psi[G_.edge_half(e, 1)];
            loops[u].push_back({std::min(p0, p1), std::max(p0, p1), D_.exi[e]});
        }
        for (int v = 0; v < V_; ++v) {
            std::sort(loops[v].begin(), loops[v].end());
            sig[v].push_back(-2);
            for (auto& l : loops[v]) sig[v].insert(sig[v].end(), l.begin(), l.end());
            int deg = 0;
            for (auto& a : adj_[v]) (void)a, ++deg;
            sig[v].push_back(-3);
            sig[v].push_back(deg);
        }
        init_colors_ = rank(sig);
    }

    void run(bool keep_leaves) {
        keep_leaves_ = keep_leaves;
        search(init_colors_);
    }

    const Key& best() const { return best_; }
    const std::vector<int>& best_pos() const { return best_pos_; }
    std::int64_t leaf_count() const { return count_; }
    const std::vector<std::vector<int>>& leaves() const { return leaves_; }

    Key encode(const std::vector<int>& pos, std::vector<EdgeRec>* recs_out = nullptr) const {
        Key out;
        out.reserve(3 + 4 * V_ + 3 * G_.nl() + 5 * G_.ne());
        out.push_back(V_);
        out.push_back(G_.ne());
        out.push_back(G_.nl());
        std::vector<int> inv(V_);
        for (int v = 0; v < V_; ++v) inv[pos[v]] = v;
        for (int p = 0; p < V_; ++p) {
            int v = inv[p];
            out.push_back(G_.genus[v]);
            out.push_back(G_.degree[v]);
            out.push_back(static_cast<int>(D_.vmono[v].size()));
            for (auto& [a, b] : D_.vmono[v]) {
                out.push_back(a);
                out.push_back(b);
            }
        }
        for (int i = 0; i < G_.nl(); ++i) {
            out.push_back(pos[G_.legs[i]]);
            out.push_back(D_.psi[i]);
            out.push_back(D_.xi[i]);
        }
        std::vector<EdgeRec> recs;
        recs.reserve(G_.ne());
        for (int e = 0; e < G_.ne(); ++e) {
            int a0 = pos[G_.edges[e][0]], p0 = D_.psi[G_.edge_half(e, 0)];
            int a1 = pos[G_.edges[e][1]], p1 = D_.psi[G_.edge_half(e, 1)];
            bool flip = std::make_pair(a1, p1) < std::make_pair(a0, p0);
            if (flip)
                recs.push_back({{a1, p1, a0, p0, D_.exi[e]}, e, true});
            else
                recs.push_back({{a0, p0, a1, p1, D_.exi[e]}, e, false});
        }
        std::stable_sort(recs.begin(), recs.end(),
                         [](const EdgeRec& x, const EdgeRec& y) { return x.r < y.r; });
        for (auto& rc : recs) out.insert(out.end(), rc.r.begin(), rc.r.end());
        if (recs_out) *recs_out = std::move(recs);
        return out;
    }

private:
    static std::vector<int> rank(const std::vector<std::vector<int>>& sig) {
        std::vector<std::vector<int>> uniq = sig;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<int> out(sig.size());
        for (size_t v = 0; v < sig.size(); ++v)
            out[v] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin());
        return out;
    }

    static int num_colors(const std::vector<int>& c) {
        return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
    }

    std::vector<int> refine(std::vector<int> col) const {
        int nc = num_colors(col);
        while (true) {
            std::vector<std::vector<int>> sig(V_);
            for (int v = 0; v < V_; ++v) {
                std::vector<std::array<int, 4>> nb;
                nb.reserve(adj_[v].size());
                for (auto& a : adj_[v]) nb.push_back({col[a[0]], a[1], a[2], a[3]});
                std::sort(nb.begin(), nb.end());
                auto& s = sig[v];
                s.push_back(col[v]);
                for (auto& x : nb) s.insert(s.end(), x.begin(), x.end());
            }
            auto nxt = rank(sig);
            int nn = num_colors(nxt);
            col = std::move(nxt);
            if (nn == nc) break;
            nc = nn;
        }
        return col;
    }

    void search(const std::vector<int>& col0) {
        auto col = refine(col0);
        int nc = num_colors(col);
        if (nc == V_) {
            Key k = encode(col);
            if (!have_best_ || k < best_) {
                best_ = std::move(k);
                best_pos_ = col;
                have_best_ = true;
                count_ = 1;
                leaves_.clear();
                if (keep_leaves_) leaves_.push_back(col);
            } else if (k == best_) {
                ++count_;
                if (keep_leaves_) leaves_.push_back(col);
            }
            return;
        }
        std::vector<int> size(nc, 0);
        for (int c : col) ++size[c];
        int target = -1;
        for (int c = 0; c < nc; ++c)
            if (size[c] > 1) {
                target = c;
                break;
            }
        for (int v = 0; v < V_; ++v) {
            if (col[v] != target) continue;
            std::vector<std::vector<int>> sig(V_);
            for (int u = 0; u < V_; ++u) sig[u] = {col[u], u == v ? 0 : 1};
            search(rank(sig));
        }
    }

    const Stratum& s_;
    const Graph& G_;
    const Decoration& D_;
    int V_ = 0;
    std::vector<std::vector<std::array<int, 4>>> adj_;
    std::vector<int> init_colors_;
    bool keep_leaves_ = false;
    bool have_best_ = false;
    Key best_;
    std::vector<int> best_pos_;
    std::int64_t count_ = 0;
    std::vector<std::vector<int>> leaves_;
};

std::int64_t edge_symmetry_factor(const Key& key) {
    int V = key[0], E = key[1], n = key[2];
    size_t p = 3;
    for (int v = 0; v < V; ++v) {
        int m = key[p + 2];
        p += 3 + 2 * m;
    }
    p += 3 * n;
    std::int64_t f = 1;
    int run = 0;
    const int* prev = nullptr;
    for (int e = 0; e < E; ++e) {
        const int* r = &key[p + 5 * e];
        if (prev && std::equal(r, r + 5, prev))
            ++run;
        else
            run = 1;
        f *= run;
        if (r[0] == r[2] && r[1] == r[3]) f *= 2;
        prev = r;
    }
    return f;
}

// Half-edge map original -> canonical for a given vertex position assignment.
std::vector<int> half_edge_map_for(const Canonizer& cz, const Graph& G, const std::vector<int>& pos) {
    std::vector<EdgeRec> recs;
    cz.encode(pos, &recs);
    std::vector<int> hmap(G.nh());
    for (int i = 0; i < G.nl(); ++i) hmap[i] = i;
    for (int k = 0; k < static_cast<int>(recs.size()); ++k) {
        int e = recs[k].edge;
        int h0 = G.edge_half(e, 0), h1 = G.edge_half(e, 1);
        int c0 = G.nl() + 2 * k, c1 = c0 + 1;
        if (recs[k].flipped) {
            hmap[h1] = c0;
            hmap[h0] = c1;
        } else {
            hmap[h0] = c0;
            hmap[h1] = c1;
        }
    }
    return hmap;
}

}  // namespace

Stratum decode_key(const Key& key) {
    int V = key.at(0), E = key.at(1), n = key.at(2);
    size_t p = 3;
    Graph G;
    Decoration D;
    G.genus.resize(V);
    G.degree.resize(V);
    D.vmono.resize(V);
    for (int v = 0; v < V; ++v) {
        G.genus[v] = key[p];
        G.degree[v] = key[p + 1];
        int m = key[p + 2];
        p += 3;
        for (int j = 0; j < m; ++j) {
            D.vmono[v].push_back({key[p], key[p + 1]});
            p += 2;
        }
    }
    G.legs.resize(n);
    D.psi.assign(n + 2 * E, 0);
    D.xi.resize(n);
    for (int i = 0; i < n; ++i) {
        G.legs[i] = key[p];
        D.psi[i] = key[p + 1];
        D.xi[i] = key[p + 2];
        p += 3;
    }
    G.edges.resize(E);
    D.exi.resize(E);
    for (int e = 0; e < E; ++e) {
        G.edges[e] = {key[p], key[p + 2]};
        D.psi[n + 2 * e] = key[p + 1];
        D.psi[n + 2 * e + 1] = key[p + 3];
        D.exi[e] = key[p + 4];
        p += 5;
    }
    return Stratum(std::move(G), std::move(D));
}

Key canonical_key(const Stratum& s) {
    Canonizer cz(s);
    cz.run(false);
    return cz.best();
}

std::pair<Key, std::int64_t> canonical_key_aut(const Stratum& s) {
    Canonizer cz(s);
    cz.run(false);
    return {cz.best(), cz.leaf_count() * edge_symmetry_factor(cz.best())};
}

CanonicalForm canonicalize(const Stratum& s, bool with_generators) {
    Canonizer cz(s);
    cz.run(with_generators);
    CanonicalForm cf;
    cf.key = cz.best();
    cf.stratum = decode_key(cf.key);
    cf.vertex_map = cz.best_pos();
    cf.half_edge_map = half_edge_map_for(cz, s.graph, cz.best_pos());
    cf.aut_order = cz.leaf_count() * edge_symmetry_factor(cf.key);
    if (!with_generators) return cf;

    const Graph& C = cf.stratum.graph;
    const int n = C.nl();
    std::vector<int> inv_best(s.graph.nh());
    for (int h = 0; h < s.graph.nh(); ++h) inv_best[cf.half_edge_map[h]] = h;
    for (auto& leaf : cz.leaves()) {
        if (leaf == cz.best_pos()) continue;
        auto hm = half_edge_map_for(cz, s.graph, leaf);
        std::vector<int> gen(C.nh());
        for (int h = 0; h < C.nh(); ++h) gen[h] = hm[inv_best[h]];
        cf.aut_generators.push_back(std::move(gen));
    }
    std::vector<int> id(C.nh());
    std::iota(id.begin(), id.end(), 0);
    auto rec = [&](int e) {
        return std::array<int, 5>{C.edges[e][0], cf.stratum.deco.psi[C.edge_half(e, 0)], C.edges[e][1],
                                  cf.stratum.deco.psi[C.edge_half(e, 1)], cf.stratum.deco.exi[e]};
    };
    for (int e = 0; e + 1 < C.ne(); ++e) {
        if (rec(e) != rec(e + 1)) continue;
        auto gen = id;
        std::swap(gen[n + 2 * e], gen[n + 2 * e + 2]);
        std::swap(gen[n + 2 * e + 1], gen[n + 2 * e + 3]);
        cf.aut_generators.push_back(std::move(gen));
    }
    for (int e = 0; e < C.ne(); ++e) {
        auto r = rec(e);
        if (r[0] != r[2] || r[1] != r[3]) continue;
        auto gen = id;
        std::swap(gen[n + 2 * e], gen[n + 2 * e + 1]);
        cf.aut_generators.push_back(std::move(gen));
    }
    return cf;
}

CanonicalForm canonicalize(const Graph& G, bool with_generators) {
    return canonicalize(Stratum(G), with_generators);
}

bool is_automorphism(const Stratum& s, const std::vector<int>& perm) {
    const Graph& G = s.graph;
    const Decoration& D = s.deco;
    if (static_cast<int>(perm.size()) != G.nh()) return false;
    std::vector<char> seen(G.nh(), 0);
    for (int h : perm) {
        if (h < 0 || h >= G.nh() || seen[h]) return false;
        seen[h] = 1;
    }
    for (int i = 0; i < G.nl(); ++i)
        if (perm[i] != i) return false;
    std::vector<int> vmap(G.nv(), -1);
    for (int h = 0; h < G.nh(); ++h) {
        if (perm[G.he_partner(h)] != G.he_partner(perm[h])) return false;
        if (D.psi[perm[h]] != D.psi[h]) return false;
        int v = G.he_vertex(h), w = G.he_vertex(perm[h]);
        if (vmap[v] == -1)
            vmap[v] = w;
        else if (vmap[v] != w)
            return false;
        int e = G.he_edge(h);
        if (e >= 0 && D.exi[G.he_edge(perm[h])] != D.exi[e]) return false;
    }
    for (int v = 0; v < G.nv(); ++v)
        if (vmap[v] == -1) vmap[v] = v;  // isolated vertex (single-vertex graph)
    std::vector<char> hit(G.nv(), 0);
    for (int v = 0; v < G.nv(); ++v) {
        int w = vmap[v];
        if (hit[w]) return false;
        hit[w] = 1;
        if (G.genus[w] != G.genus[v] || G.degree[w] != G.degree[v] || D.vmono[w] != D.vmono[v])
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Isomorphisms

namespace {

struct IsoData {
    std::vector<int> val, loops;
    std::vector<std::vector<int>> legs_at;
    std::vector<std::vector<int>> mult;
    explicit IsoData(const Graph& G) {
        val = G.valence();
        loops.assign(G.nv(), 0);
        legs_at.assign(G.nv(), {});
        mult.assign(G.nv(), std::vector<int>(G.nv(), 0));
        for (int i = 0; i < G.nl(); ++i) legs_at[G.legs[i]].push_back(i);
        for (auto& e : G.edges) {
            if (e[0] == e[1]) {
                ++loops[e[0]];
                ++mult[e[0]][e[0]];
            } else {
                ++mult[e[0]][e[1]];
                ++mult[e[1]][e[0]];
            }
        }
    }
};

}  // namespace

std::int64_t for_each_isomorphism(
    const Graph& G, const Graph& H,
    const std::function<bool(const std::vector<int>&, const std::vector<int>&)>& cb) {
    if (G.nv() != H.nv() || G.ne() != H.ne() || G.nl() != H.nl()) return 0;
    const int V = G.nv();
    IsoData dg(G), dh(H);

    // Vertex order: pinned by legs first, then by BFS from pinned ones.
    std::vector<int> order;
    std::vector<char> placed(V, 0);
    for (int v = 0; v < V; ++v)
        if (!dg.legs_at[v].empty()) {
            order.push_back(v);
            placed[v] = 1;
        }
    for (size_t i = 0; order.size() < static_cast<size_t>(V); ++i) {
        if (i == order.size()) {
            for (int v = 0; v < V; ++v)
                if (!placed[v]) {
                    order.push_back(v);
                    placed[v] = 1;
                    break;
                }
        }
        int u = order[i];
        for (int w = 0; w < V; ++w)
            if (!placed[w] && dg.mult[u][w] > 0) {
                order.push_back(w);
                placed[w] = 1;
            }
    }

    std::vector<int> phi(V, -1);
    std::vector<char> used(V, 0);
    std::int64_t visited = 0;
    bool stop = false;

    // Edge groups of G keyed by unordered vertex pair.
    std::map<std::pair<int, int>, std::vector<int>> ggroups, hgroups;
    for (int e = 0; e < G.ne(); ++e)
        ggroups[{std::min(G.edges[e][0], G.edges[e][1]), std::max(G.edges[e][0], G.edges[e][1])}]
            .push_back(e);
    for (int e = 0; e < H.ne(); ++e)
        hgroups[{std::min(H.edges[e][0], H.edges[e][1]), std::max(H.edges[e][0], H.edges[e][1])}]
            .push_back(e);

    auto emit_edges = [&]() {
        std::vector<std::pair<std::vector<int>, std::vector<int>>> groups;  // (G edges, H edges)
        for (auto& [pr, ges] : ggroups) {
            int a = phi[pr.first], b = phi[pr.second];
            auto it = hgroups.find({std::min(a, b), std::max(a, b)});
            if (it == hgroups.end() || it->second.size() != ges.size()) return;
            groups.push_back({ges, it->second});
        }
        std::vector<int> hmap(G.nh(), -1);
        for (int i = 0; i < G.nl(); ++i) hmap[i] = i;
        std::function<void(size_t)> rec = [&](size_t gi) {
            if (stop) return;
            if (gi == groups.size()) {
                ++visited;
                if (!cb(phi, hmap)) stop = true;
                return;
            }
            const auto& ges = groups[gi].first;
            std::vector<int> hes = groups[gi].second;
            std::sort(hes.begin(), hes.end());
            bool loop = G.edges[ges[0]][0] == G.edges[ges[0]][1];
            do {
                int k = static_cast<int>(ges.size());
                int flips = loop ? (1 << k) : 1;
                for (int mask = 0; mask < flips && !stop; ++mask) {
                    for (int j = 0; j < k; ++j) {
                        int e = ges[j], f = hes[j];
                        bool flip;
                        if (loop)
                            flip = (mask >> j) & 1;
                        else
                            flip = phi[G.edges[e][0]] != H.edges[f][0];
                        hmap[G.edge_half(e, 0)] = H.edge_half(f, flip ? 1 : 0);
                        hmap[G.edge_half(e, 1)] = H.edge_half(f, flip ? 0 : 1);
                    }
                    rec(gi + 1);
                }
            } while (!stop && std::next_permutation(hes.begin(), hes.end()));
        };
        rec(0);
    };

    std::function<void(int)> place = [&](int idx) {
        if (stop) return;
        if (idx == V) {
            emit_edges();
            return;
        }
        int v = order[idx];
        auto try_w = [&](int w) {
            if (used[w]) return;
            if (G.genus[v] != H.genus[w] || G.degree[v] != H.degree[w]) return;
            if (dg.val[v] != dh.val[w] || dg.loops[v] != dh.loops[w]) return;
            if (dg.legs_at[v] != dh.legs_at[w]) return;
            for (int j = 0; j < idx; ++j) {
                int u = order[j];
                if (dg.mult[v][u] != dh.mult[w][phi[u]]) return;
            }
            phi[v] = w;
            used[w] = 1;
            place(idx + 1);
            used[w] = 0;
            phi[v] = -1;
        };
        if (!dg.legs_at[v].empty()) {
            try_w(H.legs[dg.legs_at[v][0]]);
        } else {
            for (int w = 0; w < V && !stop; ++w) try_w(w);
        }
    };
    place(0);
    return visited;
}

// ---------------------------------------------------------------------------
// Contraction

Contraction contract_edges(const Graph& G, const std::vector<int>& subset) {
    std::vector<char> in(G.ne(), 0);
    for (int e : subset) {
        if (e < 0 || e >= G.ne()) throw std::invalid_argument("contract_edges: bad edge index");
        in[e] = 1;
    }
    std::vector<int> p(G.nv());
    std::iota(p.begin(), p.end(), 0);
    for (int e = 0; e < G.ne(); ++e)
        if (in[e]) {
            int a = uf_find(p, G.edges[e][0]), b = uf_find(p, G.edges[e][1]);
            if (a != b) p[std::max(a, b)] = std::min(a, b);
        }
    Contraction out;
    out.vertex_map.assign(G.nv(), -1);
    std::vector<int> root_to_new(G.nv(), -1);
    int nv = 0;
    for (int v = 0; v < G.nv(); ++v) {
        int r = uf_find(p, v);
        if (root_to_new[r] < 0) root_to_new[r] = nv++;
        out.vertex_map[v] = root_to_new[r];
    }
    Graph& C = out.graph;
    C.genus.assign(nv, 0);
    C.degree.assign(nv, 0);
    std::vector<int> nverts(nv, 0), nedges(nv, 0);
    for (int v = 0; v < G.nv(); ++v) {
        int w = out.vertex_map[v];
        C.genus[w] += G.genus[v];
        C.degree[w] += G.degree[v];
        ++nverts[w];
    }
    for (int e = 0; e < G.ne(); ++e)
        if (in[e]) ++nedges[out.vertex_map[G.edges[e][0]]];
    for (int w = 0; w < nv; ++w) C.genus[w] += nedges[w] - nverts[w] + 1;
    for (int v : G.legs) C.legs.push_back(out.vertex_map[v]);
    out.half_edge_map.assign(G.nh(), -1);
    for (int i = 0; i < G.nl(); ++i) out.half_edge_map[i] = i;
    const int n = G.nl();
    for (int e = 0; e < G.ne(); ++e) {
        if (in[e]) continue;
        int k = C.ne();
        C.edges.push_back({out.vertex_map[G.edges[e][0]], out.vertex_map[G.edges[e][1]]});
        out.half_edge_map[G.edge_half(e, 0)] = n + 2 * k;
        out.half_edge_map[G.edge_half(e, 1)] = n + 2 * k + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

json graph_to_json(const Graph& G) {
    json j;
    j["vertices"] = json::array();
    for (int v = 0; v < G.nv(); ++v) j["vertices"].push_back({{"genus", G.genus[v]}, {"degree", G.degree[v]}});
    j["edges"] = json::array();
    for (auto& e : G.edges) j["edges"].push_back({e[0], e[1]});
    j["legs"] = G.legs;
    return j;
}

Graph graph_from_json(const json& j) {
    Graph G;
    for (auto& v : j.at("vertices")) {
        G.genus.push_back(v.at("genus").get<int>());
        G.degree.push_back(v.contains("degree") ? v.at("degree").get<int>() : 0);
    }
    for (auto& e : j.at("edges")) G.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    G.legs = j.at("legs").get<std::vector<int>>();
    G.validate();
    return G;
}

json deco_to_json(const Decoration& d) {
    json j;
    const int n = static_cast<int>(d.xi.size());
    std::vector<int> leg_psi(d.psi.begin(), d.psi.begin() + n);
    j["leg_psi"] = leg_psi;
    j["leg_xi"] = d.xi;
    j["edge_psi"] = json::array();
    for (size_t e = 0; e < d.exi.size(); ++e)
        j["edge_psi"].push_back({d.psi[n + 2 * e], d.psi[n + 2 * e + 1]});
    j["edge_xi"] = d.exi;
    j["vertex"] = json::array();
    for (auto& m : d.vmono) {
        json jm = json::array();
        for (auto& [a, b] : m) jm.push_back({a, b});
        j["vertex"].push_back(jm);
    }
    return j;
}

Decoration deco_from_json(const json& j, const Graph& G) {
    Decoration d = Decoration::zero(G);
    if (j.is_null()) return d;
    auto get_vec = [&](const char* name, std::vector<int>& out, size_t expect) {
        if (!j.contains(name)) return;
        auto v = j.at(name).get<std::vector<int>>();
        if (v.size() != expect) throw std::invalid_argument(std::string("decoration field size: ") + name);
        out = v;
    };
    std::vector<int> leg_psi(G.nl(), 0);
    get_vec("leg_psi", leg_psi, G.nl());
    for (int i = 0; i < G.nl(); ++i) d.psi[i] = leg_psi[i];
    get_vec("leg_xi", d.xi, G.nl());
    get_vec("edge_xi", d.exi, G.ne());
    if (j.contains("edge_psi")) {
        auto& ep = j.at("edge_psi");
        if (static_cast<int>(ep.size()) != G.ne()) throw std::invalid_argument("decoration field size: edge_psi");
        for (int e = 0; e < G.ne(); ++e) {
            d.psi[G.edge_half(e, 0)] = ep.at(e).at(0).get<int>();
            d.psi[G.edge_half(e, 1)] = ep.at(e).at(1).get<int>();
        }
    }
    if (j.contains("vertex")) {
        auto& jv = j.at("vertex");
        if (static_cast<int>(jv.size()) != G.nv()) throw std::invalid_argument("decoration field size: vertex");
        for (int v = 0; v < G.nv(); ++v) {
            for (auto& p : jv.at(v)) {
                int a = p.at(0).get<int>(), b = p.at(1).get<int>();
                if (a < 0 || b < 0 || a + b < 2) throw std::invalid_argument("vertex symbol needs a+b >= 2");
                d.vmono[v].push_back({a, b});
            }
            std::sort(d.vmono[v].begin(), d.vmono[v].end());
        }
    }
    for (int x : d.psi)
        if (x < 0) throw std::invalid_argument("negative psi exponent");
    for (int x : d.xi)
        if (x < 0) throw std::invalid_argument("negative xi exponent");
    for (int x : d.exi)
        if (x < 0) throw std::invalid_argument("negative xi exponent");
    return d;
}

std::string key_to_string(const Key& k) {
    std::ostringstream os;
    for (size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
    return os.str();
}

}  // namespace drc
