#include "drcycle/enumerate.hpp"

#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <tuple>

namespace drc {

bool stability_filter(const Graph& G) { return G.stable(); }

namespace {

void genus_compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == parts - 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int x = 0; x <= total; ++x) {
        cur.push_back(x);
        genus_compositions(total - x, parts, cur, out);
        cur.pop_back();
    }
}

// Missing half-edges for stability at each vertex.
int stability_deficit(const Graph& G) {
    auto val = G.valence();
    int need = 0;
    for (int v = 0; v < G.nv(); ++v) {
        int min_val = G.genus[v] == 0 ? 3 : (G.genus[v] == 1 ? 1 : 0);
        if (val[v] < min_val) need += min_val - val[v];
    }
    return need;
}

std::vector<Graph> skeletons(int g, int n, int max_edges, bool stable_only) {
    std::set<Key> seen;
    std::vector<Graph> out;
    for (int E = 0; E <= max_edges; ++E) {
        for (int V = 1; V <= E + 1; ++V) {
            int h1 = E - V + 1;
            int g0 = g - h1;
            if (g0 < 0) continue;
            std::vector<std::array<int, 2>> pairs;
            for (int i = 0; i < V; ++i)
                for (int j = i; j < V; ++j) pairs.push_back({i, j});
            std::vector<std::vector<int>> gens;
            std::vector<int> cur;
            genus_compositions(g0, V, cur, gens);
            std::vector<std::array<int, 2>> chosen;
            std::function<void(size_t)> pick = [&](size_t start) {
                if (static_cast<int>(chosen.size()) == E) {
                    for (auto& gv : gens) {
                        Graph G(gv, chosen, {});
                        if (!G.connected()) return;
                        if (stable_only && stability_deficit(G) > n) continue;
                        Key k = canonical_key(Stratum(G));
                        if (seen.insert(k).second) out.push_back(decode_key(k).graph);
                    }
                    return;
                }
                for (size_t p = start; p < pairs.size(); ++p) {
                    chosen.push_back(pairs[p]);
                    pick(p);
                    chosen.pop_back();
                }
            };
            pick(0);
        }
    }
    return out;
}

}  // namespace

std::vector<Graph> enumerate_graphs(int g, int n, int max_edges, const EnumOptions& opts) {
    if (g < 0 || n < 0) throw std::invalid_argument("enumerate_graphs: negative genus or marking count");
    if (g == 1 && n == 0) throw std::invalid_argument("enumerate_graphs: (g,n)=(1,0) is excluded");
    if (max_edges < 0) throw std::invalid_argument("enumerate_graphs: negative edge bound");
    if (opts.degree && opts.degree->bound < 0) throw std::invalid_argument("enumerate_graphs: negative degree bound");

    std::map<Key, Graph> legged;
    for (const Graph& S : skeletons(g, n, max_edges, opts.stable_only)) {
        const int V = S.nv();
        std::vector<int> legs(n, 0);
        while (true) {
            Graph G = S;
            G.legs = legs;
            if (!opts.stable_only || G.stable()) {
                Key k = canonical_key(Stratum(G));
                if (!legged.count(k)) legged.emplace(k, decode_key(k).graph);
            }
            int i = 0;
            while (i < n && ++legs[i] == V) legs[i++] = 0;
            if (i == n) break;
        }
    }
    std::vector<Graph> out;
    if (!opts.degree) {
        for (auto& [k, G] : legged) out.push_back(G);
        return out;
    }
    const int B = opts.degree->bound, d = opts.degree->d;
    std::map<Key, Graph> withdeg;
    for (auto& [k0, G0] : legged) {
        const int V = G0.nv();
        std::vector<int> deg(V, -B);
        while (true) {
            int rest = d;
            for (int v = 0; v + 1 < V; ++v) rest -= deg[v];
            if (rest >= -B && rest <= B) {
                Graph G = G0;
                G.degree = deg;
                G.degree[V - 1] = rest;
                Key k = canonical_key(Stratum(G));
                if (!withdeg.count(k)) withdeg.emplace(k, decode_key(k).graph);
            }
            int i = 0;
            while (i < V - 1 && ++deg[i] > B) deg[i++] = -B;
            if (i >= V - 1) break;
        }
    }
    for (auto& [k, G] : withdeg) out.push_back(G);
    return out;
}

const std::vector<Graph>& enumerate_graphs_cached(int g, int n, int max_edges, const EnumOptions& opts) {
    using CacheKey = std::tuple<int, int, int, bool, bool, int, int>;
    static std::mutex mu;
    static std::map<CacheKey, std::vector<Graph>> cache;
    CacheKey ck{g, n, max_edges, opts.stable_only, opts.degree.has_value(),
                opts.degree ? opts.degree->d : 0, opts.degree ? opts.degree->bound : 0};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(ck);
        if (it != cache.end()) return it->second;
    }
    auto result = enumerate_graphs(g, n, max_edges, opts);
    std::lock_guard<std::mutex> lk(mu);
    return cache.emplace(ck, std::move(result)).first->second;
}

}  // namespace drc
