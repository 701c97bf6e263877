#include "drcycle/weightings.hpp"

#include <cstdlib>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace drc {

namespace {

long long mod(long long x, long long r) {
    long long m = x % r;
    return m < 0 ? m + r : m;
}

}  // namespace

HalfEdgeSystem::HalfEdgeSystem(const Graph& G, std::vector<long long> vertex_target, std::vector<int> A)
    : G_(G), target_(std::move(vertex_target)), A_(std::move(A)) {
    if (static_cast<int>(A_.size()) != G_.nl()) throw std::invalid_argument("weighting: |A| != number of legs");
    if (static_cast<int>(target_.size()) != G_.nv()) throw std::invalid_argument("weighting: target size");
    at_ = G_.half_edges_at();
    up_.assign(G_.nv(), -1);
    std::vector<char> seen(G_.nv(), 0), tree_edge(G_.ne(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        order_.push_back(v);
        for (int h : at_[v]) {
            int e = G_.he_edge(h);
            if (e < 0) continue;
            int u = G_.he_vertex(G_.he_partner(h));
            if (seen[u]) continue;
            seen[u] = 1;
            tree_edge[e] = 1;
            up_[u] = G_.he_partner(h);
            q.push(u);
        }
    }
    for (int e = 0; e < G_.ne(); ++e)
        if (!tree_edge[e]) free_edges_.push_back(e);
}

bool HalfEdgeSystem::solve(const std::vector<long long>& fv, long long r, std::vector<long long>& w) const {
    const int n = G_.nl();
    w.assign(G_.nh(), 0);
    std::vector<char> known(G_.nh(), 0);
    auto norm = [&](long long x) { return r > 0 ? mod(x, r) : x; };
    for (int i = 0; i < n; ++i) {
        w[i] = norm(A_[i]);
        known[i] = 1;
    }
    for (size_t j = 0; j < free_edges_.size(); ++j) {
        int e = free_edges_[j];
        int h0 = G_.edge_half(e, 0), h1 = G_.edge_half(e, 1);
        w[h0] = norm(fv[j]);
        w[h1] = norm(-fv[j]);
        known[h0] = known[h1] = 1;
    }
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        int v = *it;
        if (up_[v] < 0) continue;
        long long s = 0;
        for (int h : at_[v])
            if (h != up_[v]) s += w[h];
        int h = up_[v];
        w[h] = norm(target_[v] - s);
        w[G_.he_partner(h)] = norm(-(target_[v] - s));
    }
    int root = order_.front();
    long long s = 0;
    for (int h : at_[root]) s += w[h];
    if (r > 0) return mod(s - target_[root], r) == 0;
    return s == target_[root];
}

bool HalfEdgeSystem::feasible_mod(int r) const {
    long long lhs = 0, rhs = 0;
    for (int a : A_) lhs += a;
    for (long long t : target_) rhs += t;
    return mod(lhs - rhs, r) == 0;
}

bool HalfEdgeSystem::feasible_exact() const {
    long long lhs = 0, rhs = 0;
    for (int a : A_) lhs += a;
    for (long long t : target_) rhs += t;
    return lhs == rhs;
}

std::vector<long long> degree_targets(const Graph& G) {
    return std::vector<long long>(G.degree.begin(), G.degree.end());
}

std::vector<long long> target_vertex_values(const Graph& G, int k) {
    auto val = G.valence();
    std::vector<long long> out(G.nv());
    for (int v = 0; v < G.nv(); ++v)
        out[v] = static_cast<long long>(k) * (2 * G.genus[v] - 2 + val[v]) + G.degree[v];
    return out;
}

std::vector<long long> canonical_multidegree(const Graph& G, int k) {
    std::vector<int> nodes(G.nv(), 0);
    for (auto& e : G.edges) {
        ++nodes[e[0]];
        ++nodes[e[1]];
    }
    std::vector<long long> out(G.nv());
    for (int v = 0; v < G.nv(); ++v) out[v] = static_cast<long long>(k) * (2 * G.genus[v] - 2 + nodes[v]);
    return out;
}

namespace {

WeightingSet collect(const HalfEdgeSystem& sys, int r) {
    if (r < 1) throw std::invalid_argument("weightings: r must be positive");
    WeightingSet out;
    out.r = r;
    out.feasible = for_each_weighting(sys, r, [&](const std::vector<long long>& w) {
        out.w.emplace_back(w.begin(), w.end());
    });
    return out;
}

}  // namespace

WeightingSet enumerate_weightings(const Graph& G, const std::vector<int>& A, int r) {
    return collect(HalfEdgeSystem(G, degree_targets(G), A), r);
}

WeightingSet enumerate_target_weightings(const Graph& G, const std::vector<int>& A, int r, int k) {
    return collect(HalfEdgeSystem(G, target_vertex_values(G, k), A), r);
}

// ---------------------------------------------------------------------------
// Twists

int default_twist_bound(const Graph& G, const std::vector<int>& A) {
    int b = 0;
    for (int a : A) b += std::abs(a);
    for (int d : G.degree) b += std::abs(d);
    return b;
}

std::optional<std::vector<int>> level_function(const Graph& G, const Twist& I) {
    const int V = G.nv();
    std::vector<int> p(V);
    std::iota(p.begin(), p.end(), 0);
    std::function<int(int)> find = [&](int x) { return p[x] == x ? x : p[x] = find(p[x]); };
    for (int e = 0; e < G.ne(); ++e)
        if (I[G.edge_half(e, 0)] == 0) p[find(G.edges[e][0])] = find(G.edges[e][1]);
    std::vector<std::vector<int>> succ(V);
    std::vector<int> indeg(V, 0);
    for (int e = 0; e < G.ne(); ++e) {
        for (int side = 0; side < 2; ++side) {
            int h = G.edge_half(e, side);
            if (I[h] <= 0) continue;
            int a = find(G.he_vertex(h)), b = find(G.he_vertex(G.he_partner(h)));
            if (a == b) return std::nullopt;
            succ[a].push_back(b);
            ++indeg[b];
        }
    }
    std::vector<int> level(V, 0), queue;
    for (int c = 0; c < V; ++c)
        if (find(c) == c && indeg[c] == 0) queue.push_back(c);
    int classes = 0;
    for (int c = 0; c < V; ++c)
        if (find(c) == c) ++classes;
    int done = 0;
    for (size_t i = 0; i < queue.size(); ++i) {
        int c = queue[i];
        ++done;
        for (int d : succ[c]) {
            level[d] = std::max(level[d], level[c] + 1);
            if (--indeg[d] == 0) queue.push_back(d);
        }
    }
    if (done != classes) return std::nullopt;
    std::vector<int> out(V);
    for (int v = 0; v < V; ++v) out[v] = level[find(v)];
    return out;
}

bool check_level_function(const Graph& G, const Twist& I, const std::vector<int>& level) {
    for (int e = 0; e < G.ne(); ++e)
        for (int side = 0; side < 2; ++side) {
            int h = G.edge_half(e, side);
            int u = G.he_vertex(h), v = G.he_vertex(G.he_partner(h));
            if (I[h] == 0 && level[u] != level[v]) return false;
            if (I[h] > 0 && !(level[v] > level[u])) return false;
        }
    return true;
}

std::vector<Twist> find_twists(const Graph& G, const std::vector<int>& A, int bound) {
    if (bound < 0) bound = default_twist_bound(G, A);
    HalfEdgeSystem sys(G, degree_targets(G), A);
    if (!sys.feasible_exact()) throw std::invalid_argument("find_twists: sum of A differs from total degree");
    std::vector<Twist> out;
    const int k = sys.num_free();
    std::vector<long long> fv(k, -bound), w;
    while (true) {
        if (sys.solve(fv, 0, w)) {
            bool ok = true;
            for (int h = G.nl(); h < G.nh(); ++h)
                if (std::llabs(w[h]) > bound) ok = false;
            if (ok) {
                Twist I(w.begin(), w.end());
                auto lv = level_function(G, I);
                if (lv && check_level_function(G, I, *lv)) out.push_back(std::move(I));
            }
        }
        int i = 0;
        while (i < k && ++fv[i] > bound) fv[i++] = -bound;
        if (i == k) break;
    }
    return out;
}

json weighting_to_json(const std::vector<int>& w) { return json(w); }

}  // namespace drc
