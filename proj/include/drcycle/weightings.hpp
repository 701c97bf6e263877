#pragma once

#include <optional>
#include <vector>

#include "drcycle/graph.hpp"

namespace drc {

// Linear constraint system on half-edge values:
//   w(leg i) = a_i, w(h) + w(h') = 0, sum_{h at v} w(h) = target(v),
// solved either mod r or over the integers. Free variables sit on the
// non-tree edges of a BFS spanning tree; everything else is propagated.
class HalfEdgeSystem {
public:
    HalfEdgeSystem(const Graph& G, std::vector<long long> vertex_target, std::vector<int> A);

    int num_free() const { return static_cast<int>(free_edges_.size()); }
    bool feasible_mod(int r) const;
    bool feasible_exact() const;

    // Fill w (size nh) from free values; returns false if the root
    // condition fails. With r > 0 values are reduced to [0, r).
    bool solve(const std::vector<long long>& free_vals, long long r, std::vector<long long>& w) const;

    const Graph& graph() const { return G_; }

private:
    Graph G_;
    std::vector<long long> target_;
    std::vector<int> A_;
    std::vector<int> order_;      // BFS order
    std::vector<int> up_;         // half-edge at v of the tree edge to the parent (-1 at root)
    std::vector<int> free_edges_;
    std::vector<std::vector<int>> at_;
};

struct WeightingSet {
    bool feasible = false;
    int r = 0;
    std::vector<std::vector<int>> w;  // per weighting, values per half-edge
};

// Visit every weighting mod r; returns false if infeasible.
template <class F>
bool for_each_weighting(const HalfEdgeSystem& sys, int r, F&& f) {
    if (!sys.feasible_mod(r)) return false;
    const int k = sys.num_free();
    std::vector<long long> fv(k, 0), w;
    while (true) {
        sys.solve(fv, r, w);
        f(w);
        int i = 0;
        while (i < k && ++fv[i] == r) fv[i++] = 0;
        if (i == k) break;
    }
    return true;
}

std::vector<long long> degree_targets(const Graph& G);
// k(2g(v) - 2 + n(v)) + beta(v), n(v) counting all half-edges at v; beta = G.degree.
std::vector<long long> target_vertex_values(const Graph& G, int k);
// k-twisted canonical multidegree on a stable graph: k(2g(v) - 2 + #edge half-edges at v).
std::vector<long long> canonical_multidegree(const Graph& G, int k);

WeightingSet enumerate_weightings(const Graph& G, const std::vector<int>& A, int r);
WeightingSet enumerate_target_weightings(const Graph& G, const std::vector<int>& A, int r, int k);

// ---------------------------------------------------------------------------
// Twists

using Twist = std::vector<int>;  // per half-edge

int default_twist_bound(const Graph& G, const std::vector<int>& A);

// All twists with |I(h)| <= bound that admit a level function. bound < 0
// selects the default bound.
std::vector<Twist> find_twists(const Graph& G, const std::vector<int>& A, int bound = -1);

// Level function l: V -> Z with l equal across I = 0 edges and strictly
// increasing along half-edges with I > 0; nullopt iff a strict cycle exists.
std::optional<std::vector<int>> level_function(const Graph& G, const Twist& I);
bool check_level_function(const Graph& G, const Twist& I, const std::vector<int>& level);

json weighting_to_json(const std::vector<int>& w);

}  // namespace drc
