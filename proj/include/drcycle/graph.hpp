#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace drc {

using json = nlohmann::json;

// Prestable graph with optional multidegree.
//
// Half-edges are numbered: legs 0..n-1 (leg i carries marking i+1), then
// edge e owns half-edges n+2e and n+2e+1, attached to edges[e][0] and
// edges[e][1]. The involution swaps n+2e <-> n+2e+1 and fixes legs.
struct Graph {
    std::vector<int> genus;
    std::vector<int> degree;  // multidegree; all zero when unused
    std::vector<std::array<int, 2>> edges;
    std::vector<int> legs;

    Graph() = default;
    Graph(std::vector<int> genus_, std::vector<std::array<int, 2>> edges_, std::vector<int> legs_,
          std::vector<int> degree_ = {});

    int nv() const { return static_cast<int>(genus.size()); }
    int ne() const { return static_cast<int>(edges.size()); }
    int nl() const { return static_cast<int>(legs.size()); }
    int nh() const { return nl() + 2 * ne(); }

    int he_vertex(int h) const;
    int he_partner(int h) const;
    int he_edge(int h) const { return h < nl() ? -1 : (h - nl()) / 2; }
    int edge_half(int e, int side) const { return nl() + 2 * e + side; }

    std::vector<std::vector<int>> half_edges_at() const;  // sorted per vertex
    std::vector<int> valence() const;                     // all half-edges incl. legs
    int h1() const { return ne() - nv() + 1; }
    int total_genus() const;
    int total_degree() const;
    bool connected() const;
    bool stable() const;
    bool is_tree() const { return h1() == 0; }

    // Edge is separating iff removing it disconnects the graph.
    bool edge_separating(int e) const;

    // Half-edge vertex map and involution in explicit form.
    std::vector<int> vertex_map() const;
    std::vector<int> involution() const;

    // Throws std::invalid_argument on malformed data.
    void validate() const;

    bool operator==(const Graph& o) const = default;
};

// Per-vertex monomial in eta_{a,b}; stored as a sorted multiset of (a,b).
// kappa_m is eta_{m+1,0}; eta = eta_{0,2}. Scalars eta_{1,0}, eta_{0,1}
// never appear: they are replaced by numbers on construction.
using VertexMono = std::vector<std::pair<int, int>>;

struct Decoration {
    std::vector<int> psi;    // per half-edge
    std::vector<int> xi;     // per leg
    std::vector<int> exi;    // per edge
    std::vector<VertexMono> vmono;

    static Decoration zero(const Graph& G);
    int degree() const;
    bool is_trivial() const { return degree() == 0; }
    bool has_pic_symbols() const;  // any xi or eta_{a,b} with b > 0
    bool operator==(const Decoration& o) const = default;
};

void mono_multiply(VertexMono& m, const VertexMono& other);
int mono_degree(const VertexMono& m);

Decoration deco_multiply(const Decoration& a, const Decoration& b);

struct Stratum {
    Graph graph;
    Decoration deco;

    Stratum() = default;
    explicit Stratum(Graph G) : graph(std::move(G)), deco(Decoration::zero(graph)) {}
    Stratum(Graph G, Decoration D) : graph(std::move(G)), deco(std::move(D)) {}

    int codim() const { return graph.ne() + deco.degree(); }
};

using Key = std::vector<int>;

struct CanonicalForm {
    Key key;
    Stratum stratum;                     // relabeled representative
    std::vector<int> vertex_map;         // original vertex -> canonical vertex
    std::vector<int> half_edge_map;      // original half-edge -> canonical half-edge
    std::int64_t aut_order = 1;
    std::vector<std::vector<int>> aut_generators;  // half-edge permutations, canonical labels
};

// Canonical labeling of a decorated graph (color refinement followed by
// individualization over residual cells).
CanonicalForm canonicalize(const Stratum& s, bool with_generators = false);
CanonicalForm canonicalize(const Graph& G, bool with_generators = false);

// Cheap path: key and automorphism order only.
Key canonical_key(const Stratum& s);
std::pair<Key, std::int64_t> canonical_key_aut(const Stratum& s);

Stratum decode_key(const Key& key);

// True iff the half-edge permutation preserves graph, legs and decorations.
bool is_automorphism(const Stratum& s, const std::vector<int>& half_edge_perm);

// Enumerate isomorphisms G -> H preserving genus, degree, legs (decorations
// ignored). Callback receives (vertex map, half-edge map) and returns false
// to stop. Returns the number of isomorphisms visited.
std::int64_t for_each_isomorphism(
    const Graph& G, const Graph& H,
    const std::function<bool(const std::vector<int>&, const std::vector<int>&)>& cb);

struct Contraction {
    Graph graph;
    std::vector<int> vertex_map;     // old vertex -> new vertex
    std::vector<int> half_edge_map;  // old half-edge -> new half-edge, -1 if contracted
};

Contraction contract_edges(const Graph& G, const std::vector<int>& edge_subset);

json graph_to_json(const Graph& G);
Graph graph_from_json(const json& j);
json deco_to_json(const Decoration& d);
Decoration deco_from_json(const json& j, const Graph& G);

std::string key_to_string(const Key& k);

}  // namespace drc
