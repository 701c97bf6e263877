#pragma once

#include <optional>
#include <vector>

#include "drcycle/graph.hpp"

namespace drc {

struct DegreeSpec {
    int d = 0;
    int bound = 0;  // |delta(v)| <= bound
};

struct EnumOptions {
    bool stable_only = false;
    std::optional<DegreeSpec> degree;
};

// One canonical representative per isomorphism class of connected
// prestable graphs of genus g with n legs and at most max_edges edges,
// sorted by canonical key. Without a degree spec all degrees are zero.
std::vector<Graph> enumerate_graphs(int g, int n, int max_edges, const EnumOptions& opts = {});

// Same, memoized (thread-safe). The reference stays valid for the process lifetime.
const std::vector<Graph>& enumerate_graphs_cached(int g, int n, int max_edges, const EnumOptions& opts = {});

bool stability_filter(const Graph& G);

}  // namespace drc
