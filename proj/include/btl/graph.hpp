#pragma once

#include <vector>

#include "btl/model.hpp"

namespace btl {

// Graph view of a comparison dataset.
//   directed:  edge i -> j iff item i beat item j at least once
//   mutual:    undirected edge iff both directions exist (0 < mu_ij < 1)
//   observed:  undirected edge iff the pair was compared at all (counts > 0)
struct ComparisonGraph {
    int d = 0;
    std::vector<std::vector<int>> directed;
    std::vector<std::vector<int>> mutual;
    std::vector<std::vector<int>> observed;
};

ComparisonGraph build_comparison_graph(const ComparisonData& data);

// Iterative Tarjan; safe for graphs with thousands of nodes.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency);

// True iff every node reaches every other along directed edges. Governs
// existence of a finite unconstrained maximum-likelihood solution.
bool is_strongly_connected(const ComparisonGraph& g);

// Connectivity of the observed-pair graph; the identifiability requirement
// for the box-constrained fits and the discard rule for random designs.
bool is_connected_undirected(const ComparisonGraph& g);

}  // namespace btl
