#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mhp/forest.hpp"

namespace mhp {

// One root-to-leaf hypothesis chain, the unit the selection stage works on.
struct TrackPath {
  std::vector<const HypothesisNode*> nodes;  // root first
  double total_weight = 0.0;                 // leaf's cumulative score
  bool annotation_rooted = false;

  int root_frame() const { return nodes.front()->frame(); }
  int leaf_frame() const { return nodes.back()->frame(); }
};

// Every root-to-leaf path of every tree, in deterministic traversal order
// (roots in creation order, children in attachment order).
std::vector<TrackPath> enumerate_paths(const HypothesisForest& forest);

// Conflict graph over paths: vertices are path indices, an edge joins two
// paths that claim the same detection (same frame and proposal id) -- in
// particular any two paths from the same tree.
struct ConflictGraph {
  std::vector<double> weights;
  std::vector<std::vector<int>> adjacency;  // sorted, symmetric

  std::size_t size() const { return weights.size(); }
  bool has_edge(int a, int b) const;
};

ConflictGraph build_conflict_graph(const std::vector<TrackPath>& paths);

// Canonical weight of a vertex set: summed in ascending index order, so
// the exact solver and the local search agree bit for bit.
double set_weight(const ConflictGraph& graph, const std::vector<int>& vertices);

// Exact maximum-weight independent set by branch and bound.  Only for
// small instances (throws above 24 vertices).  Among equal-weight optima
// returns the lexicographically smallest ascending index sequence.
std::vector<int> solve_exact(const ConflictGraph& graph);

// Phased local search: maximal-set growth under rotating selection rules
// (random / greedy / penalty-guided) with improving swaps and vertex
// penalties that reset every 100 iterations.  Deterministic for a given
// (graph, seed, max_iterations).  Never worse than greedy-by-weight.
// Stops early when every positive-weight vertex is already selected or
// the running best reaches `target_weight`.
std::vector<int> solve_pls(const ConflictGraph& graph, std::uint64_t seed,
                           int max_iterations,
                           std::optional<double> target_weight = std::nullopt);

// Commits to the selected paths everywhere older than the decision window:
// any node at frame <= current_frame - scan_depth that is not on a
// selected path is removed together with its subtree (dropping whole trees
// when their root goes).
void n_scan_prune(HypothesisForest& forest, const std::vector<TrackPath>& selected,
                  int scan_depth);

}  // namespace mhp
