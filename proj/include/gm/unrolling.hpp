#pragma once

#include <string>
#include <vector>

#include "gm/graph.hpp"

namespace gm {

// Rooted tree with a feature-vector label per node.  Node 0 is the root;
// children lists are kept in canonical order (sorted by subtree code), so two
// trees are label-isomorphic exactly when their structures match nodewise.
struct RootedTree {
  int root = 0;
  std::vector<std::vector<int>> children;
  std::vector<std::vector<double>> labels;
  int depth = 0;  // deepest node level
};

inline int tree_size(const RootedTree& t) { return static_cast<int>(t.labels.size()); }

// Walk tree of g started at `root`: the children of a node that stands for a
// walk ending in v are all neighbors of v (backtracking included), repeated to
// `depth` levels.  Throws ForestTooLarge beyond `max_nodes`.
RootedTree unroll(const LabeledGraph& g, int root, int depth,
                  long long max_nodes = 10'000'000);

// Collapses repeated child subtrees: per node, children are grouped by
// canonical code and each multiplicity is divided by the group gcd (bottom-up,
// so deeper levels collapse first).  Idempotent; at least one copy of every
// child type survives, so leaf depths are preserved.
RootedTree mean_prune(const RootedTree& t);

// Canonical byte string: "(" ++ exact label bytes ++ sorted child codes ++ ")".
// Equal codes <=> label-isomorphic trees.
std::string canonical_code(const RootedTree& t);

// Human-readable "(label(child)(child)...)" rendering for debugging.
std::string debug_string(const RootedTree& t);

// Integer scale per node: s(root) = 1, s(child) = s(parent) * (number of
// children of the parent).  On a mean-pruned tree this is the factor by which
// a node's feature is divided in the mean-walk-tree construction.
std::vector<long long> branch_scaling(const RootedTree& t);

enum class Aggregation { Sum, Mean };

// One tree per graph vertex, zero-padded to the complete (n-1)-ary shape of
// the given depth: every node above the last level has exactly n-1 children,
// missing ones are filled with all-zero-labeled complete subtrees.  For Mean,
// trees are mean-pruned first and labels are divided by their branch scale;
// `scaling` keeps the integer scales (1 on padded nodes) so the raw label of
// a real node is labels[i] * scaling[i].
struct PaddedForest {
  int n = 0;      // number of trees == graph order
  int depth = 0;  // padded depth
  int arity = 0;  // n - 1
  Aggregation mode = Aggregation::Sum;
  std::vector<RootedTree> trees;
  std::vector<std::vector<long long>> scaling;  // Mean only; per tree, per node
};

// Requires n >= 2.  Throws ForestTooLarge when the padded forest would exceed
// max_nodes nodes in total.
PaddedForest build_forest(const LabeledGraph& g, int depth, Aggregation mode,
                          long long max_nodes = 10'000'000);

}  // namespace gm
