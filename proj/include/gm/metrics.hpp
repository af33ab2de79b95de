#pragma once

#include <string>
#include <vector>

#include "gm/graph.hpp"
#include "gm/wl.hpp"

namespace gm {

// All six distances are pseudo-metrics on equally-sized graphs with features
// of a shared dimension; each evaluates its two arguments in a canonical
// order (by serialized bytes), so d(g,h) and d(h,g) run bit-identical
// arithmetic.

// Distance between the depth-L walk-tree forests of g and h: an optimal
// assignment of trees to trees, where matched trees pay their root feature
// difference (Euclidean) plus a recursively-matched child transport, with
// child lists padded by zero-labeled blanks.  `omega` weights the child
// transport at each recursion step by omega[r-1], r = deeper remaining depth
// of the two subtrees (empty = all ones, the default everywhere).
// Equals tree_mover_distance for every omega; zero exactly on pairs that the
// plain refinement cannot distinguish within L iterations.
double forest_distance(const LabeledGraph& g, const LabeledGraph& h, int depth,
                       const std::vector<double>& omega = {});

// Independent reference implementation on explicitly unrolled trees with no
// memoization or subtree sharing (the tree-mover construction: optimal
// transport of root multisets, blank-padded child transports recursively).
double tree_mover_distance(const LabeledGraph& g, const LabeledGraph& h, int depth,
                           const std::vector<double>& omega = {});

// Same transport distance on mean-pruned walk trees whose node features are
// divided by their integer branch scale; zero exactly on pairs the mean
// refinement cannot distinguish within L iterations.
double mean_forest_distance(const LabeledGraph& g, const LabeledGraph& h, int depth);

// min over vertex bijections sigma of
//   sum_{i,k} |A(g)_{ik} - A(h)_{sigma(i) sigma(k)}|
//   + sum_i ||feature_g(i) - feature_h(sigma(i))||_2,
// i.e. the entrywise-1-norm adjacency alignment plus a feature alignment
// term.  Exact branch-and-bound; orders up to 10 (TooLargeForExact beyond).
double delta_perm_1(const LabeledGraph& g, const LabeledGraph& h);

// The doubly-stochastic relaxation of delta_perm_1:
//   min_S  ||A(g) S - S A(h)||_1 + sum_{ij} S_ij ||feature_g(i)-feature_h(j)||_2
// over doubly-stochastic S, solved as an LP (P/Q split of the residual).
// Orders up to 32 (TooLarge beyond).  Zero (within LP tolerance) exactly on
// refinement-indistinguishable pairs.
double delta_ds_1(const LabeledGraph& g, const LabeledGraph& h);

// 0 when the plain refinement cannot distinguish g from h at the given depth,
// else 1.
double wl_trivial_metric(const LabeledGraph& g, const LabeledGraph& h,
                         int depth = kStableDepth);

enum class MetricKind {
  ForestDistance,
  TreeMover,
  MeanForest,
  DeltaPerm1,
  DeltaDS1,
  WlTrivial,
};

struct MetricSpec {
  MetricKind kind = MetricKind::ForestDistance;
  int depth = 1;                // kStableDepth uses the graph order as bound
  std::vector<double> omega;    // empty = all ones; ignored by the deltas
};

double evaluate_metric(const MetricSpec& spec, const LabeledGraph& g,
                       const LabeledGraph& h);

struct DistanceMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> values;  // symmetric, zero diagonal
};

// All-pairs distances of a collection.  Pairs are evaluated independently (in
// parallel when OpenMP is enabled; `threads` > 0 fixes the team size), and
// results are bitwise identical to the serial reference.  A failing pair
// aborts the computation with its pair index in the error message.
DistanceMatrix distance_matrix(const GraphCollection& c, const MetricSpec& spec,
                               int threads = 0);
DistanceMatrix distance_matrix_serial(const GraphCollection& c, const MetricSpec& spec);

void write_distance_matrix_csv(const std::string& path, const DistanceMatrix& dm);
void write_distance_matrix_json(const std::string& path, const DistanceMatrix& dm);

}  // namespace gm
