#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gm {

// Undirected simple graph on vertices 0..n-1 with a real feature vector of
// shared dimension d >= 1 attached to every vertex.  Edges are stored as
// (min,max) pairs, sorted ascending, without duplicates; self-loops are
// rejected.  `one_hot` records that the features are 0/1 indicator vectors
// (as produced by the TU-format reader from discrete node labels).
struct LabeledGraph {
  int n = 0;
  int d = 1;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<double>> features;  // n rows of length d
  bool one_hot = false;
};

// n copies of the constant vector [value]*d.
std::vector<std::vector<double>> uniform_features(int n, int d = 1, double value = 1.0);

// Canonicalizes edges (orients, sorts, deduplicates) and validates everything:
// vertex range, no self-loops, feature arity n x d with d >= 1, finite values.
LabeledGraph make_graph(int n, std::vector<std::pair<int, int>> edges,
                        std::vector<std::vector<double>> features, bool one_hot = false);

// make_graph with uniform [1]*d features.
LabeledGraph make_uniform_graph(int n, std::vector<std::pair<int, int>> edges, int d = 1);

// Convenience builders (uniform [1] features of dimension d).
LabeledGraph path_graph(int n, int d = 1);
LabeledGraph cycle_graph(int n, int d = 1);
LabeledGraph complete_graph(int n, int d = 1);
LabeledGraph star_graph(int leaves, int d = 1);  // vertex 0 is the center
LabeledGraph empty_graph(int n, int d = 1);

bool has_edge(const LabeledGraph& g, int u, int v);
void add_edge(LabeledGraph& g, int u, int v);     // EdgePresent if already there
void delete_edge(LabeledGraph& g, int u, int v);  // EdgeAbsent if missing
void set_feature(LabeledGraph& g, int v, const std::vector<double>& x);

std::vector<std::vector<double>> adjacency_matrix(const LabeledGraph& g);
std::vector<std::vector<int>> adjacency_lists(const LabeledGraph& g);  // sorted neighbors
int max_degree(const LabeledGraph& g);

// Appends isolated vertices with all-zero features until the order is target_n.
LabeledGraph pad_to_order(const LabeledGraph& g, int target_n);

// Vertices of h are shifted by g.n; feature dimensions must agree.
LabeledGraph disjoint_union(const LabeledGraph& g, const LabeledGraph& h);

// Relabels vertices: vertex v of g becomes perm[v].  perm must be a
// permutation of 0..n-1.  Used for isomorphic-copy construction in tests.
LabeledGraph permute_vertices(const LabeledGraph& g, const std::vector<int>& perm);

// Deterministic byte string identifying the graph exactly (structure plus the
// bit patterns of all feature entries).  Equal strings <=> identical graphs;
// also used to order argument pairs so symmetric metrics evaluate bitwise
// identically in either argument order.
std::string serialize(const LabeledGraph& g);

bool feature_is_zero(const std::vector<double>& x);

// A set of graphs sharing one feature dimension, with optional binary class
// labels (empty or one 0/1 entry per graph) and an origin tag per graph
// (dataset name + index, or a family member id).
struct GraphCollection {
  std::vector<LabeledGraph> graphs;
  std::vector<int> labels;
  std::vector<std::string> source_ids;
  int d = 1;
};

void validate(const GraphCollection& c);

}  // namespace gm
