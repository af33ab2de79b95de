#pragma once

#include <vector>

#include "gm/graph.hpp"
#include "gm/wl.hpp"

namespace gm {

// Enumerable graph families, each delivered as one representative per
// isomorphism class:
//   AllGraphs            every unlabeled graph of order n (n <= 7)
//   AllGraphsUpTo        every unlabeled graph of order 1..n (n <= 7)
//   OtterTrees           unordered full binary trees: odd order n = 2j+1,
//                        root of degree 2, other vertices of degree 1 or 3
//                        (n <= 21)
//   PartitionPaths       a path of order n attached by one cross edge to a
//                        disjoint union of paths realizing a partition of n,
//                        over all partitions and attachment points (n <= 14)
//   BoundedDegreeLabeled graphs of order n with maximum degree <= q and
//                        one-hot vertex labels from an alphabet of size d
//                        (n <= 7, d <= 8)
enum class FamilyKind {
  AllGraphs,
  AllGraphsUpTo,
  OtterTrees,
  PartitionPaths,
  BoundedDegreeLabeled,
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::AllGraphs;
  int n = 0;
  int d = 1;  // BoundedDegreeLabeled only
  int q = 0;  // BoundedDegreeLabeled only
};

// Deterministic enumeration, deduplicated by exhaustive-permutation canonical
// forms (tree families by canonical codes).  Source ids are "<tag>#<index>".
GraphCollection enumerate_family(const FamilySpec& spec);

// Exhaustive isomorphism test respecting features bit-for-bit; orders up to 8
// (TooLargeForExact beyond).
bool isomorphic(const LabeledGraph& g, const LabeledGraph& h);

// Number of unordered full binary trees with j internal vertices (2j+1
// vertices in total); standard even/odd recurrence over root-subtree splits.
// Overflow of the 64-bit result is reported as TooLarge.
long long wedderburn_etherington(int j);

// All multisets of positive integers summing to n, each sorted descending,
// in descending lexicographic order.
std::vector<std::vector<int>> integer_partitions(int n);

// The PartitionPaths family with its per-partition grouping: group i holds
// the ceil(n/2) members built from partitions[i], pairwise non-isomorphic,
// any two differing by at most two edge edits.
struct PartitionPathFamily {
  GraphCollection collection;
  std::vector<std::vector<int>> partitions;  // descending parts
  std::vector<std::vector<int>> groups;      // indices into collection
};
PartitionPathFamily partition_path_family(int n);

// A rooted spanning tree over the refinement-quotient classes of a family in
// which every parent-child pair of classes is realizable by a single edit:
// for AllGraphs one edge deletion walking down from the complete graph; for
// BoundedDegreeLabeled one edge addition or one feature change walking up
// from the uniformly-labeled empty graph.  When several parents could claim
// a class, the first in breadth-first order wins.
struct CoverTree {
  FamilySpec family;
  int depth = kStableDepth;                 // refinement iteration bound
  std::vector<LabeledGraph> representative;  // one graph per class
  std::vector<int> parent;                   // -1 at the root
  std::vector<int> level;                    // edits from the root
};
CoverTree cover_tree(const FamilySpec& spec, int depth);

// Groups the classes of a cover tree so that every group holds >= k+1 classes
// (hence at most floor(m/(k+1)) groups when m > k) and any two classes in a
// group are within 2k tree edges of each other.  Groups are disjoint and
// exhaustive.  A tree smaller than k+1 classes yields a single group.
std::vector<std::vector<int>> merge_cover(const CoverTree& tree, int k);

}  // namespace gm
