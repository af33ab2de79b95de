#pragma once

#include <string>
#include <vector>

#include "gm/metrics.hpp"

namespace gm {

enum class CoverMethod { Greedy, Exact, ConstructionTree };

// An epsilon-cover of the collection behind a distance matrix, with centers
// drawn from the collection itself.
struct CoverResult {
  double epsilon = 0.0;
  CoverMethod method = CoverMethod::Greedy;
  std::vector<int> centers;     // collection indices, ascending for Greedy/Exact
  std::vector<int> assignment;  // per graph: collection index of its center
};

// Distances up to this slack count as inside a ball (and as zero when merging
// equivalence classes), absorbing LP noise in the underlying metric.
inline constexpr double kBallSlack = 1e-7;

// Greedy set cover over the balls B(x, epsilon): repeatedly take the ball
// covering the most uncovered equivalence classes (ties to the smallest
// index).  Zero-distance graphs are merged first, so the result size is an
// upper bound on the covering number and equals the class count at epsilon=0.
// Every graph is assigned to its nearest chosen center.
CoverResult greedy_cover(const DistanceMatrix& dm, double epsilon);

// Minimum-cardinality cover by branch and bound, starting from the greedy
// solution and pruning with an independent-point packing lower bound (no two
// packed points fit in one ball, so each needs its own center).  Requires the
// number of merged equivalence classes to be at most `limit`; throws TooLarge
// otherwise.
CoverResult exact_cover(const DistanceMatrix& dm, double epsilon, int limit = 25);

// Wraps an externally constructed grouping (e.g. merge_cover groups) as a
// cover: each group's smallest index becomes its center and members keep
// their group's center.  Groups must partition the collection and every
// member must lie within epsilon (+ slack) of its center.
CoverResult construction_cover(const DistanceMatrix& dm, double epsilon,
                               const std::vector<std::vector<int>>& groups);

// Nearest-center cells, one per center in center order; distance ties break
// toward the smallest center index.  Cell diameter is at most 2 epsilon up to
// metric tolerance.
std::vector<std::vector<int>> cover_to_partition(const CoverResult& c,
                                                 const DistanceMatrix& dm);

// JSON object {epsilon, method, centers, sizes, assignment}; sizes counts the
// graphs assigned to each center, aligned with `centers`.
void write_cover_json(const std::string& path, const CoverResult& c);

}  // namespace gm
