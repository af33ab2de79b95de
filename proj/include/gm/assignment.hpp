#pragma once

#include <vector>

namespace gm {

struct AssignmentResult {
  std::vector<int> assignment;  // row i is matched to column assignment[i]
  double cost = 0.0;
};

// Optimal assignment on a square cost matrix via shortest augmenting paths
// with potentials, O(m^3).  The algorithm uses only additions, subtractions,
// and comparisons of cost entries, so exactly-representable inputs (e.g.
// integers) are solved exactly.  Throws BadArgument on a non-square matrix
// and NonFinite on NaN or infinite entries.
AssignmentResult assignment(const std::vector<std::vector<double>>& cost);

}  // namespace gm
