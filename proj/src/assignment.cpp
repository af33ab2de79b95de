#include "gm/assignment.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gm/error.hpp"

namespace gm {

AssignmentResult assignment(const std::vector<std::vector<double>>& cost) {
  const int m = static_cast<int>(cost.size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != m)
      fail(Errc::BadArgument, "cost matrix must be square");
    for (double c : row)
      if (!std::isfinite(c)) fail(Errc::NonFinite, "non-finite cost entry");
  }
  if (m == 0) return {{}, 0.0};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start of each augmenting path.
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0);  // match[j] = row occupying column j
  std::vector<int> way(m + 1, 0);
  for (int i = 1; i <= m; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    for (; j0 != 0;) {  // walk the augmenting path backwards
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    }
  }

  AssignmentResult result;
  result.assignment.assign(m, -1);
  for (int j = 1; j <= m; ++j) result.assignment[match[j] - 1] = j - 1;
  for (int i = 0; i < m; ++i) result.cost += cost[i][result.assignment[i]];
  return result;
}

}  // namespace gm
