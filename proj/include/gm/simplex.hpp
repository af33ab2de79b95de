#pragma once

#include <vector>

namespace gm {

// minimize objective . x  subject to
//   eq_rows[i] . x == eq_rhs[i],  ineq_rows[k] . x <= ineq_rhs[k],  x >= 0.
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ineq_rows;
  std::vector<double> ineq_rhs;
};

struct LpSolution {
  double value = 0.0;
  std::vector<double> x;
  // Optimality certificate: value == dual_eq.eq_rhs + dual_ineq.ineq_rhs up
  // to tolerance, dual_ineq <= 0, and objective - duals^T rows >= 0 columnwise.
  std::vector<double> dual_eq;
  std::vector<double> dual_ineq;
};

// Two-phase dense tableau simplex.  Dantzig pricing with a permanent switch
// to Bland's rule after a degenerate stall (which restores the termination
// guarantee); ratio-test ties break toward the lowest basic variable index.
// Redundant equality rows are detected via stuck artificials and dropped.
// Throws Infeasible, Unbounded, or IterationLimit (limit 0 picks a bound from
// the problem size), and NonFinite/BadArgument on malformed input.
LpSolution solve_lp(const LpProblem& p, long long iteration_limit = 0);

}  // namespace gm
