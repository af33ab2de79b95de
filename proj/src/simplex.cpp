#include "gm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gm/error.hpp"

namespace gm {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kFeasEps = 1e-7;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite_row(const std::vector<double>& row) {
  for (double x : row)
    if (!std::isfinite(x)) fail(Errc::NonFinite, "non-finite coefficient");
}

struct Tableau {
  int n = 0;        // structural variables
  int n_slack = 0;  // one per inequality row
  int cols = 0;     // structural + slack + artificial + rhs
  int rhs = 0;
  std::vector<std::vector<double>> t;  // one vector per surviving row
  std::vector<int> basis;              // basic column per row
  std::vector<int> origin;             // original row index per surviving row
  std::vector<double> r;               // reduced costs; r[rhs] == -objective
  bool bland = false;
  int stall = 0;
  long long iterations_left = 0;

  int rows() const { return static_cast<int>(t.size()); }
  bool is_artificial(int col) const { return col >= n + n_slack; }

  void pivot(int pr, int pc) {
    auto& prow = t[pr];
    const double pv = prow[pc];
    for (double& x : prow) x /= pv;
    prow[pc] = 1.0;  // cut roundoff drift on the pivot itself
    for (int i = 0; i < rows(); ++i) {
      if (i == pr) continue;
      const double f = t[i][pc];
      if (f == 0.0) continue;
      auto& row = t[i];
      for (int j = 0; j < cols; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
    const double f = r[pc];
    if (f != 0.0) {
      for (int j = 0; j < cols; ++j) r[j] -= f * prow[j];
      r[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  void rebuild_costs(const std::vector<double>& cost) {  // cost per column
    r.assign(cols, 0.0);
    std::copy(cost.begin(), cost.end(), r.begin());
    for (int i = 0; i < rows(); ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < cols; ++j) r[j] -= cb * t[i][j];
    }
  }

  enum class Outcome { Optimal, Unbounded, Limit };

  Outcome iterate() {
    while (true) {
      int pc = -1;
      if (!bland) {
        double best = -kPivotEps;
        for (int j = 0; j < cols - 1; ++j)
          if (!is_artificial(j) && r[j] < best) {
            best = r[j];
            pc = j;
          }
      } else {
        for (int j = 0; j < cols - 1; ++j)
          if (!is_artificial(j) && r[j] < -kPivotEps) {
            pc = j;
            break;
          }
      }
      if (pc < 0) return Outcome::Optimal;
      int pr = -1;
      double best_ratio = kInf;
      for (int i = 0; i < rows(); ++i) {
        if (t[i][pc] <= kPivotEps) continue;
        const double ratio = t[i][rhs] / t[i][pc];
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && (pr < 0 || basis[i] < basis[pr]))) {
          best_ratio = std::min(best_ratio, ratio);
          pr = i;
        }
      }
      if (pr < 0) return Outcome::Unbounded;
      if (--iterations_left < 0) return Outcome::Limit;
      if (best_ratio < 1e-10) {
        if (++stall > 30) bland = true;  // permanent: guarantees termination
      } else {
        stall = 0;
      }
      pivot(pr, pc);
    }
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p, long long iteration_limit) {
  const int n = static_cast<int>(p.objective.size());
  const int m_eq = static_cast<int>(p.eq_rows.size());
  const int m_ineq = static_cast<int>(p.ineq_rows.size());
  const int m = m_eq + m_ineq;
  check_finite_row(p.objective);
  if (p.eq_rhs.size() != p.eq_rows.size() || p.ineq_rhs.size() != p.ineq_rows.size())
    fail(Errc::BadArgument, "row/rhs count mismatch");

  // An inequality row with b >= 0 starts feasible on its own slack; only
  // equality rows and negated (b < 0) inequality rows need an artificial.
  std::vector<int> art_index(m, -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    const double b = i < m_eq ? p.eq_rhs[i] : p.ineq_rhs[i - m_eq];
    if (i < m_eq || b < 0) art_index[i] = n_art++;
  }

  Tableau tb;
  tb.n = n;
  tb.n_slack = m_ineq;
  tb.cols = n + m_ineq + n_art + 1;
  tb.rhs = tb.cols - 1;
  tb.iterations_left =
      iteration_limit > 0 ? iteration_limit : 2000 + 40LL * (m + tb.cols);

  std::vector<double> sign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    const bool eq = i < m_eq;
    const auto& row = eq ? p.eq_rows[i] : p.ineq_rows[i - m_eq];
    const double b = eq ? p.eq_rhs[i] : p.ineq_rhs[i - m_eq];
    if (static_cast<int>(row.size()) != n)
      fail(Errc::BadArgument, "row arity mismatch");
    check_finite_row(row);
    if (!std::isfinite(b)) fail(Errc::NonFinite, "non-finite right-hand side");
    std::vector<double> trow(tb.cols, 0.0);
    std::copy(row.begin(), row.end(), trow.begin());
    if (!eq) trow[n + (i - m_eq)] = 1.0;
    trow[tb.rhs] = b;
    if (b < 0) {
      sign[i] = -1.0;
      for (double& x : trow) x = -x;
    }
    if (art_index[i] >= 0) {
      trow[n + m_ineq + art_index[i]] = 1.0;
      tb.basis.push_back(n + m_ineq + art_index[i]);
    } else {
      tb.basis.push_back(n + (i - m_eq));
    }
    tb.t.push_back(std::move(trow));
    tb.origin.push_back(i);
  }

  // Phase 1: minimize the artificial sum.
  std::vector<double> phase1(tb.cols - 1, 0.0);
  for (int i = 0; i < m; ++i)
    if (art_index[i] >= 0) phase1[n + m_ineq + art_index[i]] = 1.0;
  tb.rebuild_costs(phase1);
  switch (tb.iterate()) {
    case Tableau::Outcome::Optimal: break;
    case Tableau::Outcome::Unbounded:
      fail(Errc::IterationLimit, "phase-1 objective diverged");  // cannot happen
    case Tableau::Outcome::Limit:
      fail(Errc::IterationLimit, "simplex iteration limit in phase 1");
  }
  if (-tb.r[tb.rhs] > kFeasEps)
    fail(Errc::Infeasible, "no feasible point (phase-1 gap " +
                               std::to_string(-tb.r[tb.rhs]) + ")");

  // Drive leftover artificials out of the basis; a row whose artificial
  // cannot leave is redundant and gets dropped.
  std::vector<char> dropped(m, 0);
  for (int i = 0; i < tb.rows();) {
    if (!tb.is_artificial(tb.basis[i])) {
      ++i;
      continue;
    }
    int pc = -1;
    for (int j = 0; j < n + m_ineq; ++j)
      if (std::abs(tb.t[i][j]) > kFeasEps) {
        pc = j;
        break;
      }
    if (pc >= 0) {
      tb.pivot(i, pc);
      ++i;
    } else {
      dropped[tb.origin[i]] = 1;
      tb.t.erase(tb.t.begin() + i);
      tb.basis.erase(tb.basis.begin() + i);
      tb.origin.erase(tb.origin.begin() + i);
    }
  }

  // Phase 2: the real objective (artificials stay barred from entering).
  std::vector<double> phase2(tb.cols - 1, 0.0);
  std::copy(p.objective.begin(), p.objective.end(), phase2.begin());
  tb.rebuild_costs(phase2);
  switch (tb.iterate()) {
    case Tableau::Outcome::Optimal: break;
    case Tableau::Outcome::Unbounded:
      fail(Errc::Unbounded, "objective unbounded below");
    case Tableau::Outcome::Limit:
      fail(Errc::IterationLimit, "simplex iteration limit in phase 2");
  }

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < tb.rows(); ++i)
    if (tb.basis[i] < n) sol.x[tb.basis[i]] = std::max(0.0, tb.t[i][tb.rhs]);
  for (int j = 0; j < n; ++j) sol.value += p.objective[j] * sol.x[j];
  sol.dual_eq.assign(m_eq, 0.0);
  sol.dual_ineq.assign(m_ineq, 0.0);
  for (int i = 0; i < m; ++i) {
    if (dropped[i]) continue;  // redundant row: dual weight 0 stays valid
    // Dual of row i == minus the reduced cost of any zero-objective column
    // whose only nonzero entry is a +1 in that row: the artificial where one
    // exists, else the slack the row started on.
    const int cert = art_index[i] >= 0 ? n + m_ineq + art_index[i] : n + (i - m_eq);
    const double y = -tb.r[cert] * sign[i];
    if (i < m_eq)
      sol.dual_eq[i] = y;
    else
      sol.dual_ineq[i - m_eq] = y;
  }
  return sol;
}

}  // namespace gm
