#include "gm/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "gm/assignment.hpp"
#include "gm/error.hpp"
#include "gm/simplex.hpp"
#include "gm/unrolling.hpp"

namespace gm {

namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    sum += t * t;
  }
  return std::sqrt(sum);
}

void check_pair(const LabeledGraph& g, const LabeledGraph& h) {
  if (g.n != h.n)
    fail(Errc::OrderMismatch,
         "orders " + std::to_string(g.n) + " vs " + std::to_string(h.n));
  if (g.d != h.d)
    fail(Errc::DimMismatch,
         "feature dimensions " + std::to_string(g.d) + " vs " + std::to_string(h.d));
}

void check_omega(const std::vector<double>& omega, int depth) {
  if (omega.empty()) return;
  if (static_cast<int>(omega.size()) < depth)
    fail(Errc::BadArgument, "omega has " + std::to_string(omega.size()) +
                                " weights for depth " + std::to_string(depth));
  for (double w : omega)
    if (!(w > 0.0) || !std::isfinite(w))
      fail(Errc::BadArgument, "omega weights must be positive and finite");
}

// Orders a symmetric computation canonically so both argument orders run the
// same arithmetic.
bool canonical_order(const LabeledGraph& g, const LabeledGraph& h) {
  return serialize(g) <= serialize(h);
}

std::string label_key(const std::vector<double>& xs) {
  std::string s(xs.size() * 8, '\0');
  std::memcpy(s.data(), xs.data(), xs.size() * 8);
  return s;
}

// Shared dictionary of distinct labeled subtrees, one id per distinct
// (label, child multiset) pair.  Both graphs of a pair intern into the same
// space, so id equality means subtree equality.
struct SubtreeSpace {
  std::map<std::string, int> lookup;
  std::vector<std::vector<double>> label;
  std::vector<std::vector<int>> kids;  // sorted id lists
  std::vector<int> depth;

  int intern(std::vector<double> lab, std::vector<int> children) {
    std::sort(children.begin(), children.end());
    std::string key = label_key(lab);
    for (int c : children) {
      key += '|';
      key += std::to_string(c);
    }
    auto it = lookup.find(key);
    if (it != lookup.end()) return it->second;
    const int id = static_cast<int>(label.size());
    int d = 0;
    for (int c : children) d = std::max(d, depth[c] + 1);
    lookup.emplace(std::move(key), id);
    label.push_back(std::move(lab));
    kids.push_back(std::move(children));
    depth.push_back(d);
    return id;
  }

  int blank(int feature_dim) { return intern(std::vector<double>(feature_dim, 0.0), {}); }
};

// Walk-tree ids per vertex, level by level: a depth-l subtree of v is its
// feature plus the depth-(l-1) subtrees of all neighbors.
std::vector<int> sum_subtree_ids(const LabeledGraph& g, int depth, SubtreeSpace& space) {
  const auto adj = adjacency_lists(g);
  std::vector<int> prev(g.n), cur(g.n);
  for (int v = 0; v < g.n; ++v) prev[v] = space.intern(g.features[v], {});
  for (int l = 1; l <= depth; ++l) {
    for (int v = 0; v < g.n; ++v) {
      std::vector<int> children;
      children.reserve(adj[v].size());
      for (int w : adj[v]) children.push_back(prev[w]);
      cur[v] = space.intern(g.features[v], std::move(children));
    }
    std::swap(prev, cur);
  }
  return prev;
}

// Mean-pruned walk trees with branch-scaled labels, interned bottom-up.
std::vector<int> mean_subtree_ids(const LabeledGraph& g, int depth, SubtreeSpace& space) {
  std::vector<int> roots(g.n);
  for (int v = 0; v < g.n; ++v) {
    const RootedTree t = mean_prune(unroll(g, v, depth));
    const auto scale = branch_scaling(t);
    std::vector<int> id_of(tree_size(t), -1);
    // Children always carry higher node indices, so a reverse pass is
    // bottom-up.
    for (int x = tree_size(t) - 1; x >= 0; --x) {
      std::vector<double> lab = t.labels[x];
      for (double& value : lab) value /= static_cast<double>(scale[x]);
      std::vector<int> children;
      for (int c : t.children[x]) children.push_back(id_of[c]);
      id_of[x] = space.intern(std::move(lab), std::move(children));
    }
    roots[v] = id_of[t.root];
  }
  return roots;
}

// Tree transport distance between interned subtrees: root feature difference
// plus an optimally-assigned child transport, child lists blank-padded to
// equal length, weighted by omega at the deeper remaining depth.
struct TransportEvaluator {
  SubtreeSpace& space;
  const std::vector<double>& omega;  // empty = all ones
  int blank;
  std::map<std::pair<int, int>, double> memo;

  double weight(int remaining) const {
    return omega.empty() ? 1.0 : omega[remaining - 1];
  }

  double distance(int a, int b) {
    if (a == b) return 0.0;
    const auto key = std::minmax(a, b);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double value = euclid(space.label[a], space.label[b]);
    if (!space.kids[a].empty() || !space.kids[b].empty()) {
      std::vector<int> la = space.kids[a], lb = space.kids[b];
      while (la.size() < lb.size()) la.push_back(blank);
      while (lb.size() < la.size()) lb.push_back(blank);
      const int m = static_cast<int>(la.size());
      std::vector<std::vector<double>> cost(m, std::vector<double>(m));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) cost[i][j] = distance(la[i], lb[j]);
      value += weight(std::max(space.depth[a], space.depth[b])) *
               assignment(cost).cost;
    }
    memo.emplace(key, value);
    return value;
  }
};

double forest_transport(const LabeledGraph& g, const LabeledGraph& h, int depth,
                        const std::vector<double>& omega, Aggregation mode) {
  SubtreeSpace space;
  const int blank = space.blank(g.d);
  const auto rg = mode == Aggregation::Sum ? sum_subtree_ids(g, depth, space)
                                           : mean_subtree_ids(g, depth, space);
  const auto rh = mode == Aggregation::Sum ? sum_subtree_ids(h, depth, space)
                                           : mean_subtree_ids(h, depth, space);
  TransportEvaluator eval{space, omega, blank, {}};
  std::vector<std::vector<double>> cost(g.n, std::vector<double>(g.n));
  for (int u = 0; u < g.n; ++u)
    for (int v = 0; v < g.n; ++v) cost[u][v] = eval.distance(rg[u], rh[v]);
  return assignment(cost).cost;
}

int resolve_depth(int depth, const LabeledGraph& g) {
  if (depth == kStableDepth) return g.n;  // refinement stabilizes within n rounds
  if (depth < 0) fail(Errc::BadArgument, "depth must be >= 0 or stable");
  return depth;
}

// ---- naive reference on explicit trees --------------------------------------

struct PreparedTree {
  RootedTree tree;
  std::vector<int> depth_below;
};

PreparedTree prepare(RootedTree t) {
  PreparedTree p{std::move(t), {}};
  p.depth_below.assign(tree_size(p.tree), 0);
  for (int x = tree_size(p.tree) - 1; x >= 0; --x)
    for (int c : p.tree.children[x])
      p.depth_below[x] = std::max(p.depth_below[x], p.depth_below[c] + 1);
  return p;
}

struct NaiveNode {
  const PreparedTree* t;  // nullptr encodes the blank (zero-labeled leaf)
  int node;
};

double naive_transport(const NaiveNode& a, const NaiveNode& b,
                       const std::vector<double>& omega, int feature_dim) {
  const std::vector<double> zero(feature_dim, 0.0);
  const std::vector<double>& la = a.t ? a.t->tree.labels[a.node] : zero;
  const std::vector<double>& lb = b.t ? b.t->tree.labels[b.node] : zero;
  double value = euclid(la, lb);
  std::vector<NaiveNode> ca, cb;
  if (a.t)
    for (int c : a.t->tree.children[a.node]) ca.push_back({a.t, c});
  if (b.t)
    for (int c : b.t->tree.children[b.node]) cb.push_back({b.t, c});
  if (ca.empty() && cb.empty()) return value;
  while (ca.size() < cb.size()) ca.push_back({nullptr, -1});
  while (cb.size() < ca.size()) cb.push_back({nullptr, -1});
  const int m = static_cast<int>(ca.size());
  std::vector<std::vector<double>> cost(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) cost[i][j] = naive_transport(ca[i], cb[j], omega, feature_dim);
  const int da = a.t ? a.t->depth_below[a.node] : 0;
  const int db = b.t ? b.t->depth_below[b.node] : 0;
  const double w = omega.empty() ? 1.0 : omega[std::max(da, db) - 1];
  return value + w * assignment(cost).cost;
}

// ---- permutation alignment --------------------------------------------------

struct PermSearch {
  int n;
  std::vector<std::vector<double>> a, b, lab;
  std::vector<int> order;  // g-vertices, most-constrained first
  std::vector<int> sigma;  // sigma[g-vertex] = h-vertex
  std::vector<char> used;
  double best;

  double remaining_bound(int t) const {
    // Admissible: each unassigned vertex must pay at least its cheapest
    // feature alignment among unused targets.
    double bound = 0.0;
    for (size_t k = t; k < order.size(); ++k) {
      const int i = order[k];
      double lo = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (!used[j]) lo = std::min(lo, lab[i][j]);
      bound += lo;
    }
    return bound;
  }

  void dfs(size_t t, double partial) {
    if (partial + remaining_bound(t) >= best) return;
    if (t == order.size()) {
      best = partial;
      return;
    }
    const int i = order[t];
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      double cost = lab[i][j];
      for (size_t k = 0; k < t; ++k) {
        const int i2 = order[k];
        cost += 2.0 * std::abs(a[i][i2] - b[j][sigma[i2]]);
      }
      used[j] = 1;
      sigma[i] = j;
      dfs(t + 1, partial + cost);
      used[j] = 0;
    }
  }
};

std::vector<std::vector<double>> feature_costs(const LabeledGraph& g,
                                               const LabeledGraph& h) {
  std::vector<std::vector<double>> lab(g.n, std::vector<double>(g.n));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) lab[i][j] = euclid(g.features[i], h.features[j]);
  return lab;
}

}  // namespace

double forest_distance(const LabeledGraph& g, const LabeledGraph& h, int depth,
                       const std::vector<double>& omega) {
  check_pair(g, h);
  if (g.n < 2) fail(Errc::OrderTooSmall, "forest distance needs order >= 2");
  const int L = resolve_depth(depth, g);
  check_omega(omega, L);
  return canonical_order(g, h) ? forest_transport(g, h, L, omega, Aggregation::Sum)
                               : forest_transport(h, g, L, omega, Aggregation::Sum);
}

double tree_mover_distance(const LabeledGraph& g, const LabeledGraph& h, int depth,
                           const std::vector<double>& omega) {
  check_pair(g, h);
  if (g.n < 2) fail(Errc::OrderTooSmall, "tree transport needs order >= 2");
  const int L = resolve_depth(depth, g);
  check_omega(omega, L);
  const LabeledGraph& x = canonical_order(g, h) ? g : h;
  const LabeledGraph& y = canonical_order(g, h) ? h : g;
  std::vector<PreparedTree> tx, ty;
  for (int v = 0; v < x.n; ++v) tx.push_back(prepare(unroll(x, v, L)));
  for (int v = 0; v < y.n; ++v) ty.push_back(prepare(unroll(y, v, L)));
  std::vector<std::vector<double>> cost(x.n, std::vector<double>(x.n));
  for (int u = 0; u < x.n; ++u)
    for (int v = 0; v < y.n; ++v)
      cost[u][v] = naive_transport({&tx[u], 0}, {&ty[v], 0}, omega, x.d);
  return assignment(cost).cost;
}

double mean_forest_distance(const LabeledGraph& g, const LabeledGraph& h, int depth) {
  check_pair(g, h);
  if (g.n < 2) fail(Errc::OrderTooSmall, "forest distance needs order >= 2");
  const int L = resolve_depth(depth, g);
  return canonical_order(g, h) ? forest_transport(g, h, L, {}, Aggregation::Mean)
                               : forest_transport(h, g, L, {}, Aggregation::Mean);
}

double delta_perm_1(const LabeledGraph& g, const LabeledGraph& h) {
  check_pair(g, h);
  if (g.n > 10)
    fail(Errc::TooLargeForExact,
         "exact permutation alignment supports order <= 10, got " + std::to_string(g.n));
  const LabeledGraph& x = canonical_order(g, h) ? g : h;
  const LabeledGraph& y = canonical_order(g, h) ? h : g;
  if (x.n == 0) return 0.0;
  PermSearch search;
  search.n = x.n;
  search.a = adjacency_matrix(x);
  search.b = adjacency_matrix(y);
  search.lab = feature_costs(x, y);
  search.order.resize(x.n);
  std::iota(search.order.begin(), search.order.end(), 0);
  std::vector<int> deg(x.n, 0);
  for (auto [u, v] : x.edges) {
    ++deg[u];
    ++deg[v];
  }
  std::stable_sort(search.order.begin(), search.order.end(),
                   [&](int u, int v) { return deg[u] > deg[v]; });
  search.sigma.assign(x.n, -1);
  search.used.assign(x.n, 0);
  // Identity alignment as the initial upper bound.
  double identity = 0.0;
  for (int i = 0; i < x.n; ++i) {
    identity += search.lab[i][i];
    for (int k = 0; k < x.n; ++k) identity += std::abs(search.a[i][k] - search.b[i][k]);
  }
  search.best = identity + 1e-12;
  search.dfs(0, 0.0);
  return search.best;
}

double delta_ds_1(const LabeledGraph& g, const LabeledGraph& h) {
  check_pair(g, h);
  if (g.n > 32)
    fail(Errc::TooLarge,
         "doubly-stochastic alignment supports order <= 32, got " + std::to_string(g.n));
  const LabeledGraph& x = canonical_order(g, h) ? g : h;
  const LabeledGraph& y = canonical_order(g, h) ? h : g;
  const int n = x.n;
  if (n == 0) return 0.0;
  const auto a = adjacency_matrix(x);
  const auto b = adjacency_matrix(y);
  const auto lab = feature_costs(x, y);

  // Variables: S (n^2), then T (n^2) with T_{ij} >= |(A S - S B)_{ij}|
  // expressed as two inequalities per cell.  Only the 2n sum constraints are
  // equalities, which keeps the simplex phase-1 basis small.
  const int ns = n * n;
  LpProblem p;
  p.objective.assign(2 * ns, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.objective[i * n + j] = lab[i][j];
  for (int i = 0; i < n; ++i) {  // row sums of S
    std::vector<double> row(2 * ns, 0.0);
    for (int j = 0; j < n; ++j) row[i * n + j] = 1.0;
    p.eq_rows.push_back(std::move(row));
    p.eq_rhs.push_back(1.0);
  }
  for (int j = 0; j < n; ++j) {  // column sums of S
    std::vector<double> row(2 * ns, 0.0);
    for (int i = 0; i < n; ++i) row[i * n + j] = 1.0;
    p.eq_rows.push_back(std::move(row));
    p.eq_rhs.push_back(1.0);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<double> plus(2 * ns, 0.0);
      for (int k = 0; k < n; ++k) {
        plus[k * n + j] += a[i][k];  // (A S)_{ij}
        plus[i * n + k] -= b[k][j];  // -(S B)_{ij}
      }
      std::vector<double> minus(2 * ns, 0.0);
      for (int k = 0; k < 2 * ns; ++k) minus[k] = -plus[k];
      plus[ns + i * n + j] = -1.0;   // (A S - S B)_{ij} <= T_{ij}
      minus[ns + i * n + j] = -1.0;  // -(A S - S B)_{ij} <= T_{ij}
      p.ineq_rows.push_back(std::move(plus));
      p.ineq_rhs.push_back(0.0);
      p.ineq_rows.push_back(std::move(minus));
      p.ineq_rhs.push_back(0.0);
    }
  return solve_lp(p).value;
}

double wl_trivial_metric(const LabeledGraph& g, const LabeledGraph& h, int depth) {
  if (g.d != h.d)
    fail(Errc::DimMismatch,
         "feature dimensions " + std::to_string(g.d) + " vs " + std::to_string(h.d));
  return wl1_joint_indistinguishable(g, h, depth) ? 0.0 : 1.0;
}

double evaluate_metric(const MetricSpec& spec, const LabeledGraph& g,
                       const LabeledGraph& h) {
  switch (spec.kind) {
    case MetricKind::ForestDistance: return forest_distance(g, h, spec.depth, spec.omega);
    case MetricKind::TreeMover: return tree_mover_distance(g, h, spec.depth, spec.omega);
    case MetricKind::MeanForest: return mean_forest_distance(g, h, spec.depth);
    case MetricKind::DeltaPerm1: return delta_perm_1(g, h);
    case MetricKind::DeltaDS1: return delta_ds_1(g, h);
    case MetricKind::WlTrivial: return wl_trivial_metric(g, h, spec.depth);
  }
  fail(Errc::BadArgument, "unknown metric kind");
}

namespace {

DistanceMatrix distance_matrix_impl(const GraphCollection& c, const MetricSpec& spec,
                                    int threads, bool parallel) {
  validate(c);
  const int m = static_cast<int>(c.graphs.size());
  DistanceMatrix dm;
  dm.ids = c.source_ids;
  if (dm.ids.empty())
    for (int i = 0; i < m; ++i) dm.ids.push_back(std::to_string(i));
  dm.values.assign(m, std::vector<double>(m, 0.0));

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);

  std::atomic<bool> failed{false};
  Errc first_code = Errc::BadArgument;
  std::string first_message;
  long long first_pair = -1;

#ifdef _OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  const int team = 1;
#endif

#pragma omp parallel for schedule(dynamic) num_threads(team) if (parallel)
  for (long long k = 0; k < static_cast<long long>(pairs.size()); ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const auto [i, j] = pairs[k];
    try {
      const double value = evaluate_metric(spec, c.graphs[i], c.graphs[j]);
      dm.values[i][j] = value;
      dm.values[j][i] = value;
    } catch (const Error& e) {
#pragma omp critical
      {
        if (first_pair < 0 || k < first_pair) {
          first_pair = k;
          first_code = e.code();
          first_message = e.what();
        }
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failed.load()) {
    const auto [i, j] = pairs[first_pair];
    fail(first_code, "pair (" + std::to_string(i) + "," + std::to_string(j) + ") [" +
                         dm.ids[i] + " vs " + dm.ids[j] + "]: " + first_message);
  }
  return dm;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DistanceMatrix distance_matrix(const GraphCollection& c, const MetricSpec& spec,
                               int threads) {
  return distance_matrix_impl(c, spec, threads, true);
}

DistanceMatrix distance_matrix_serial(const GraphCollection& c, const MetricSpec& spec) {
  return distance_matrix_impl(c, spec, 1, false);
}

void write_distance_matrix_csv(const std::string& path, const DistanceMatrix& dm) {
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << "id";
  for (const auto& id : dm.ids) out << "," << id;
  out << "\n";
  for (size_t i = 0; i < dm.values.size(); ++i) {
    out << dm.ids[i];
    for (double v : dm.values[i]) out << "," << format_value(v);
    out << "\n";
  }
}

void write_distance_matrix_json(const std::string& path, const DistanceMatrix& dm) {
  nlohmann::json j;
  j["ids"] = dm.ids;
  j["matrix"] = dm.values;
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace gm
