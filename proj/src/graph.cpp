#include "gm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>

#include "gm/error.hpp"

namespace gm {

namespace {

void check_vertex(const LabeledGraph& g, int v, const char* what) {
  if (v < 0 || v >= g.n)
    fail(Errc::BadVertex, std::string(what) + " vertex " + std::to_string(v) +
                              " out of range [0," + std::to_string(g.n) + ")");
}

std::pair<int, int> oriented(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

}  // namespace

std::vector<std::vector<double>> uniform_features(int n, int d, double value) {
  return std::vector<std::vector<double>>(n, std::vector<double>(d, value));
}

LabeledGraph make_graph(int n, std::vector<std::pair<int, int>> edges,
                        std::vector<std::vector<double>> features, bool one_hot) {
  if (n < 0) fail(Errc::BadArgument, "negative vertex count " + std::to_string(n));
  LabeledGraph g;
  g.n = n;
  g.one_hot = one_hot;
  if (features.size() != static_cast<size_t>(n))
    fail(Errc::BadDimension, "expected " + std::to_string(n) + " feature rows, got " +
                                 std::to_string(features.size()));
  g.d = features.empty() ? 1 : static_cast<int>(features.front().size());
  if (g.d < 1) fail(Errc::BadDimension, "feature dimension must be >= 1");
  for (const auto& row : features) {
    if (static_cast<int>(row.size()) != g.d)
      fail(Errc::BadDimension, "ragged feature rows");
    for (double x : row)
      if (!std::isfinite(x)) fail(Errc::NonFinite, "non-finite feature value");
  }
  g.features = std::move(features);
  for (auto& [u, v] : edges) {
    check_vertex(g, u, "edge");
    check_vertex(g, v, "edge");
    if (u == v) fail(Errc::BadVertex, "self-loop at vertex " + std::to_string(u));
    std::tie(u, v) = oriented(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  return g;
}

LabeledGraph make_uniform_graph(int n, std::vector<std::pair<int, int>> edges, int d) {
  return make_graph(n, std::move(edges), uniform_features(n, d));
}

LabeledGraph path_graph(int n, int d) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_uniform_graph(n, std::move(e), d);
}

LabeledGraph cycle_graph(int n, int d) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  if (n >= 3) e.emplace_back(0, n - 1);
  return make_uniform_graph(n, std::move(e), d);
}

LabeledGraph complete_graph(int n, int d) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return make_uniform_graph(n, std::move(e), d);
}

LabeledGraph star_graph(int leaves, int d) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return make_uniform_graph(leaves + 1, std::move(e), d);
}

LabeledGraph empty_graph(int n, int d) { return make_uniform_graph(n, {}, d); }

bool has_edge(const LabeledGraph& g, int u, int v) {
  return std::binary_search(g.edges.begin(), g.edges.end(), oriented(u, v));
}

void add_edge(LabeledGraph& g, int u, int v) {
  check_vertex(g, u, "edge");
  check_vertex(g, v, "edge");
  if (u == v) fail(Errc::BadVertex, "self-loop at vertex " + std::to_string(u));
  auto e = oriented(u, v);
  auto it = std::lower_bound(g.edges.begin(), g.edges.end(), e);
  if (it != g.edges.end() && *it == e)
    fail(Errc::EdgePresent, "edge (" + std::to_string(e.first) + "," +
                                std::to_string(e.second) + ") already present");
  g.edges.insert(it, e);
}

void delete_edge(LabeledGraph& g, int u, int v) {
  check_vertex(g, u, "edge");
  check_vertex(g, v, "edge");
  auto e = oriented(u, v);
  auto it = std::lower_bound(g.edges.begin(), g.edges.end(), e);
  if (it == g.edges.end() || *it != e)
    fail(Errc::EdgeAbsent, "no edge (" + std::to_string(e.first) + "," +
                               std::to_string(e.second) + ") to delete");
  g.edges.erase(it);
}

void set_feature(LabeledGraph& g, int v, const std::vector<double>& x) {
  check_vertex(g, v, "feature");
  if (static_cast<int>(x.size()) != g.d)
    fail(Errc::BadDimension, "feature of length " + std::to_string(x.size()) +
                                 " for graph with d=" + std::to_string(g.d));
  for (double t : x)
    if (!std::isfinite(t)) fail(Errc::NonFinite, "non-finite feature value");
  g.features[v] = x;
}

std::vector<std::vector<double>> adjacency_matrix(const LabeledGraph& g) {
  std::vector<std::vector<double>> a(g.n, std::vector<double>(g.n, 0.0));
  for (auto [u, v] : g.edges) {
    a[u][v] = 1.0;
    a[v][u] = 1.0;
  }
  return a;
}

std::vector<std::vector<int>> adjacency_lists(const LabeledGraph& g) {
  std::vector<std::vector<int>> adj(g.n);
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

int max_degree(const LabeledGraph& g) {
  std::vector<int> deg(g.n, 0);
  for (auto [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

LabeledGraph pad_to_order(const LabeledGraph& g, int target_n) {
  if (target_n < g.n)
    fail(Errc::TargetTooSmall, "cannot pad order " + std::to_string(g.n) + " down to " +
                                   std::to_string(target_n));
  LabeledGraph out = g;
  out.n = target_n;
  out.features.resize(target_n, std::vector<double>(g.d, 0.0));
  return out;
}

LabeledGraph disjoint_union(const LabeledGraph& g, const LabeledGraph& h) {
  if (g.d != h.d)
    fail(Errc::FeatureDimMismatch, "feature dimensions " + std::to_string(g.d) + " vs " +
                                       std::to_string(h.d));
  LabeledGraph out = g;
  out.n = g.n + h.n;
  out.one_hot = g.one_hot && h.one_hot;
  for (auto [u, v] : h.edges) out.edges.emplace_back(u + g.n, v + g.n);
  std::sort(out.edges.begin(), out.edges.end());
  out.features.insert(out.features.end(), h.features.begin(), h.features.end());
  return out;
}

LabeledGraph permute_vertices(const LabeledGraph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n)
    fail(Errc::BadArgument, "permutation length " + std::to_string(perm.size()) +
                                " for order " + std::to_string(g.n));
  std::vector<int> seen(g.n, 0);
  for (int p : perm) {
    if (p < 0 || p >= g.n || seen[p]++)
      fail(Errc::BadArgument, "not a permutation of 0.." + std::to_string(g.n - 1));
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.edges.size());
  for (auto [u, v] : g.edges) edges.emplace_back(perm[u], perm[v]);
  std::vector<std::vector<double>> features(g.n);
  for (int v = 0; v < g.n; ++v) features[perm[v]] = g.features[v];
  return make_graph(g.n, std::move(edges), std::move(features), g.one_hot);
}

std::string serialize(const LabeledGraph& g) {
  std::string s;
  s.reserve(32 + 16 * g.edges.size() + 8 * static_cast<size_t>(g.n) * g.d);
  auto put_i32 = [&s](int32_t x) {
    char buf[4];
    std::memcpy(buf, &x, 4);
    s.append(buf, 4);
  };
  auto put_f64 = [&s](double x) {
    char buf[8];
    std::memcpy(buf, &x, 8);
    s.append(buf, 8);
  };
  put_i32(g.n);
  put_i32(g.d);
  put_i32(g.one_hot ? 1 : 0);
  put_i32(static_cast<int32_t>(g.edges.size()));
  for (auto [u, v] : g.edges) {
    put_i32(u);
    put_i32(v);
  }
  for (const auto& row : g.features)
    for (double x : row) put_f64(x);
  return s;
}

bool feature_is_zero(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double t) { return t == 0.0; });
}

void validate(const GraphCollection& c) {
  for (const auto& g : c.graphs)
    if (g.d != c.d)
      fail(Errc::FeatureDimMismatch, "graph with d=" + std::to_string(g.d) +
                                         " in collection with d=" + std::to_string(c.d));
  if (!c.labels.empty() && c.labels.size() != c.graphs.size())
    fail(Errc::BadArgument, "label count " + std::to_string(c.labels.size()) +
                                " for " + std::to_string(c.graphs.size()) + " graphs");
  for (int l : c.labels)
    if (l != 0 && l != 1) fail(Errc::InvalidGraphLabels, "class label must be 0 or 1");
  if (!c.source_ids.empty() && c.source_ids.size() != c.graphs.size())
    fail(Errc::BadArgument, "source id count mismatch");
}

}  // namespace gm
