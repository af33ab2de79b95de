#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gm/error.hpp"
#include "gm/graph.hpp"
#include "gm/metrics.hpp"
#include "gm/unrolling.hpp"
#include "random_graphs.hpp"

using namespace gm;
using testrand::random_graph;
using testrand::random_permutation;
using testrand::uniform01;

namespace {

Errc thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::BadArgument;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

// Definition-path transport cost between two equally-shaped complete padded
// trees: label difference at the roots plus the best child-to-child matching,
// found by exhaustive permutation search.
double oracle_tree_cost(const RootedTree& a, int xa, const RootedTree& b, int xb) {
  double cost = euclid(a.labels[xa], b.labels[xb]);
  const auto& ca = a.children[xa];
  const auto& cb = b.children[xb];
  REQUIRE(ca.size() == cb.size());
  if (ca.empty()) return cost;
  std::vector<int> perm(cb.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (size_t i = 0; i < ca.size(); ++i)
      total += oracle_tree_cost(a, ca[i], b, cb[perm[i]]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cost + best;
}

// Exhaustive assignment of the n padded trees of g to those of h.
double oracle_forest_distance(const LabeledGraph& g, const LabeledGraph& h, int depth,
                              Aggregation mode) {
  const PaddedForest fg = build_forest(g, depth, mode);
  const PaddedForest fh = build_forest(h, depth, mode);
  std::vector<int> perm(fg.n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int u = 0; u < fg.n; ++u)
      total += oracle_tree_cost(fg.trees[u], fg.trees[u].root, fh.trees[perm[u]],
                                fh.trees[perm[u]].root);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double oracle_delta_perm(const LabeledGraph& g, const LabeledGraph& h) {
  const auto a = adjacency_matrix(g);
  const auto b = adjacency_matrix(h);
  std::vector<int> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < g.n; ++i) {
      total += euclid(g.features[i], h.features[perm[i]]);
      for (int k = 0; k < g.n; ++k)
        total += std::abs(a[i][k] - b[perm[i]][perm[k]]);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

LabeledGraph two_triangles() {
  return disjoint_union(complete_graph(3), complete_graph(3));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("graph_metrics") {

TEST_CASE("transport values on small graphs are exact") {
  const LabeledGraph k3 = complete_graph(3);
  const LabeledGraph p3 = path_graph(3);
  // One tree-to-tree cost is 0 (middle vertex), the two end-vertex trees each
  // pay one blank-matched unit child.
  CHECK(forest_distance(k3, p3, 1) == 2.0);
  CHECK(tree_mover_distance(k3, p3, 1) == 2.0);
  // Doubling the child-transport weight doubles exactly those units.
  CHECK(forest_distance(k3, p3, 1, {2.0}) == 4.0);
  CHECK(tree_mover_distance(k3, p3, 1, {2.0}) == 4.0);
  // Depth 0 compares root features only.
  CHECK(forest_distance(k3, p3, 0) == 0.0);
  LabeledGraph a = make_graph(2, {{0, 1}}, {{0.0}, {3.0}});
  LabeledGraph b = make_graph(2, {{0, 1}}, {{1.0}, {1.0}});
  CHECK(forest_distance(a, b, 0) == 3.0);
  CHECK(delta_perm_1(k3, p3) == 2.0);
}

TEST_CASE("self distance is exactly zero") {
  std::mt19937_64 rng(7101);
  for (int rep = 0; rep < 5; ++rep) {
    const LabeledGraph g = random_graph(rng, 5, 2);
    CHECK(forest_distance(g, g, 3) == 0.0);
    CHECK(mean_forest_distance(g, g, 3) == 0.0);
    CHECK(tree_mover_distance(g, g, 2) == 0.0);
    CHECK(delta_perm_1(g, g) == 0.0);
  }
}

TEST_CASE("forest distance equals the tree transport reference") {
  std::mt19937_64 rng(7102);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int d = 1 + static_cast<int>(rng() % 2);
    const int depth = static_cast<int>(rng() % 4);
    const bool uniform = rep % 3 == 0;
    const LabeledGraph g = random_graph(rng, n, d, 0.5, uniform);
    const LabeledGraph h = random_graph(rng, n, d, 0.5, uniform);
    std::vector<double> omega;
    if (rep % 2 == 0)
      for (int l = 0; l < depth; ++l) omega.push_back(0.25 + uniform01(rng));
    const double fast = forest_distance(g, h, depth, omega);
    const double reference = tree_mover_distance(g, h, depth, omega);
    CHECK(std::abs(fast - reference) <= 1e-9);
  }
}

TEST_CASE("fast path matches the padded-forest definition") {
  std::mt19937_64 rng(7103);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int depth = static_cast<int>(rng() % 3);
    const bool uniform = rep % 4 == 0;
    const LabeledGraph g = random_graph(rng, n, 2, 0.6, uniform);
    const LabeledGraph h = random_graph(rng, n, 2, 0.6, uniform);
    const double fd = forest_distance(g, h, depth);
    const double fd_oracle = oracle_forest_distance(g, h, depth, Aggregation::Sum);
    CHECK(std::abs(fd - fd_oracle) <= 1e-9);
    const double mfd = mean_forest_distance(g, h, depth);
    const double mfd_oracle = oracle_forest_distance(g, h, depth, Aggregation::Mean);
    CHECK(std::abs(mfd - mfd_oracle) <= 1e-9);
  }
}

TEST_CASE("zero sets follow the refinements") {
  const LabeledGraph c6 = cycle_graph(6);
  const LabeledGraph cc = two_triangles();
  const LabeledGraph p6 = path_graph(6);
  // The classic indistinguishable pair stays at exact zero at any depth.
  CHECK(forest_distance(c6, cc, 3) == 0.0);
  CHECK(evaluate_metric({MetricKind::ForestDistance, kStableDepth, {}}, c6, cc) == 0.0);
  CHECK(forest_distance(c6, p6, 1) > 1e-6);
  CHECK(forest_distance(c6, p6, kStableDepth) > 1e-6);

  // Mean pruning merges everything the mean refinement merges.
  CHECK(mean_forest_distance(path_graph(3), complete_graph(3), 2) == 0.0);
  // With uniform features even path-4 and cycle-4 collapse: every positive-
  // degree vertex sees the same one-child pruned tree.
  CHECK(mean_forest_distance(path_graph(4), cycle_graph(4), 3) == 0.0);
  const LabeledGraph k3k1 = disjoint_union(complete_graph(3), empty_graph(1));
  CHECK(mean_forest_distance(path_graph(4), k3k1, 2) > 1e-6);
}

TEST_CASE("permutation alignment matches exhaustive search") {
  std::mt19937_64 rng(7104);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int d = 1 + static_cast<int>(rng() % 2);
    const bool uniform = rep % 3 == 0;
    const LabeledGraph g = random_graph(rng, n, d, 0.5, uniform);
    const LabeledGraph h = random_graph(rng, n, d, 0.5, uniform);
    CHECK(std::abs(delta_perm_1(g, h) - oracle_delta_perm(g, h)) <= 1e-9);
  }
  // Isomorphic relabelings are at distance zero.
  const LabeledGraph g = random_graph(rng, 7, 2);
  const LabeledGraph h = permute_vertices(g, random_permutation(rng, 7));
  CHECK(delta_perm_1(g, h) == 0.0);
  CHECK(thrown_code([] {
          const LabeledGraph big = complete_graph(11);
          delta_perm_1(big, big);
        }) == Errc::TooLargeForExact);
}

TEST_CASE("doubly stochastic alignment relaxes the permutation alignment") {
  std::mt19937_64 rng(7105);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const bool uniform = rep % 2 == 0;
    const LabeledGraph g = random_graph(rng, n, 1, 0.5, uniform);
    const LabeledGraph h = random_graph(rng, n, 1, 0.5, uniform);
    const double relaxed = delta_ds_1(g, h);
    const double exact = delta_perm_1(g, h);
    CHECK(relaxed >= -1e-9);
    CHECK(relaxed <= exact + 1e-7);
  }
  const LabeledGraph g = random_graph(rng, 6, 2);
  CHECK(delta_ds_1(g, g) <= 1e-9);
  CHECK(delta_ds_1(g, permute_vertices(g, random_permutation(rng, 6))) <= 1e-7);
}

TEST_CASE("doubly stochastic alignment separates exactly the refinable pairs") {
  CHECK(delta_ds_1(cycle_graph(6), two_triangles()) <= 1e-7);
  CHECK(delta_ds_1(cycle_graph(6), path_graph(6)) > 1e-6);
  // One edge against none: every doubly-stochastic S keeps ||A S - S 0||_1 = 2.
  CHECK(std::abs(delta_ds_1(complete_graph(2), empty_graph(2)) - 2.0) <= 1e-7);
  CHECK(thrown_code([] {
          const LabeledGraph big = empty_graph(33);
          delta_ds_1(big, big);
        }) == Errc::TooLarge);
}

TEST_CASE("refinement indicator metric") {
  CHECK(wl_trivial_metric(cycle_graph(6), two_triangles()) == 0.0);
  CHECK(wl_trivial_metric(cycle_graph(6), path_graph(6)) == 1.0);
  CHECK(wl_trivial_metric(complete_graph(3), path_graph(3)) == 1.0);
  CHECK(wl_trivial_metric(complete_graph(3), path_graph(3), 0) == 0.0);
}

TEST_CASE("argument order never changes a bit") {
  std::mt19937_64 rng(7106);
  for (int rep = 0; rep < 4; ++rep) {
    const LabeledGraph g = random_graph(rng, 5, 2);
    const LabeledGraph h = random_graph(rng, 5, 2);
    CHECK(forest_distance(g, h, 2) == forest_distance(h, g, 2));
    CHECK(tree_mover_distance(g, h, 2) == tree_mover_distance(h, g, 2));
    CHECK(mean_forest_distance(g, h, 2) == mean_forest_distance(h, g, 2));
    CHECK(delta_perm_1(g, h) == delta_perm_1(h, g));
    CHECK(delta_ds_1(g, h) == delta_ds_1(h, g));
    CHECK(wl_trivial_metric(g, h) == wl_trivial_metric(h, g));
  }
}

TEST_CASE("triangle inequality holds at desk scale") {
  std::mt19937_64 rng(7107);
  for (int rep = 0; rep < 12; ++rep) {
    const LabeledGraph g = random_graph(rng, 5, 2);
    const LabeledGraph h = random_graph(rng, 5, 2);
    const LabeledGraph k = random_graph(rng, 5, 2);
    const double tol = 2e-7;
    CHECK(forest_distance(g, h, 2) <=
          forest_distance(g, k, 2) + forest_distance(k, h, 2) + tol);
    CHECK(mean_forest_distance(g, h, 2) <=
          mean_forest_distance(g, k, 2) + mean_forest_distance(k, h, 2) + tol);
    CHECK(delta_perm_1(g, h) <= delta_perm_1(g, k) + delta_perm_1(k, h) + tol);
    CHECK(delta_ds_1(g, h) <= delta_ds_1(g, k) + delta_ds_1(k, h) + tol);
  }
}

TEST_CASE("metric dispatch covers every kind") {
  std::mt19937_64 rng(7108);
  const LabeledGraph g = random_graph(rng, 4, 1);
  const LabeledGraph h = random_graph(rng, 4, 1);
  CHECK(evaluate_metric({MetricKind::ForestDistance, 2, {}}, g, h) ==
        forest_distance(g, h, 2));
  CHECK(evaluate_metric({MetricKind::TreeMover, 2, {}}, g, h) ==
        tree_mover_distance(g, h, 2));
  CHECK(evaluate_metric({MetricKind::MeanForest, 2, {}}, g, h) ==
        mean_forest_distance(g, h, 2));
  CHECK(evaluate_metric({MetricKind::DeltaPerm1, 2, {}}, g, h) == delta_perm_1(g, h));
  CHECK(evaluate_metric({MetricKind::DeltaDS1, 2, {}}, g, h) == delta_ds_1(g, h));
  CHECK(evaluate_metric({MetricKind::WlTrivial, 2, {}}, g, h) ==
        wl_trivial_metric(g, h, 2));
  CHECK(evaluate_metric({MetricKind::ForestDistance, 2, {0.5, 0.5}}, g, h) ==
        forest_distance(g, h, 2, {0.5, 0.5}));
}

TEST_CASE("distance matrix is deterministic across serial and parallel runs") {
  GraphCollection c;
  c.graphs = {cycle_graph(6), two_triangles(), path_graph(6)};
  c.source_ids = {"a", "b", "c"};
  c.d = 1;
  const MetricSpec spec{MetricKind::ForestDistance, 2, {}};
  const DistanceMatrix par = distance_matrix(c, spec, 2);
  const DistanceMatrix ser = distance_matrix_serial(c, spec);
  REQUIRE(par.values.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(par.values[i][i] == 0.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(par.values[i][j] == ser.values[i][j]);
      CHECK(par.values[i][j] == par.values[j][i]);
    }
  }
  CHECK(par.values[0][1] == 0.0);  // the indistinguishable pair
  CHECK(par.values[0][2] > 1e-6);
  CHECK(par.ids == std::vector<std::string>{"a", "b", "c"});

  GraphCollection unnamed;
  unnamed.graphs = {complete_graph(3), path_graph(3)};
  unnamed.d = 1;
  CHECK(distance_matrix(unnamed, spec).ids == std::vector<std::string>{"0", "1"});
}

TEST_CASE("a failing pair reports its position") {
  GraphCollection c;
  c.graphs = {complete_graph(3), path_graph(4)};
  c.d = 1;
  try {
    distance_matrix(c, {MetricKind::ForestDistance, 1, {}});
    FAIL("expected an Error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OrderMismatch);
    CHECK(std::string(e.what()).find("pair (0,1)") != std::string::npos);
  }
}

TEST_CASE("matrix exports are stable byte for byte") {
  GraphCollection c;
  c.graphs = {cycle_graph(6), two_triangles(), path_graph(6)};
  c.source_ids = {"a", "b", "c"};
  c.d = 1;
  const DistanceMatrix dm = distance_matrix_serial(c, {MetricKind::ForestDistance, 2, {}});

  const std::string csv_path = "metrics_test_matrix.csv";
  write_distance_matrix_csv(csv_path, dm);
  const std::string first = read_file(csv_path);
  write_distance_matrix_csv(csv_path, dm);
  CHECK(read_file(csv_path) == first);
  CHECK(first.rfind("id,a,b,c\n", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), '\n') == 4);

  const std::string json_path = "metrics_test_matrix.json";
  write_distance_matrix_json(json_path, dm);
  const nlohmann::json j = nlohmann::json::parse(read_file(json_path));
  CHECK(j["ids"].get<std::vector<std::string>>() == dm.ids);
  const auto matrix = j["matrix"].get<std::vector<std::vector<double>>>();
  REQUIRE(matrix.size() == dm.values.size());
  for (size_t i = 0; i < matrix.size(); ++i)
    for (size_t k = 0; k < matrix[i].size(); ++k) CHECK(matrix[i][k] == dm.values[i][k]);
  std::remove(csv_path.c_str());
  std::remove(json_path.c_str());
}

TEST_CASE("input validation") {
  const LabeledGraph k3 = complete_graph(3);
  const LabeledGraph p4 = path_graph(4);
  CHECK(thrown_code([&] { forest_distance(k3, p4, 1); }) == Errc::OrderMismatch);
  CHECK(thrown_code([&] { forest_distance(k3, complete_graph(3, 2), 1); }) ==
        Errc::DimMismatch);
  CHECK(thrown_code([&] { delta_ds_1(k3, p4); }) == Errc::OrderMismatch);
  CHECK(thrown_code([] { forest_distance(empty_graph(1), empty_graph(1), 1); }) ==
        Errc::OrderTooSmall);
  CHECK(thrown_code([&] { forest_distance(k3, complete_graph(3), 2, {1.0}); }) ==
        Errc::BadArgument);
  CHECK(thrown_code([&] { forest_distance(k3, complete_graph(3), 1, {-1.0}); }) ==
        Errc::BadArgument);
  CHECK(thrown_code([&] { forest_distance(k3, complete_graph(3), -3); }) ==
        Errc::BadArgument);
}

}
