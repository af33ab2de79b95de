#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "gm/error.hpp"
#include "gm/graph.hpp"
#include "gm/metrics.hpp"
#include "gm/mpnn.hpp"
#include "random_graphs.hpp"

using namespace gm;

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

MpnnModel scalar_model(MpnnKind kind, double w1, double w2, double head) {
  MpnnModel m;
  m.kind = kind;
  m.layers.push_back({Eigen::MatrixXd::Constant(1, 1, w1),
                      Eigen::MatrixXd::Constant(1, 1, w2)});
  m.head.push_back(Eigen::MatrixXd::Constant(1, 1, head));
  return m;
}

const std::vector<MpnnKind> kAllKinds{MpnnKind::OrderNormalizedSum, MpnnKind::SumAgg,
                                      MpnnKind::MeanAgg};

}  // namespace

TEST_SUITE("mpnn") {

TEST_CASE("hand-computed forward passes on a three-vertex path") {
  const LabeledGraph p3 = path_graph(3);

  const ForwardResult sum = forward(scalar_model(MpnnKind::SumAgg, 1, 1, 1), p3);
  CHECK(sum.embeddings(0, 0) == 2.0);  // own 1 + one neighbor
  CHECK(sum.embeddings(1, 0) == 3.0);  // own 1 + two neighbors
  CHECK(sum.embeddings(2, 0) == 2.0);
  CHECK(sum.pooled(0) == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(sum.output == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(sum.graph_embedding.size() == 1);

  const ForwardResult mean = forward(scalar_model(MpnnKind::MeanAgg, 1, 1, 1), p3);
  for (int v = 0; v < 3; ++v) CHECK(mean.embeddings(v, 0) == 2.0);
  CHECK(mean.output == 2.0);

  const ForwardResult ord =
      forward(scalar_model(MpnnKind::OrderNormalizedSum, 7, 1, 1), p3);
  CHECK(ord.embeddings(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(ord.embeddings(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(ord.output == doctest::Approx(4.0 / 9.0).epsilon(1e-15));

  // Negative pre-activations clip to zero everywhere.
  const ForwardResult clipped = forward(scalar_model(MpnnKind::SumAgg, -1, -1, 1), p3);
  CHECK(clipped.output == 0.0);
}

TEST_CASE("zero weights send every graph to zero") {
  std::mt19937_64 rng(3);
  for (MpnnKind kind : kAllKinds) {
    MpnnModel m = random_model(kind, {2, 3, 2}, {2, 1}, 5);
    for (MpnnLayer& l : m.layers) {
      l.w1.setZero();
      l.w2.setZero();
    }
    const ForwardResult r = forward(m, testrand::random_graph(rng, 5, 2));
    CHECK(r.output == 0.0);
    CHECK(r.embeddings.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.graph_embedding.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("isolated vertices are safe under mean aggregation") {
  const LabeledGraph g = disjoint_union(path_graph(3), empty_graph(2));
  const ForwardResult r = forward(scalar_model(MpnnKind::MeanAgg, 1, 1, 1), g);
  CHECK(std::isfinite(r.output));
  CHECK(r.embeddings(3, 0) == 1.0);  // ReLU(1*1 + 0)
  CHECK(r.embeddings(4, 0) == 1.0);
}

TEST_CASE("outputs are invariant under vertex permutations") {
  std::mt19937_64 rng(2026);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const LabeledGraph g = testrand::random_graph(rng, n, 2);
    const LabeledGraph h = permute_vertices(g, testrand::random_permutation(rng, n));
    for (MpnnKind kind : kAllKinds) {
      const MpnnModel m = random_model(kind, {2, 3, 3}, {1}, 100 + rep);
      const ForwardResult a = forward(m, g), b = forward(m, h);
      CHECK((a.pooled - b.pooled).norm() <= 1e-12);
      CHECK(std::abs(a.output - b.output) <= 1e-12);
    }
  }
}

TEST_CASE("refinement-equivalent graphs collapse to one output") {
  const LabeledGraph c6 = cycle_graph(6);
  const LabeledGraph cc3 = disjoint_union(cycle_graph(3), cycle_graph(3));
  for (MpnnKind kind : {MpnnKind::SumAgg, MpnnKind::OrderNormalizedSum})
    for (int rep = 0; rep < 8; ++rep) {
      const MpnnModel m = random_model(kind, {1, 3, 2, 2}, {2, 1}, 40 + rep);
      CHECK(std::abs(forward(m, c6).output - forward(m, cc3).output) <= 1e-9);
      CHECK((forward(m, c6).pooled - forward(m, cc3).pooled).norm() <= 1e-9);
    }
  // P4 and C4 agree under the mean refinement with uniform features.
  REQUIRE(mean_forest_distance(path_graph(4), cycle_graph(4), 3) == 0.0);
  for (int rep = 0; rep < 8; ++rep) {
    const MpnnModel m = random_model(MpnnKind::MeanAgg, {1, 3, 2, 2}, {2, 1}, 70 + rep);
    CHECK(std::abs(forward(m, path_graph(4)).output -
                   forward(m, cycle_graph(4)).output) <= 1e-9);
  }
}

TEST_CASE("spectral estimates track exact singular values") {
  CHECK(lipschitz_bound(scalar_model(MpnnKind::OrderNormalizedSum, 0, 1, 1)).per_layer[0] ==
        doctest::Approx(1.01).epsilon(1e-9));
  const double scaled =
      lipschitz_bound(scalar_model(MpnnKind::OrderNormalizedSum, 0, 3, 1)).per_layer[0];
  CHECK(scaled == doctest::Approx(3.03).epsilon(1e-9));

  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const MpnnModel m =
        random_model(rep % 2 ? MpnnKind::SumAgg : MpnnKind::OrderNormalizedSum,
                     {2, 4, 3}, {3, 1}, rng());
    const LipschitzBudget b = lipschitz_bound(m);
    REQUIRE(b.per_layer.size() == 2);
    for (size_t t = 0; t < m.layers.size(); ++t) {
      Eigen::MatrixXd map;
      if (m.kind == MpnnKind::OrderNormalizedSum) {
        map = m.layers[t].w2;
      } else {
        map.resize(2 * m.layers[t].w1.rows(), m.layers[t].w1.cols());
        map.topRows(m.layers[t].w1.rows()) = m.layers[t].w1;
        map.bottomRows(m.layers[t].w2.rows()) = m.layers[t].w2;
      }
      const double exact = Eigen::JacobiSVD<Eigen::MatrixXd>(map).singularValues()(0);
      CHECK(b.per_layer[t] >= exact - 1e-12);
      CHECK(b.per_layer[t] <= 1.0101 * exact + 1e-12);
    }
    double head = 1.0;
    for (const Eigen::MatrixXd& w : m.head)
      head *= Eigen::JacobiSVD<Eigen::MatrixXd>(w).singularValues()(0);
    CHECK(b.l_psi >= head - 1e-12);
    CHECK(b.l_fnn == b.l_psi);
    double prod = b.l_psi;
    for (double c : b.per_layer) prod *= c;
    CHECK(b.product == prod);
  }
}

TEST_CASE("two-layer outputs obey the transport bound") {
  std::mt19937_64 rng(515151);
  int evaluated = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const int d = 1 + static_cast<int>(rng() % 2);
    const LabeledGraph g = testrand::random_graph(rng, n, d);
    const LabeledGraph h = testrand::random_graph(rng, n, d);
    const MpnnModel sum = random_model(MpnnKind::SumAgg, {d, 3, 2}, {1}, rng());
    const LipschitzBudget bs = lipschitz_bound(sum);
    const double cs = 2.0 * bs.l_psi * bs.per_layer[0] * bs.per_layer[1];
    const double lhs =
        n * std::abs(forward(sum, g).output - forward(sum, h).output);
    CHECK(lhs <= cs * forest_distance(g, h, 2) + 1e-6);

    const MpnnModel mean = random_model(MpnnKind::MeanAgg, {d, 3, 2}, {1}, rng());
    const LipschitzBudget bm = lipschitz_bound(mean);
    const double cm = 2.0 * bm.l_psi * bm.per_layer[0] * bm.per_layer[1];
    const double lhs_m =
        n * std::abs(forward(mean, g).output - forward(mean, h).output);
    CHECK(lhs_m <= cm * mean_forest_distance(g, h, 2) + 1e-6);
    ++evaluated;
  }
  CHECK(evaluated == 30);
}

TEST_CASE("correlation sampling is seeded and flags degeneracy") {
  GraphCollection c;
  c.graphs = {cycle_graph(6), disjoint_union(cycle_graph(3), cycle_graph(3)),
              path_graph(6), star_graph(5), complete_graph(6)};
  c.d = 1;
  // Small ReLU nets die easily (all-zero outputs); these seeds are alive.
  std::vector<MpnnModel> models{random_model(MpnnKind::SumAgg, {1, 3, 2}, {1}, 4),
                                random_model(MpnnKind::SumAgg, {1, 3, 2}, {1}, 5)};
  const auto first = correlate(models, c, 3, 40, 9);
  const auto second = correlate(models, c, 3, 40, 9);
  REQUIRE(first.size() == 2);
  for (size_t k = 0; k < first.size(); ++k) {
    REQUIRE(first[k].points.size() == 40);
    CHECK_FALSE(first[k].degenerate);
    CHECK(std::isfinite(first[k].r));
    CHECK(std::abs(first[k].r) <= 1.0 + 1e-12);
    CHECK(first[k].r == second[k].r);
    for (size_t p = 0; p < first[k].points.size(); ++p) {
      CHECK(first[k].points[p].fd == second[k].points[p].fd);
      CHECK(first[k].points[p].output_distance == second[k].points[p].output_distance);
      CHECK(first[k].points[p].fd >= 0.0);
    }
  }

  MpnnModel zero = models[0];
  for (MpnnLayer& l : zero.layers) {
    l.w1.setZero();
    l.w2.setZero();
  }
  const auto degenerate = correlate({zero}, c, 3, 25, 9);
  CHECK(degenerate[0].degenerate);
  CHECK(std::isnan(degenerate[0].r));

  GraphCollection single;
  single.graphs = {cycle_graph(5)};
  single.d = 1;
  const auto self = correlate({models[0]}, single, 2, 10, 3);
  CHECK(self[0].degenerate);
  for (const ScatterPoint& p : self[0].points) {
    CHECK(p.fd == 0.0);
    CHECK(p.output_distance == 0.0);
  }

  CHECK(thrown_code([&] { correlate(models, GraphCollection{}, 3, 10, 1); }) ==
        Errc::EmptyCollection);
}

TEST_CASE("model and scatter files round-trip") {
  namespace fs = std::filesystem;
  const MpnnModel m = random_model(MpnnKind::MeanAgg, {2, 3, 2}, {2, 1}, 77);
  const std::string model_path = "mpnn_model_test.json";
  write_model_json(model_path, m);
  const MpnnModel back = read_model_json(model_path);
  CHECK(back.kind == m.kind);
  CHECK(back.seed == m.seed);
  REQUIRE(back.layers.size() == m.layers.size());
  std::mt19937_64 rng(4);
  const LabeledGraph g = testrand::random_graph(rng, 6, 2);
  CHECK(forward(back, g).output == forward(m, g).output);
  write_model_json(model_path, back);
  std::stringstream one, two;
  one << std::ifstream(model_path).rdbuf();
  write_model_json(model_path, m);
  two << std::ifstream(model_path).rdbuf();
  CHECK(one.str() == two.str());
  fs::remove(model_path);

  const std::vector<ScatterPoint> pts{{0.0, 0.0}, {1.5, 0.25}, {2.0, 1.0 / 3.0}};
  const std::string csv_path = "mpnn_scatter_test.csv";
  write_scatter_csv(csv_path, pts);
  std::stringstream body;
  body << std::ifstream(csv_path).rdbuf();
  std::string line;
  std::getline(body, line);
  CHECK(line == "fd,output_distance");
  int lines = 0;
  while (std::getline(body, line)) ++lines;
  CHECK(lines == 3);
  fs::remove(csv_path);
}

TEST_CASE("dimension validation") {
  MpnnModel bad = random_model(MpnnKind::SumAgg, {2, 3, 2}, {1}, 0);
  bad.layers[1].w1 = Eigen::MatrixXd::Zero(4, 2);
  bad.layers[1].w2 = Eigen::MatrixXd::Zero(4, 2);
  CHECK(thrown_code([&] { forward(bad, path_graph(3)); }) == Errc::DimMismatch);

  MpnnModel ragged = random_model(MpnnKind::SumAgg, {1, 2}, {1}, 0);
  ragged.layers[0].w2 = Eigen::MatrixXd::Zero(1, 3);
  CHECK(thrown_code([&] { forward(ragged, path_graph(3)); }) == Errc::DimMismatch);

  // A head that does not end in one column is rejected at construction.
  CHECK(thrown_code([] { random_model(MpnnKind::SumAgg, {1, 2}, {2}, 0); }) ==
        Errc::DimMismatch);

  const MpnnModel ok = random_model(MpnnKind::SumAgg, {2, 2}, {1}, 0);
  CHECK(thrown_code([&] { forward(ok, path_graph(3)); }) == Errc::DimMismatch);

  MpnnModel empty;
  CHECK(thrown_code([&] { lipschitz_bound(empty); }) == Errc::BadArgument);
}

}
