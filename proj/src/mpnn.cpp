#include "gm/mpnn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gm/error.hpp"
#include "gm/metrics.hpp"

namespace gm {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) w(i, j) = a * (2.0 * uniform01(rng) - 1.0);
  return w;
}

void validate_model(const MpnnModel& m) {
  if (m.layers.empty()) fail(Errc::BadArgument, "model needs at least one layer");
  for (size_t t = 0; t < m.layers.size(); ++t) {
    const MpnnLayer& l = m.layers[t];
    if (l.w1.rows() != l.w2.rows() || l.w1.cols() != l.w2.cols())
      fail(Errc::DimMismatch, "layer " + std::to_string(t) + " W1/W2 shapes differ");
    if (l.w1.rows() < 1 || l.w1.cols() < 1)
      fail(Errc::DimMismatch, "layer " + std::to_string(t) + " has an empty matrix");
    if (t > 0 && m.layers[t - 1].w1.cols() != l.w1.rows())
      fail(Errc::DimMismatch, "layer " + std::to_string(t) + " input width " +
                                  std::to_string(l.w1.rows()) + " != previous output " +
                                  std::to_string(m.layers[t - 1].w1.cols()));
  }
  Eigen::Index width = m.layers.back().w1.cols();
  for (size_t k = 0; k < m.head.size(); ++k) {
    if (m.head[k].rows() != width)
      fail(Errc::DimMismatch, "head matrix " + std::to_string(k) + " input width " +
                                  std::to_string(m.head[k].rows()) + " != " +
                                  std::to_string(width));
    width = m.head[k].cols();
  }
  if (width != 1)
    fail(Errc::DimMismatch,
         "readout must end in one column, got " + std::to_string(width));
}

Eigen::MatrixXd relu(Eigen::MatrixXd x) { return x.cwiseMax(0.0); }

// Estimated largest singular value: 50 rounds of the power iteration on
// M^T M from a fixed pseudo-random start, plus 1% slack.  The estimate
// converges from below; the slack and the generic start vector make the
// returned value an upper bound in practice (documented, never assumed tight).
double spectral_bound(const Eigen::MatrixXd& m) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  Eigen::VectorXd v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform01(rng) + 0.5;
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    sigma2 = v.dot(w);
    v = w / norm;
  }
  return 1.01 * std::sqrt(std::max(sigma2, 0.0));
}

std::vector<double> batch_outputs(const MpnnModel& m, const GraphCollection& c) {
  std::vector<double> out(c.graphs.size());
#pragma omp parallel for schedule(dynamic) if (c.graphs.size() > 8)
  for (size_t i = 0; i < c.graphs.size(); ++i) out[i] = forward(m, c.graphs[i]).output;
  return out;
}

std::string kind_name(MpnnKind k) {
  switch (k) {
    case MpnnKind::OrderNormalizedSum: return "order-normalized-sum";
    case MpnnKind::SumAgg: return "sum";
    case MpnnKind::MeanAgg: return "mean";
  }
  fail(Errc::BadArgument, "unknown layer kind");
}

MpnnKind kind_of(const std::string& name) {
  if (name == "order-normalized-sum") return MpnnKind::OrderNormalizedSum;
  if (name == "sum") return MpnnKind::SumAgg;
  if (name == "mean") return MpnnKind::MeanAgg;
  fail(Errc::BadArgument, "unknown layer kind '" + name + "'");
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_of_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
    fail(Errc::MalformedLine, "matrix must be a non-empty array of rows");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m.cols())
      fail(Errc::MalformedLine, "ragged matrix rows");
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace

MpnnModel random_model(MpnnKind kind, const std::vector<int>& dims,
                       const std::vector<int>& head_dims, uint64_t seed) {
  if (dims.size() < 2) fail(Errc::BadArgument, "dims must chain at least d0 -> d1");
  MpnnModel m;
  m.kind = kind;
  m.seed = seed;
  std::mt19937_64 rng(seed);
  for (size_t t = 1; t < dims.size(); ++t) {
    if (dims[t - 1] < 1 || dims[t] < 1) fail(Errc::BadArgument, "widths must be >= 1");
    MpnnLayer layer;
    layer.w1 = random_matrix(dims[t - 1], dims[t], rng);
    layer.w2 = random_matrix(dims[t - 1], dims[t], rng);
    m.layers.push_back(std::move(layer));
  }
  int width = dims.back();
  for (int next : head_dims) {
    if (next < 1) fail(Errc::BadArgument, "widths must be >= 1");
    m.head.push_back(random_matrix(width, next, rng));
    width = next;
  }
  validate_model(m);
  return m;
}

ForwardResult forward(const MpnnModel& m, const LabeledGraph& g) {
  validate_model(m);
  if (g.d != static_cast<int>(m.layers[0].w1.rows()))
    fail(Errc::DimMismatch, "graph features have dimension " + std::to_string(g.d) +
                                ", model expects " +
                                std::to_string(m.layers[0].w1.rows()));
  Eigen::MatrixXd h(g.n, g.d);
  for (int v = 0; v < g.n; ++v)
    for (int j = 0; j < g.d; ++j) h(v, j) = g.features[v][j];

  // Neighbor aggregation matrix: adjacency, scaled per kind.
  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(g.n, g.n);
  for (auto [u, v] : g.edges) agg(u, v) = agg(v, u) = 1.0;
  if (m.kind == MpnnKind::OrderNormalizedSum) {
    agg /= static_cast<double>(g.n);
  } else if (m.kind == MpnnKind::MeanAgg) {
    for (int v = 0; v < g.n; ++v) {
      const double deg = agg.row(v).sum();
      if (deg > 0.0) agg.row(v) /= deg;
    }
  }

  for (const MpnnLayer& l : m.layers) {
    if (m.kind == MpnnKind::OrderNormalizedSum)
      h = relu(agg * h * l.w2);
    else
      h = relu(h * l.w1 + agg * h * l.w2);
  }

  ForwardResult r;
  r.embeddings = h;
  r.pooled = h.colwise().sum() / static_cast<double>(g.n);
  Eigen::RowVectorXd x = r.pooled;
  for (const Eigen::MatrixXd& w : m.head) x = relu(x * w);
  r.graph_embedding = x;
  r.output = x(0);
  return r;
}

LipschitzBudget lipschitz_bound(const MpnnModel& m) {
  validate_model(m);
  LipschitzBudget b;
  for (const MpnnLayer& l : m.layers) {
    double c;
    if (m.kind == MpnnKind::OrderNormalizedSum) {
      c = spectral_bound(l.w2);
    } else {
      Eigen::MatrixXd stacked(2 * l.w1.rows(), l.w1.cols());
      stacked.topRows(l.w1.rows()) = l.w1;
      stacked.bottomRows(l.w2.rows()) = l.w2;
      c = spectral_bound(stacked);
    }
    b.per_layer.push_back(c);
  }
  b.l_psi = 1.0;
  for (const Eigen::MatrixXd& w : m.head) b.l_psi *= spectral_bound(w);
  b.l_fnn = b.l_psi;
  b.product = b.l_psi;
  for (double c : b.per_layer) b.product *= c;
  return b;
}

std::vector<CorrelationResult> correlate(const std::vector<MpnnModel>& models,
                                         const GraphCollection& c, int depth,
                                         int pairs, uint64_t seed) {
  validate(c);
  if (c.graphs.empty()) fail(Errc::EmptyCollection, "nothing to correlate");
  for (const auto& g : c.graphs)
    if (g.n != c.graphs[0].n)
      fail(Errc::OrderMismatch, "collection must be padded to one common order");
  if (pairs < 1) fail(Errc::BadArgument, "need at least one sample pair");
  for (const MpnnModel& m : models) validate_model(m);

  const int count = static_cast<int>(c.graphs.size());
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> sample;
  for (int k = 0; k < pairs; ++k) {
    int i = static_cast<int>(rng() % count), j = static_cast<int>(rng() % count);
    while (count > 1 && i == j) j = static_cast<int>(rng() % count);
    sample.emplace_back(i, j);
  }

  std::vector<double> fd(sample.size());
  for (size_t k = 0; k < sample.size(); ++k)
    fd[k] = forest_distance(c.graphs[sample[k].first], c.graphs[sample[k].second], depth);

  std::vector<CorrelationResult> results;
  for (const MpnnModel& m : models) {
    const std::vector<double> out = batch_outputs(m, c);
    CorrelationResult res;
    for (size_t k = 0; k < sample.size(); ++k)
      res.points.push_back(
          {fd[k], std::abs(out[sample[k].first] - out[sample[k].second])});
    double mx = 0.0, my = 0.0;
    for (const ScatterPoint& p : res.points) {
      mx += p.fd;
      my += p.output_distance;
    }
    mx /= static_cast<double>(res.points.size());
    my /= static_cast<double>(res.points.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const ScatterPoint& p : res.points) {
      sxx += (p.fd - mx) * (p.fd - mx);
      syy += (p.output_distance - my) * (p.output_distance - my);
      sxy += (p.fd - mx) * (p.output_distance - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
      res.degenerate = true;
      res.r = std::numeric_limits<double>::quiet_NaN();
    } else {
      res.r = sxy / std::sqrt(sxx * syy);
    }
    results.push_back(std::move(res));
  }
  return results;
}

void write_scatter_csv(const std::string& path, const std::vector<ScatterPoint>& pts) {
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << "fd,output_distance\n";
  char buf[64];
  for (const ScatterPoint& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g", p.fd);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", p.output_distance);
    out << buf << "\n";
  }
}

void write_model_json(const std::string& path, const MpnnModel& m) {
  validate_model(m);
  nlohmann::json j;
  j["kind"] = kind_name(m.kind);
  j["seed"] = m.seed;
  j["layers"] = nlohmann::json::array();
  for (const MpnnLayer& l : m.layers)
    j["layers"].push_back({{"w1", matrix_json(l.w1)}, {"w2", matrix_json(l.w2)}});
  j["head"] = nlohmann::json::array();
  for (const Eigen::MatrixXd& w : m.head) j["head"].push_back(matrix_json(w));
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

MpnnModel read_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::MissingFile, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::MalformedLine, std::string("bad model json: ") + e.what());
  }
  try {
    MpnnModel m;
    m.kind = kind_of(j.at("kind").get<std::string>());
    m.seed = j.at("seed").get<uint64_t>();
    for (const auto& l : j.at("layers"))
      m.layers.push_back({matrix_of_json(l.at("w1")), matrix_of_json(l.at("w2"))});
    for (const auto& w : j.at("head")) m.head.push_back(matrix_of_json(w));
    validate_model(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::MalformedLine, std::string("bad model json: ") + e.what());
  }
}

}  // namespace gm
