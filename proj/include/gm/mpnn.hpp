#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gm/graph.hpp"

namespace gm {

// The three layer families.  With row-vector features h (one vertex per row),
// A the adjacency matrix, N(v) the neighbors of v and ReLU applied entrywise:
//   OrderNormalizedSum: h_v <- ReLU((1/n) sum_{u in N(v)} h_u W2)   (W1 unused)
//   SumAgg:             h_v <- ReLU(h_v W1 + sum_{u in N(v)} h_u W2)
//   MeanAgg:            h_v <- ReLU(h_v W1 + (1/|N(v)|) sum_{u in N(v)} h_u W2)
// MeanAgg treats the neighbor mean of an isolated vertex as the zero vector.
enum class MpnnKind { OrderNormalizedSum, SumAgg, MeanAgg };

struct MpnnLayer {
  Eigen::MatrixXd w1, w2;  // both d_{t-1} x d_t; ReLU follows the affine map
};

// Readout: order-normalized mean pooling of the final embeddings, then an FNN
// head applying ReLU after every matrix (including the last).  The head must
// end in one column so the model produces a scalar; an empty head is allowed
// when the last layer is already one-dimensional.
struct MpnnModel {
  MpnnKind kind = MpnnKind::SumAgg;
  std::vector<MpnnLayer> layers;
  std::vector<Eigen::MatrixXd> head;
  uint64_t seed = 0;
};

// Entries i.i.d. uniform on [-a, a], a = sqrt(6/(rows+cols)), drawn from a
// seeded 64-bit Mersenne Twister (W1 row-major, then W2, layer by layer, then
// the head); reproducible across platforms.  dims chains the per-layer widths
// {d_0, ..., d_L}; head_dims the head widths ending in 1 (or empty if d_L=1).
MpnnModel random_model(MpnnKind kind, const std::vector<int>& dims,
                       const std::vector<int>& head_dims, uint64_t seed);

struct ForwardResult {
  Eigen::MatrixXd embeddings;          // n x d_L, one vertex per row
  Eigen::RowVectorXd pooled;           // (1/n) * column sums of embeddings
  Eigen::RowVectorXd graph_embedding;  // head applied to pooled
  double output = 0.0;                 // the single entry of graph_embedding
};

ForwardResult forward(const MpnnModel& m, const LabeledGraph& g);

// Operator-norm upper bounds per stage under the 2-norm, each estimated by 50
// power-iteration steps plus 1% slack (never asserted tight).  A layer's
// constant is the spectral norm of [W1; W2] stacked (of W2 alone for
// OrderNormalizedSum); ReLU contributes factor 1.  l_psi bounds the readout
// head; l_fnn aliases it, the head being the model's FNN.
struct LipschitzBudget {
  std::vector<double> per_layer;
  double l_psi = 1.0;
  double l_fnn = 1.0;
  double product = 1.0;  // l_psi * product of per_layer
};

LipschitzBudget lipschitz_bound(const MpnnModel& m);

struct ScatterPoint {
  double fd = 0.0;
  double output_distance = 0.0;
};

struct CorrelationResult {
  double r = 0.0;          // NaN when degenerate
  bool degenerate = false;  // a coordinate had zero variance
  std::vector<ScatterPoint> points;
};

// Samples `pairs` distinct-index pairs from the collection (seeded, the same
// pairs for every model), pairs each forest distance at the given depth with
// the output distance |h(G)-h(H)|, and reports the Pearson correlation.
// Requires a non-empty collection of graphs of one common order.
std::vector<CorrelationResult> correlate(const std::vector<MpnnModel>& models,
                                         const GraphCollection& c, int depth,
                                         int pairs, uint64_t seed);

// CSV "fd,output_distance", one sample per line, %.17g values.
void write_scatter_csv(const std::string& path, const std::vector<ScatterPoint>& pts);

// JSON object {kind, seed, layers: [{w1, w2}], head}, matrices as row arrays.
void write_model_json(const std::string& path, const MpnnModel& m);
MpnnModel read_model_json(const std::string& path);

}  // namespace gm
