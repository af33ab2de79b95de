#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gm {

// Closed-form generalization-bound evaluators.  Every bound here splits into
// a robustness term (how much the loss can vary inside one partition cell)
// and a concentration term (sampling deviation over the cells); the reported
// value is exactly their sum.  All evaluators are pure double arithmetic and
// deterministic.

struct BoundReport {
  std::string formula;  // evaluator identifier, e.g. "xu-mannor"
  std::vector<std::pair<std::string, double>> inputs;  // echoed, insertion order
  double robustness = 0.0;     // for the VC bound: the capacity term
  double concentration = 0.0;  // for the VC bound: the confidence term
  double value = 0.0;          // robustness + concentration, computed as such
  bool log_warning = false;    // a log argument was non-positive (value may be NaN)
};

// epsilon + M sqrt((2 K log 2 + 2 log(1/delta)) / sample_size): the
// generalization gap of a (K, epsilon)-robust learner with loss bounded by M,
// valid with probability 1 - delta.
BoundReport xu_mannor_bound(double cell_count, double epsilon, double loss_bound,
                            double delta, double sample_size);

// Per-cell radii variant: the robustness term becomes the sample-weighted
// average sum_i (|N_i|/sample_size) eps_i over the occupied cells, given as
// (|N_i|, eps_i) pairs; the concentration term is unchanged.  Cell populations
// must not exceed the sample size (CellOverflow).
BoundReport extended_bound(const std::vector<std::pair<double, double>>& cells,
                           double cell_count, double loss_bound, double delta,
                           double sample_size);

// Data-dependent upper bound on the expected loss: empirical_loss + epsilon +
// zeta ((sqrt(2)+1) sqrt(t) + 2 t) with t = occupied log(2 cell_count / delta)
// / sample_size, where `occupied` counts cells holding at least one sample
// point and zeta bounds the learned predictor's loss over the whole space.
// Requires 1 <= occupied <= cell_count.
BoundReport kawaguchi_bound(double zeta, double occupied, double cell_count,
                            double epsilon, double delta, double sample_size,
                            double empirical_loss);

// Gap for classifiers whose expressivity is capped by 1-WL after L rounds:
// loss_bound sqrt((2 classes log 2 + 2 log(1/delta)) / sample_size), where
// `classes` counts the 1-WL-after-L equivalence classes of the graph space.
BoundReport wl_classification_bound(double classes, double loss_bound,
                                    double delta, double sample_size);

// Regression analogue with absolute-difference loss on (0,1): 4 epsilon +
// loss_bound sqrt(((2/epsilon) classes log 2 + 2 log(1/delta)) / sample_size)
// for 0 < epsilon < 1 (BadEpsilon otherwise).  Smaller epsilon shrinks the
// first term but inflates the cell count, so the bound is minimized on a grid
// via wl_regression_scan.
BoundReport wl_regression_bound(double classes, double loss_bound, double delta,
                                double sample_size, double epsilon);

// Coefficients of the embedding-Lipschitz constant C~ = (2/order) l_loss
// l_fnn c_fd, where c_fd bounds order * ||h_G - h_H|| / FD_L(G, H) over the
// model class and l_loss / l_fnn are the loss and readout Lipschitz constants.
struct EmbeddingLipschitz {
  double l_loss = 1.0;
  double l_fnn = 1.0;
  double c_fd = 1.0;
  double order = 1.0;  // graph order n
};

// Direct parameterization by a measured covering number: `covering_number`
// balls of radius `epsilon` under the forest distance.
struct MeasuredCover {
  double covering_number = 1.0;
  double epsilon = 0.0;
};

// Parameterization by the class-merging construction: classes at most k edits
// apart on the labeled cover tree share a cell, giving ceil(classes/(k+1))
// cells whose forest-distance radius is single_edit_bound * k (one edge or
// feature edit moves a graph by at most single_edit_bound).
struct MergedClassCover {
  double classes = 1.0;            // 1-WL (or 1-MWL) class count
  double k = 0.0;                  // merge depth in edits
  double single_edit_bound = 0.0;  // distance bound for a single edit
};

// Forest-distance generalization gap for sum-aggregation models.  Exactly one
// of `cover` / `merged` must be supplied (ParamConflict otherwise):
//   cover:  C~ eps + M sqrt((4 N log 2 + 2 log(1/delta)) / sample_size)
//   merged: 2 C~ b k + same concentration with N = ceil(classes/(k+1))
// At eps = 0 the covering form reduces to the pure concentration term.
BoundReport fd_bound(const EmbeddingLipschitz& lip,
                     const std::optional<MeasuredCover>& cover,
                     const std::optional<MergedClassCover>& merged,
                     double loss_bound, double delta, double sample_size);

// Mean-aggregation mirror of fd_bound: identical formulas with the
// mean-variant coefficients (mean-forest c_fd, mean edit bound, 1-MWL counts).
BoundReport mean_fd_bound(const EmbeddingLipschitz& lip,
                          const std::optional<MeasuredCover>& cover,
                          const std::optional<MergedClassCover>& merged,
                          double loss_bound, double delta, double sample_size);

// User-supplied sample of the non-decreasing modulus-of-continuity inverse
// used by the tree-distance bounds.  Evaluated by linear interpolation
// between points; arguments outside the sampled range clamp to the end
// values.  Arguments must be strictly increasing and values non-decreasing.
struct GammaInverseTable {
  std::vector<std::pair<double, double>> points;  // (argument, value)
};
double gamma_inverse_at(const GammaInverseTable& t, double x);

// How the tree-distance covering number is obtained:
//   Covering:         measured N(epsilon) balls of radius epsilon
//   TreeConstruction: merge k+1 classes per cell, count/(k+1) cells, radius 4k
//   Otter:            full binary trees on 2 order + 1 vertices, count/b^(2k)
//                     cells with b the Wedderburn-Etherington growth rate
//   UpToN:            graphs of order <= order; per-order sample weights
enum class TreeDistanceVariant { Covering, TreeConstruction, Otter, UpToN };

// Growth rate of the Wedderburn-Etherington numbers, w_j ~ A j^(-3/2) b^j.
inline constexpr double kOtterGrowth = 2.4832;

struct TreeDistanceBoundInputs {
  TreeDistanceVariant variant = TreeDistanceVariant::Covering;
  GammaInverseTable gamma_inverse;  // required; MissingGammaInverse when empty
  double order = 1.0;               // n; Otter trees have 2 order + 1 vertices
  double l_loss = 1.0;
  double l_fnn = 1.0;
  // Covering: N(epsilon).  TreeConstruction: class count of order-n graphs.
  // Otter: tree count w_order.  UpToN: class count over orders 1..n.
  double count = 1.0;
  double epsilon = 0.0;  // Covering radius
  double k = 0.0;        // merge depth for the other variants
  double loss_bound = 1.0;
  double delta = 0.1;
  double sample_size = 1.0;
  // UpToN only: sample points of each order 1..order, summing to at most
  // sample_size; the robustness term averages gamma^-1(8k/i^2) over them.
  std::vector<double> per_order_sample;
};

// L_loss L_fnn gamma^-1(arg) + M sqrt((4 cells log 2 + 2 log(1/delta)) / S)
// with (arg, cells) per variant: (2 eps/n^2, N), (8k/n^2, count/(k+1)),
// (16k/(2n+1)^2, count/b^(2k)), (weighted sum of 8k/i^2, count/(k+1)).
// The derived cell count is echoed under "cells".
BoundReport tree_distance_bound(const TreeDistanceBoundInputs& in);

// Vapnik-style gap sqrt(2 d log(e S / d) / S) + sqrt(log(1/delta) / (2 S)).
// When log(e S / d) <= 0 the bound is vacuous: log_warning is set and the
// capacity term is kept as computed (NaN when the radicand is negative).
BoundReport vc_bound(double dimension, double delta, double sample_size);

// One evaluator re-run over a parameter grid, e.g. a delta- or radius-scan.
struct BoundScan {
  std::string parameter;             // scanned input name, e.g. "epsilon"
  std::vector<double> grid;          // parameter values, in evaluation order
  std::vector<BoundReport> reports;  // one per grid value
  std::size_t best = 0;              // index of the smallest finite value
};

// Evaluates `eval` at every grid value; the grid must be non-empty.  `best`
// is the argmin over finite values (ties to the first), or 0 if none are.
BoundScan scan_parameter(const std::string& name, const std::vector<double>& grid,
                         const std::function<BoundReport(double)>& eval);

// Epsilon grid scan of wl_regression_bound.
BoundScan wl_regression_scan(double classes, double loss_bound, double delta,
                             double sample_size, const std::vector<double>& grid);

// Merge-depth scan of fd_bound (or mean_fd_bound when `mean` is set) over
// k = 0..k_max with the merged-class parameterization.
BoundScan fd_bound_k_scan(const EmbeddingLipschitz& lip, double classes,
                          double single_edit_bound, double loss_bound,
                          double delta, double sample_size, int k_max,
                          bool mean = false);

// JSON object {formula, inputs, robustness, concentration, value, log_warning}.
void write_bound_json(const std::string& path, const BoundReport& r);

// CSV "<parameter>,robustness,concentration,value", one row per grid value.
void write_scan_csv(const std::string& path, const BoundScan& s);

}  // namespace gm
