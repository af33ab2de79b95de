#include "gm/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "gm/error.hpp"

namespace gm {

namespace {

constexpr double kLog2 = 0.69314718055994530941723212145818;

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    fail(Errc::BadDelta, "delta must lie in (0,1)");
}

void check_count(double value, const char* what) {
  if (!std::isfinite(value) || value < 1.0)
    fail(Errc::BadCount, std::string(what) + " must be at least 1");
}

void check_nonneg(double value, const char* what) {
  if (!std::isfinite(value) || value < 0.0)
    fail(Errc::BadArgument, std::string(what) + " must be non-negative");
}

// M sqrt((2 K log 2 + 2 log(1/delta)) / S), shared by every robust bound.
double concentration_term(double cell_count, double loss_bound, double delta,
                          double sample_size) {
  return loss_bound *
         std::sqrt((2.0 * cell_count * kLog2 + 2.0 * std::log(1.0 / delta)) /
                   sample_size);
}

BoundReport finish(BoundReport r) {
  r.value = r.robustness + r.concentration;
  return r;
}

void check_lipschitz(const EmbeddingLipschitz& lip) {
  check_nonneg(lip.l_loss, "l_loss");
  check_nonneg(lip.l_fnn, "l_fnn");
  check_nonneg(lip.c_fd, "c_fd");
  check_count(lip.order, "order");
}

// Shared core of fd_bound and mean_fd_bound; only the formula ids differ.
BoundReport fd_bound_core(const EmbeddingLipschitz& lip,
                          const std::optional<MeasuredCover>& cover,
                          const std::optional<MergedClassCover>& merged,
                          double loss_bound, double delta, double sample_size,
                          const char* cover_id, const char* merged_id) {
  if (cover.has_value() == merged.has_value())
    fail(Errc::ParamConflict,
         "exactly one of the covering / merged-class parameterizations is required");
  check_lipschitz(lip);
  check_nonneg(loss_bound, "loss_bound");
  check_delta(delta);
  check_count(sample_size, "sample_size");
  const double c_tilde = 2.0 / lip.order * lip.l_loss * lip.l_fnn * lip.c_fd;

  BoundReport r;
  r.inputs = {{"l_loss", lip.l_loss}, {"l_fnn", lip.l_fnn},
              {"c_fd", lip.c_fd},     {"order", lip.order},
              {"c_tilde", c_tilde},   {"loss_bound", loss_bound},
              {"delta", delta},       {"sample_size", sample_size}};
  if (cover) {
    check_count(cover->covering_number, "covering_number");
    if (!std::isfinite(cover->epsilon) || cover->epsilon < 0.0)
      fail(Errc::BadEpsilon, "epsilon must be non-negative");
    r.formula = cover_id;
    r.inputs.emplace_back("epsilon", cover->epsilon);
    r.inputs.emplace_back("cells", cover->covering_number);
    r.robustness = c_tilde * cover->epsilon;
    r.concentration = concentration_term(2.0 * cover->covering_number,
                                         loss_bound, delta, sample_size);
  } else {
    check_count(merged->classes, "classes");
    check_nonneg(merged->k, "k");
    check_nonneg(merged->single_edit_bound, "single_edit_bound");
    const double cells = std::ceil(merged->classes / (merged->k + 1.0));
    r.formula = merged_id;
    r.inputs.emplace_back("classes", merged->classes);
    r.inputs.emplace_back("k", merged->k);
    r.inputs.emplace_back("single_edit_bound", merged->single_edit_bound);
    r.inputs.emplace_back("cells", cells);
    r.robustness = 2.0 * c_tilde * merged->single_edit_bound * merged->k;
    r.concentration =
        concentration_term(2.0 * cells, loss_bound, delta, sample_size);
  }
  return finish(r);
}

const char* variant_name(TreeDistanceVariant v) {
  switch (v) {
    case TreeDistanceVariant::Covering: return "tree-distance-covering";
    case TreeDistanceVariant::TreeConstruction: return "tree-distance-tree-construction";
    case TreeDistanceVariant::Otter: return "tree-distance-otter";
    case TreeDistanceVariant::UpToN: return "tree-distance-up-to-n";
  }
  fail(Errc::BadArgument, "unknown tree-distance variant");
}

}  // namespace

BoundReport xu_mannor_bound(double cell_count, double epsilon, double loss_bound,
                            double delta, double sample_size) {
  check_count(cell_count, "cell_count");
  if (!std::isfinite(epsilon) || epsilon < 0.0)
    fail(Errc::BadEpsilon, "epsilon must be non-negative");
  check_nonneg(loss_bound, "loss_bound");
  check_delta(delta);
  check_count(sample_size, "sample_size");

  BoundReport r;
  r.formula = "xu-mannor";
  r.inputs = {{"cell_count", cell_count}, {"epsilon", epsilon},
              {"loss_bound", loss_bound}, {"delta", delta},
              {"sample_size", sample_size}};
  r.robustness = epsilon;
  r.concentration = concentration_term(cell_count, loss_bound, delta, sample_size);
  return finish(r);
}

BoundReport extended_bound(const std::vector<std::pair<double, double>>& cells,
                           double cell_count, double loss_bound, double delta,
                           double sample_size) {
  check_count(cell_count, "cell_count");
  check_nonneg(loss_bound, "loss_bound");
  check_delta(delta);
  check_count(sample_size, "sample_size");
  double population = 0.0;
  double weighted = 0.0;
  for (const auto& [members, eps] : cells) {
    check_nonneg(members, "cell population");
    if (!std::isfinite(eps) || eps < 0.0)
      fail(Errc::BadEpsilon, "cell radius must be non-negative");
    population += members;
    weighted += members * eps;
  }
  if (population > sample_size)
    fail(Errc::CellOverflow, "cell populations exceed the sample size");

  BoundReport r;
  r.formula = "extended-robustness";
  r.inputs = {{"cell_count", cell_count},   {"occupied", double(cells.size())},
              {"population", population},   {"loss_bound", loss_bound},
              {"delta", delta},             {"sample_size", sample_size}};
  r.robustness = weighted / sample_size;
  r.concentration = concentration_term(cell_count, loss_bound, delta, sample_size);
  return finish(r);
}

BoundReport kawaguchi_bound(double zeta, double occupied, double cell_count,
                            double epsilon, double delta, double sample_size,
                            double empirical_loss) {
  check_nonneg(zeta, "zeta");
  check_count(occupied, "occupied cell count");
  check_count(cell_count, "cell_count");
  if (occupied > cell_count)
    fail(Errc::BadCount, "occupied cells cannot exceed the cell count");
  if (!std::isfinite(epsilon) || epsilon < 0.0)
    fail(Errc::BadEpsilon, "epsilon must be non-negative");
  check_delta(delta);
  check_count(sample_size, "sample_size");
  check_nonneg(empirical_loss, "empirical_loss");

  const double t = occupied * std::log(2.0 * cell_count / delta) / sample_size;
  BoundReport r;
  r.formula = "kawaguchi";
  r.inputs = {{"zeta", zeta},
              {"occupied", occupied},
              {"cell_count", cell_count},
              {"epsilon", epsilon},
              {"delta", delta},
              {"sample_size", sample_size},
              {"empirical_loss", empirical_loss}};
  r.robustness = empirical_loss + epsilon;
  r.concentration = zeta * ((std::sqrt(2.0) + 1.0) * std::sqrt(t) + 2.0 * t);
  return finish(r);
}

BoundReport wl_classification_bound(double classes, double loss_bound,
                                    double delta, double sample_size) {
  check_count(classes, "classes");
  check_nonneg(loss_bound, "loss_bound");
  check_delta(delta);
  check_count(sample_size, "sample_size");

  BoundReport r;
  r.formula = "wl-classification";
  r.inputs = {{"classes", classes}, {"loss_bound", loss_bound},
              {"delta", delta},     {"sample_size", sample_size}};
  r.robustness = 0.0;
  r.concentration = concentration_term(classes, loss_bound, delta, sample_size);
  return finish(r);
}

BoundReport wl_regression_bound(double classes, double loss_bound, double delta,
                                double sample_size, double epsilon) {
  check_count(classes, "classes");
  check_nonneg(loss_bound, "loss_bound");
  check_delta(delta);
  check_count(sample_size, "sample_size");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    fail(Errc::BadEpsilon, "regression epsilon must lie in (0,1)");

  BoundReport r;
  r.formula = "wl-regression";
  r.inputs = {{"classes", classes}, {"loss_bound", loss_bound},
              {"delta", delta},     {"sample_size", sample_size},
              {"epsilon", epsilon}};
  r.robustness = 4.0 * epsilon;
  r.concentration =
      concentration_term(classes / epsilon, loss_bound, delta, sample_size);
  return finish(r);
}

BoundReport fd_bound(const EmbeddingLipschitz& lip,
                     const std::optional<MeasuredCover>& cover,
                     const std::optional<MergedClassCover>& merged,
                     double loss_bound, double delta, double sample_size) {
  return fd_bound_core(lip, cover, merged, loss_bound, delta, sample_size,
                       "fd-covering", "fd-merged-classes");
}

BoundReport mean_fd_bound(const EmbeddingLipschitz& lip,
                          const std::optional<MeasuredCover>& cover,
                          const std::optional<MergedClassCover>& merged,
                          double loss_bound, double delta, double sample_size) {
  return fd_bound_core(lip, cover, merged, loss_bound, delta, sample_size,
                       "mean-fd-covering", "mean-fd-merged-classes");
}

double gamma_inverse_at(const GammaInverseTable& t, double x) {
  if (t.points.empty())
    fail(Errc::MissingGammaInverse, "gamma-inverse table is empty");
  for (size_t i = 0; i < t.points.size(); ++i) {
    const auto& [xi, yi] = t.points[i];
    if (!std::isfinite(xi) || !std::isfinite(yi) || yi < 0.0)
      fail(Errc::BadArgument, "gamma-inverse table entries must be finite and non-negative");
    if (i > 0 && (xi <= t.points[i - 1].first || yi < t.points[i - 1].second))
      fail(Errc::BadArgument,
           "gamma-inverse arguments must increase and values must not decrease");
  }
  if (!std::isfinite(x) || x < 0.0)
    fail(Errc::BadArgument, "gamma-inverse argument must be non-negative");
  if (x <= t.points.front().first) return t.points.front().second;
  if (x >= t.points.back().first) return t.points.back().second;
  for (size_t i = 1; i < t.points.size(); ++i) {
    const auto& [x1, y1] = t.points[i];
    if (x > x1) continue;
    const auto& [x0, y0] = t.points[i - 1];
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
  return t.points.back().second;  // unreachable
}

BoundReport tree_distance_bound(const TreeDistanceBoundInputs& in) {
  if (in.gamma_inverse.points.empty())
    fail(Errc::MissingGammaInverse,
         "tree-distance bounds need a gamma-inverse table");
  check_count(in.order, "order");
  check_nonneg(in.l_loss, "l_loss");
  check_nonneg(in.l_fnn, "l_fnn");
  check_count(in.count, "count");
  check_nonneg(in.loss_bound, "loss_bound");
  check_delta(in.delta);
  check_count(in.sample_size, "sample_size");
  check_nonneg(in.epsilon, "epsilon");
  check_nonneg(in.k, "k");

  const double n = in.order;
  double cells = 0.0;
  double rob = 0.0;
  switch (in.variant) {
    case TreeDistanceVariant::Covering:
      cells = in.count;
      rob = in.l_loss * in.l_fnn *
            gamma_inverse_at(in.gamma_inverse, 2.0 * in.epsilon / (n * n));
      break;
    case TreeDistanceVariant::TreeConstruction:
      cells = in.count / (in.k + 1.0);
      rob = in.l_loss * in.l_fnn *
            gamma_inverse_at(in.gamma_inverse, 8.0 * in.k / (n * n));
      break;
    case TreeDistanceVariant::Otter: {
      const double order = 2.0 * n + 1.0;
      cells = in.count / std::pow(kOtterGrowth, 2.0 * in.k);
      rob = in.l_loss * in.l_fnn *
            gamma_inverse_at(in.gamma_inverse, 16.0 * in.k / (order * order));
      break;
    }
    case TreeDistanceVariant::UpToN: {
      if (n != std::floor(n) || in.per_order_sample.size() != size_t(n))
        fail(Errc::BadArgument,
             "per-order sample counts must cover orders 1..n exactly");
      double population = 0.0;
      double weighted = 0.0;
      for (size_t i = 0; i < in.per_order_sample.size(); ++i) {
        const double members = in.per_order_sample[i];
        check_nonneg(members, "per-order sample count");
        const double order = double(i + 1);
        population += members;
        weighted += members * gamma_inverse_at(in.gamma_inverse,
                                               8.0 * in.k / (order * order));
      }
      if (population > in.sample_size)
        fail(Errc::CellOverflow, "per-order sample counts exceed the sample size");
      cells = in.count / (in.k + 1.0);
      rob = in.l_loss * in.l_fnn * weighted / in.sample_size;
      break;
    }
  }

  BoundReport r;
  r.formula = variant_name(in.variant);
  r.inputs = {{"order", n},
              {"l_loss", in.l_loss},
              {"l_fnn", in.l_fnn},
              {"count", in.count},
              {"epsilon", in.epsilon},
              {"k", in.k},
              {"cells", cells},
              {"loss_bound", in.loss_bound},
              {"delta", in.delta},
              {"sample_size", in.sample_size}};
  r.robustness = rob;
  r.concentration =
      concentration_term(2.0 * cells, in.loss_bound, in.delta, in.sample_size);
  return finish(r);
}

BoundReport vc_bound(double dimension, double delta, double sample_size) {
  check_count(dimension, "dimension");
  check_delta(delta);
  check_count(sample_size, "sample_size");

  const double log_arg = std::log(std::exp(1.0) * sample_size / dimension);
  BoundReport r;
  r.formula = "vc";
  r.inputs = {{"dimension", dimension},
              {"delta", delta},
              {"sample_size", sample_size},
              {"log_term", log_arg}};
  r.log_warning = log_arg <= 0.0;
  r.robustness = std::sqrt(2.0 * dimension * log_arg / sample_size);
  r.concentration = std::sqrt(std::log(1.0 / delta) / (2.0 * sample_size));
  return finish(r);
}

BoundScan scan_parameter(const std::string& name, const std::vector<double>& grid,
                         const std::function<BoundReport(double)>& eval) {
  if (grid.empty()) fail(Errc::BadArgument, "scan grid must be non-empty");
  BoundScan s;
  s.parameter = name;
  s.grid = grid;
  s.reports.reserve(grid.size());
  for (double x : grid) s.reports.push_back(eval(x));
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.reports.size(); ++i) {
    if (std::isfinite(s.reports[i].value) && s.reports[i].value < best) {
      best = s.reports[i].value;
      s.best = i;
    }
  }
  return s;
}

BoundScan wl_regression_scan(double classes, double loss_bound, double delta,
                             double sample_size, const std::vector<double>& grid) {
  return scan_parameter("epsilon", grid, [&](double eps) {
    return wl_regression_bound(classes, loss_bound, delta, sample_size, eps);
  });
}

BoundScan fd_bound_k_scan(const EmbeddingLipschitz& lip, double classes,
                          double single_edit_bound, double loss_bound,
                          double delta, double sample_size, int k_max,
                          bool mean) {
  if (k_max < 0) fail(Errc::BadArgument, "k_max must be non-negative");
  std::vector<double> grid(size_t(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) grid[size_t(k)] = double(k);
  return scan_parameter("k", grid, [&](double k) {
    const MergedClassCover merged{classes, k, single_edit_bound};
    return mean ? mean_fd_bound(lip, std::nullopt, merged, loss_bound, delta,
                                sample_size)
                : fd_bound(lip, std::nullopt, merged, loss_bound, delta,
                           sample_size);
  });
}

void write_bound_json(const std::string& path, const BoundReport& r) {
  nlohmann::ordered_json j;
  j["formula"] = r.formula;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [key, val] : r.inputs) inputs[key] = val;
  j["inputs"] = inputs;
  j["robustness"] = r.robustness;
  j["concentration"] = r.concentration;
  j["value"] = r.value;
  j["log_warning"] = r.log_warning;
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

void write_scan_csv(const std::string& path, const BoundScan& s) {
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << s.parameter << ",robustness,concentration,value\n";
  char line[256];
  for (size_t i = 0; i < s.reports.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", s.grid[i],
                  s.reports[i].robustness, s.reports[i].concentration,
                  s.reports[i].value);
    out << line;
  }
}

}  // namespace gm
