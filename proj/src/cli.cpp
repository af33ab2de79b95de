#include "gm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gm/bounds.hpp"
#include "gm/covering.hpp"
#include "gm/error.hpp"
#include "gm/tu_io.hpp"
#include "gm/wl.hpp"

namespace gm {

namespace {

std::string family_tag(const FamilySpec& s) {
  switch (s.kind) {
    case FamilyKind::AllGraphs: return "G" + std::to_string(s.n);
    case FamilyKind::AllGraphsUpTo: return "Gle" + std::to_string(s.n);
    case FamilyKind::OtterTrees: return "T" + std::to_string(s.n);
    case FamilyKind::PartitionPaths: return "F" + std::to_string(s.n);
    case FamilyKind::BoundedDegreeLabeled:
      return "L" + std::to_string(s.n) + "d" + std::to_string(s.d) + "q" +
             std::to_string(s.q);
  }
  fail(Errc::BadArgument, "unknown family kind");
}

const char* metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::ForestDistance: return "fd";
    case MetricKind::TreeMover: return "tmd";
    case MetricKind::MeanForest: return "mean-fd";
    case MetricKind::DeltaPerm1: return "delta-perm1";
    case MetricKind::DeltaDS1: return "delta-ds1";
    case MetricKind::WlTrivial: return "wl";
  }
  fail(Errc::BadArgument, "unknown metric kind");
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << text;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Coefficient files configure a run, so any problem with them is a
// configuration error (exit 2), unlike dataset problems (exit 3).
nlohmann::json load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    fail(Errc::BadArgument, "cannot open coefficient file " + path);
  try {
    nlohmann::json j;
    in >> j;
    if (!j.is_object())
      fail(Errc::BadArgument, "coefficient file must hold a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadArgument,
         std::string("malformed coefficient file: ") + e.what());
  }
}

double need_number(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail(Errc::BadArgument, "coefficient \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

double number_or(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    fail(Errc::BadArgument, "coefficient \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

GammaInverseTable gamma_table_of(const nlohmann::json& j) {
  if (!j.contains("gamma_inverse") || !j.at("gamma_inverse").is_array())
    fail(Errc::MissingGammaInverse,
         "coefficient \"gamma_inverse\" must be an array of [x, y] pairs");
  GammaInverseTable t;
  for (const auto& p : j.at("gamma_inverse")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      fail(Errc::BadArgument, "gamma_inverse entries must be [x, y] numbers");
    t.points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return t;
}

}  // namespace

GraphCollection load_input(const RunConfig& cfg) {
  const bool have_dataset = !cfg.dataset_dir.empty();
  if (have_dataset && cfg.family)
    fail(Errc::ParamConflict, "give either a dataset or a family, not both");
  if (have_dataset) {
    const std::string name = cfg.dataset_name.empty()
                                 ? std::filesystem::path(cfg.dataset_dir)
                                       .filename()
                                       .string()
                                 : cfg.dataset_name;
    return ingest_tu_dataset(cfg.dataset_dir, name);
  }
  if (!cfg.family)
    fail(Errc::BadArgument, "an input dataset or family is required");
  return enumerate_family(*cfg.family);
}

std::string cmd_enumerate(const RunConfig& cfg) {
  if (!cfg.family)
    fail(Errc::BadArgument, "enumerate requires a family specification");
  const FamilySpec& spec = *cfg.family;
  const GraphCollection c = enumerate_family(spec);
  const auto dir = ensure_out_dir(cfg);
  const std::string tag = family_tag(spec);
  write_tu_dataset((dir / tag).string(), tag, c);

  const QuotientResult q = quotient_classes(c, Refinement::WL, kStableDepth);
  nlohmann::ordered_json census;
  census["family"] = tag;
  census["count"] = c.graphs.size();
  census["m"] = q.num_classes;
  if (spec.kind == FamilyKind::OtterTrees)
    census["w_j"] = wedderburn_etherington((spec.n - 1) / 2);
  if (spec.kind == FamilyKind::PartitionPaths) {
    const auto partitions = integer_partitions(spec.n);
    census["partitions"] = partitions.size();
    census["groups"] = partitions.size();
    census["members_per_group"] = (spec.n + 1) / 2;
  }
  const std::string path = (dir / "census.json").string();
  write_text(path, census.dump(2) + "\n");
  return path;
}

std::string cmd_cover(const RunConfig& cfg) {
  if (cfg.radii.empty())
    fail(Errc::BadArgument, "cover requires a non-empty radius list");
  std::vector<double> radii = cfg.radii;
  for (double r : radii)
    if (!std::isfinite(r) || r < 0.0)
      fail(Errc::BadEpsilon, "cover radii must be non-negative");
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const GraphCollection c = load_input(cfg);
  const DistanceMatrix dm = distance_matrix(c, cfg.metric, cfg.threads);
  const size_t classes = greedy_cover(dm, 0.0).centers.size();
  const bool exact_ok = int(classes) <= cfg.exact_limit;

  std::ostringstream csv;
  csv << "epsilon,N_greedy,N_exact,m\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (double eps : radii) {
    const CoverResult greedy = greedy_cover(dm, eps);
    std::optional<CoverResult> exact;
    if (exact_ok) exact = exact_cover(dm, eps, cfg.exact_limit);
    csv << fmt(eps) << ',' << greedy.centers.size() << ',';
    if (exact) csv << exact->centers.size();
    csv << ',' << classes << '\n';
    nlohmann::ordered_json row;
    row["epsilon"] = eps;
    row["n_greedy"] = greedy.centers.size();
    if (exact) row["n_exact"] = exact->centers.size();
    row["centers_greedy"] = greedy.centers;
    rows.push_back(row);
  }

  const auto dir = ensure_out_dir(cfg);
  const std::string path = (dir / "cover.csv").string();
  write_text(path, csv.str());
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["metric"] = metric_name(cfg.metric.kind);
    j["depth"] = cfg.metric.depth;
    j["classes"] = classes;
    j["rows"] = rows;
    write_text((dir / "cover.json").string(), j.dump(2) + "\n");
  }
  return path;
}

std::string cmd_correlate(const RunConfig& cfg) {
  const GraphCollection c = load_input(cfg);
  if (cfg.models < 1) fail(Errc::BadArgument, "correlate needs at least one model");
  if (cfg.width < 1) fail(Errc::BadArgument, "hidden width must be positive");
  for (int depth : cfg.depths)
    if (depth < 1)
      fail(Errc::BadArgument, "correlate depths must be positive layer counts");

  const auto dir = ensure_out_dir(cfg);
  std::ostringstream summary;
  summary << "depth,model,seed,r,degenerate\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int depth : cfg.depths) {
    std::vector<MpnnModel> models;
    std::vector<std::uint64_t> seeds;
    for (int m = 0; m < cfg.models; ++m) {
      // Deterministic per-(depth, model) seed derived from the run seed.
      const std::uint64_t seed =
          (cfg.seed << 16) ^ (std::uint64_t(depth) << 8) ^ std::uint64_t(m);
      seeds.push_back(seed);
      std::vector<int> dims{c.d};
      dims.insert(dims.end(), size_t(depth), cfg.width);
      models.push_back(random_model(cfg.kind, dims, {1}, seed));
    }
    const auto results = correlate(models, c, depth, size_t(cfg.pairs),
                                   cfg.seed + std::uint64_t(depth));
    for (size_t m = 0; m < results.size(); ++m) {
      char name[64];
      std::snprintf(name, sizeof name, "scatter_L%d_m%zu.csv", depth, m);
      write_scatter_csv((dir / name).string(), results[m].points);
      summary << depth << ',' << m << ',' << seeds[m] << ','
              << (results[m].degenerate ? "nan" : fmt(results[m].r)) << ','
              << (results[m].degenerate ? 1 : 0) << '\n';
      nlohmann::ordered_json row;
      row["depth"] = depth;
      row["model"] = m;
      row["seed"] = seeds[m];
      if (results[m].degenerate)
        row["r"] = nullptr;
      else
        row["r"] = results[m].r;
      row["degenerate"] = results[m].degenerate;
      rows.push_back(row);
    }
  }
  const std::string path = (dir / "correlate.csv").string();
  write_text(path, summary.str());
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["pairs"] = cfg.pairs;
    j["rows"] = rows;
    write_text((dir / "correlate.json").string(), j.dump(2) + "\n");
  }
  return path;
}

std::string cmd_bound(const RunConfig& cfg, const BoundRequest& req) {
  const nlohmann::json coeffs = load_coefficients(req.coefficients_path);
  const double delta = number_or(coeffs, "delta", cfg.delta);
  const double sample = need_number(coeffs, "sample_size");

  // Evaluator parameterized by (delta, epsilon-or-k) so every scan reuses it.
  const auto evaluate = [&](double d, std::optional<double> x) -> BoundReport {
    const std::string& f = req.formula;
    if (f == "xu-mannor")
      return xu_mannor_bound(need_number(coeffs, "cell_count"),
                             x.value_or(number_or(coeffs, "epsilon", 0.0)),
                             need_number(coeffs, "loss_bound"), d, sample);
    if (f == "extended") {
      std::vector<std::pair<double, double>> cells;
      if (!coeffs.contains("cells") || !coeffs.at("cells").is_array())
        fail(Errc::BadArgument, "coefficient \"cells\" must be an array");
      for (const auto& p : coeffs.at("cells")) {
        if (!p.is_array() || p.size() != 2)
          fail(Errc::BadArgument, "cells entries must be [members, epsilon]");
        cells.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return extended_bound(cells, need_number(coeffs, "cell_count"),
                            need_number(coeffs, "loss_bound"), d, sample);
    }
    if (f == "kawaguchi")
      return kawaguchi_bound(need_number(coeffs, "zeta"),
                             need_number(coeffs, "occupied"),
                             need_number(coeffs, "cell_count"),
                             x.value_or(number_or(coeffs, "epsilon", 0.0)), d,
                             sample, number_or(coeffs, "empirical_loss", 0.0));
    if (f == "wl-classification")
      return wl_classification_bound(need_number(coeffs, "classes"),
                                     need_number(coeffs, "loss_bound"), d,
                                     sample);
    if (f == "wl-regression")
      return wl_regression_bound(need_number(coeffs, "classes"),
                                 need_number(coeffs, "loss_bound"), d, sample,
                                 x.value_or(need_number(coeffs, "epsilon")));
    if (f == "fd" || f == "mean-fd") {
      const EmbeddingLipschitz lip{need_number(coeffs, "l_loss"),
                                   need_number(coeffs, "l_fnn"),
                                   need_number(coeffs, "c_fd"),
                                   need_number(coeffs, "order")};
      std::optional<MeasuredCover> cover;
      std::optional<MergedClassCover> merged;
      if (coeffs.contains("covering_number"))
        cover = MeasuredCover{need_number(coeffs, "covering_number"),
                              x.value_or(number_or(coeffs, "epsilon", 0.0))};
      if (coeffs.contains("classes"))
        merged = MergedClassCover{need_number(coeffs, "classes"),
                                  x.value_or(number_or(coeffs, "k", 0.0)),
                                  need_number(coeffs, "single_edit_bound")};
      const double m = need_number(coeffs, "loss_bound");
      return f == "fd" ? fd_bound(lip, cover, merged, m, d, sample)
                       : mean_fd_bound(lip, cover, merged, m, d, sample);
    }
    if (f == "tree-distance") {
      TreeDistanceBoundInputs in;
      const std::string variant = coeffs.value("variant", "covering");
      if (variant == "covering")
        in.variant = TreeDistanceVariant::Covering;
      else if (variant == "tree-construction")
        in.variant = TreeDistanceVariant::TreeConstruction;
      else if (variant == "otter")
        in.variant = TreeDistanceVariant::Otter;
      else if (variant == "up-to-n")
        in.variant = TreeDistanceVariant::UpToN;
      else
        fail(Errc::BadArgument, "unknown tree-distance variant " + variant);
      in.gamma_inverse = gamma_table_of(coeffs);
      in.order = need_number(coeffs, "order");
      in.l_loss = number_or(coeffs, "l_loss", 1.0);
      in.l_fnn = number_or(coeffs, "l_fnn", 1.0);
      in.count = need_number(coeffs, "count");
      in.loss_bound = need_number(coeffs, "loss_bound");
      in.delta = d;
      in.sample_size = sample;
      if (in.variant == TreeDistanceVariant::Covering)
        in.epsilon = x.value_or(number_or(coeffs, "epsilon", 0.0));
      else
        in.k = x.value_or(number_or(coeffs, "k", 0.0));
      if (coeffs.contains("per_order_sample"))
        in.per_order_sample =
            coeffs.at("per_order_sample").get<std::vector<double>>();
      return tree_distance_bound(in);
    }
    if (f == "vc")
      return vc_bound(need_number(coeffs, "dimension"), d, sample);
    fail(Errc::BadArgument, "unknown bound formula " + f);
  };

  const auto dir = ensure_out_dir(cfg);
  if (req.scan.empty()) {
    const BoundReport report = evaluate(delta, std::nullopt);
    const std::string path = (dir / "bound.json").string();
    write_bound_json(path, report);
    return path;
  }

  BoundScan scan;
  if (req.scan == "delta") {
    if (req.grid.empty())
      fail(Errc::BadArgument, "a delta scan needs an explicit grid");
    scan = scan_parameter("delta", req.grid,
                          [&](double d) { return evaluate(d, std::nullopt); });
  } else if (req.scan == "epsilon") {
    if (req.grid.empty())
      fail(Errc::BadArgument, "an epsilon scan needs an explicit grid");
    scan = scan_parameter("epsilon", req.grid,
                          [&](double e) { return evaluate(delta, e); });
  } else if (req.scan == "k") {
    std::vector<double> grid = req.grid;
    if (grid.empty()) {
      if (req.k_max < 0) fail(Errc::BadArgument, "k_max must be non-negative");
      for (int k = 0; k <= req.k_max; ++k) grid.push_back(double(k));
    }
    scan = scan_parameter("k", grid,
                          [&](double k) { return evaluate(delta, k); });
  } else {
    fail(Errc::BadArgument, "unknown scan parameter " + req.scan);
  }
  const std::string path = (dir / "scan.csv").string();
  write_scan_csv(path, scan);
  write_bound_json((dir / "bound.json").string(), scan.reports[scan.best]);
  return path;
}

std::string cmd_ingest_check(const RunConfig& cfg) {
  if (cfg.dataset_dir.empty())
    fail(Errc::BadArgument, "ingest-check requires a dataset directory");
  const std::string name = cfg.dataset_name.empty()
                               ? std::filesystem::path(cfg.dataset_dir)
                                     .filename()
                                     .string()
                               : cfg.dataset_name;
  const GraphCollection c = ingest_tu_dataset(cfg.dataset_dir, name);

  size_t edges = 0;
  int min_order = c.graphs.empty() ? 0 : c.graphs.front().n;
  int max_order = 0;
  for (const LabeledGraph& g : c.graphs) {
    edges += g.edges.size();
    min_order = std::min(min_order, g.n);
    max_order = std::max(max_order, g.n);
  }
  const std::set<int> labels(c.labels.begin(), c.labels.end());

  nlohmann::ordered_json j;
  j["name"] = name;
  j["graphs"] = c.graphs.size();
  j["feature_dim"] = c.d;
  j["min_order"] = min_order;
  j["max_order"] = max_order;
  j["edges"] = edges;
  j["label_values"] = std::vector<int>(labels.begin(), labels.end());
  const auto dir = ensure_out_dir(cfg);
  const std::string path = (dir / "ingest.json").string();
  write_text(path, j.dump(2) + "\n");
  std::printf("dataset %s: %zu graphs, orders %d..%d, feature dim %d, %zu edges\n",
              name.c_str(), c.graphs.size(), min_order, max_order, c.d, edges);
  return path;
}

}  // namespace gm
