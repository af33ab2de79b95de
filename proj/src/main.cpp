#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gm/cli.hpp"
#include "gm/error.hpp"
#include "gm/wl.hpp"

namespace {

using gm::RunConfig;

void add_output_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_family_options(CLI::App* cmd, RunConfig& cfg, bool required) {
  static const std::map<std::string, gm::FamilyKind> kinds{
      {"all", gm::FamilyKind::AllGraphs},
      {"all-up-to", gm::FamilyKind::AllGraphsUpTo},
      {"otter", gm::FamilyKind::OtterTrees},
      {"partition-paths", gm::FamilyKind::PartitionPaths},
      {"bounded-labeled", gm::FamilyKind::BoundedDegreeLabeled}};
  auto spec = std::make_shared<gm::FamilySpec>();
  auto* family =
      cmd->add_option_function<std::string>(
             "--family",
             [&cfg, spec](const std::string& name) {
               spec->kind = kinds.at(name);
               cfg.family = *spec;
             },
             "Graph family: all, all-up-to, otter, partition-paths, bounded-labeled")
          ->check(CLI::IsMember(
              {"all", "all-up-to", "otter", "partition-paths", "bounded-labeled"}));
  if (required) family->required();
  cmd->add_option_function<int>(
      "--n", [&cfg, spec](int n) { spec->n = n; if (cfg.family) cfg.family->n = n; },
      "Family order parameter");
  cmd->add_option_function<int>(
      "--d", [&cfg, spec](int d) { spec->d = d; if (cfg.family) cfg.family->d = d; },
      "Label alphabet size (bounded-labeled)");
  cmd->add_option_function<int>(
      "--q", [&cfg, spec](int q) { spec->q = q; if (cfg.family) cfg.family->q = q; },
      "Degree cap (bounded-labeled)");
}

void add_dataset_options(CLI::App* cmd, RunConfig& cfg, bool required) {
  auto* dataset = cmd->add_option("--dataset", cfg.dataset_dir,
                                  "TU-format dataset directory");
  if (required) dataset->required();
  cmd->add_option("--name", cfg.dataset_name,
                  "Dataset name (default: directory name)");
}

void add_metric_options(CLI::App* cmd, RunConfig& cfg) {
  static const std::map<std::string, gm::MetricKind> metrics{
      {"fd", gm::MetricKind::ForestDistance},
      {"tmd", gm::MetricKind::TreeMover},
      {"mean-fd", gm::MetricKind::MeanForest},
      {"delta-perm1", gm::MetricKind::DeltaPerm1},
      {"delta-ds1", gm::MetricKind::DeltaDS1},
      {"wl", gm::MetricKind::WlTrivial}};
  cmd->add_option_function<std::string>(
         "--metric",
         [&cfg](const std::string& name) { cfg.metric.kind = metrics.at(name); },
         "Distance: fd, tmd, mean-fd, delta-perm1, delta-ds1, wl")
      ->check(CLI::IsMember(
          {"fd", "tmd", "mean-fd", "delta-perm1", "delta-ds1", "wl"}));
  cmd->add_option("--depth", cfg.metric.depth,
                  "Unrolling depth L (-1 = refine to stability)")
      ->check(CLI::Range(-1, 64))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph pseudo-metrics, covering numbers, and generalization bounds"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.metric.depth = gm::kStableDepth;
  gm::BoundRequest req;
  std::string kind_name = "sum";

  CLI::App* enumerate = app.add_subcommand("enumerate",
                                           "Write a family as a TU dataset with a census");
  add_family_options(enumerate, cfg, true);
  add_output_options(enumerate, cfg);

  CLI::App* cover = app.add_subcommand("cover", "Covering numbers over a radius grid");
  add_family_options(cover, cfg, false);
  add_dataset_options(cover, cfg, false);
  add_metric_options(cover, cfg);
  cover->add_option("--radii", cfg.radii, "Cover radii")->required()->delimiter(',');
  cover->add_option("--threads", cfg.threads, "Distance-matrix thread count");
  cover->add_option("--exact-limit", cfg.exact_limit,
                    "Largest class count for the exact cover solver")
      ->capture_default_str();
  add_output_options(cover, cfg);

  CLI::App* correlate = app.add_subcommand(
      "correlate", "Distance vs model-output scatter and Pearson r");
  add_family_options(correlate, cfg, false);
  add_dataset_options(correlate, cfg, false);
  correlate->add_option("--depths", cfg.depths, "Layer counts (= distance depths)")
      ->delimiter(',')
      ->capture_default_str();
  correlate->add_option("--kind", kind_name, "Aggregation: sum, mean, order-normalized-sum")
      ->check(CLI::IsMember({"sum", "mean", "order-normalized-sum"}))
      ->capture_default_str();
  correlate->add_option("--models", cfg.models, "Random models per depth")
      ->capture_default_str();
  correlate->add_option("--width", cfg.width, "Hidden width")->capture_default_str();
  correlate->add_option("--pairs", cfg.pairs, "Sampled graph pairs")
      ->capture_default_str();
  correlate->add_option("--seed", cfg.seed, "Run seed")->capture_default_str();
  correlate->add_option("--threads", cfg.threads, "Model evaluation thread count");
  add_output_options(correlate, cfg);

  CLI::App* bound = app.add_subcommand("bound", "Evaluate a generalization bound");
  bound->add_option("--formula", req.formula,
                    "xu-mannor, extended, kawaguchi, wl-classification, "
                    "wl-regression, fd, mean-fd, tree-distance, vc")
      ->required();
  bound->add_option("--coeffs", req.coefficients_path,
                    "JSON coefficient file")
      ->required();
  bound->add_option("--scan", req.scan, "Scan parameter: delta, epsilon, k")
      ->check(CLI::IsMember({"delta", "epsilon", "k"}));
  bound->add_option("--grid", req.grid, "Scan grid values")->delimiter(',');
  bound->add_option("--k-max", req.k_max, "k-scan upper end when no grid is given")
      ->capture_default_str();
  bound->add_option("--delta", cfg.delta, "Confidence parameter")
      ->capture_default_str();
  add_output_options(bound, cfg);

  CLI::App* ingest = app.add_subcommand("ingest-check",
                                        "Validate and summarize a TU dataset");
  add_dataset_options(ingest, cfg, true);
  add_output_options(ingest, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (kind_name == "mean")
    cfg.kind = gm::MpnnKind::MeanAgg;
  else if (kind_name == "order-normalized-sum")
    cfg.kind = gm::MpnnKind::OrderNormalizedSum;

  try {
    std::string artifact;
    if (enumerate->parsed()) artifact = gm::cmd_enumerate(cfg);
    if (cover->parsed()) artifact = gm::cmd_cover(cfg);
    if (correlate->parsed()) artifact = gm::cmd_correlate(cfg);
    if (bound->parsed()) artifact = gm::cmd_bound(cfg, req);
    if (ingest->parsed()) artifact = gm::cmd_ingest_check(cfg);
    std::printf("wrote %s\n", artifact.c_str());
    return 0;
  } catch (const gm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return gm::exit_code(e.code());
  }
}
