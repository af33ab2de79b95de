#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gm/families.hpp"
#include "gm/metrics.hpp"
#include "gm/mpnn.hpp"

namespace gm {

// Parsed experiment configuration shared by the subcommands; each command
// reads the fields it needs.  Input graphs come either from a TU-format
// dataset directory or from an enumerated family, never both.  Every command
// is deterministic given its config, so re-runs produce byte-identical files.
struct RunConfig {
  std::string dataset_dir;
  std::string dataset_name;
  std::optional<FamilySpec> family;
  MetricSpec metric;
  std::vector<double> radii;      // cover radius grid
  std::vector<int> depths{2};     // correlate: layer counts = distance depths
  MpnnKind kind = MpnnKind::SumAgg;
  int models = 3;                 // correlate: random models per depth
  int width = 8;                  // correlate: hidden width
  int pairs = 200;                // correlate: sampled graph pairs
  std::uint64_t seed = 0;
  int threads = 0;                // 0 = library default team size
  int exact_limit = 25;           // cover: exact-solver class cap
  double delta = 0.1;
  std::string out_dir = ".";
  std::string format = "csv";     // csv | json (json adds a mirror file)
};

// Loads the configured input graphs; exactly one of dataset / family must be
// set (ParamConflict / BadArgument otherwise).
GraphCollection load_input(const RunConfig& cfg);

// Writes the family as a TU-format dataset named by its tag (G4, T9, F4,
// ...) plus census.json recording the member count, the stable-refinement
// class count m, and family-specific figures (Wedderburn-Etherington count,
// partition/group counts).  Returns the census path.
std::string cmd_enumerate(const RunConfig& cfg);

// All-pairs distance matrix, then one cover per radius (ascending, deduped):
// greedy always, exact while the merged class count is within
// cfg.exact_limit.  Writes cover.csv "epsilon,N_greedy,N_exact,m" (N_exact
// empty when skipped) and, for json format, cover.json with the centers.
// Returns the cover.csv path.
std::string cmd_cover(const RunConfig& cfg);

// For each depth L: cfg.models random L-layer models, a shared sampled pair
// set, one scatter CSV per model, and a summary table of Pearson r values
// (correlate.csv "depth,model,seed,r,degenerate").  Returns the summary path.
std::string cmd_correlate(const RunConfig& cfg);

// A bound evaluation request: the formula id, a JSON coefficient file, and
// an optional parameter scan ("delta", "epsilon", or "k"; k without a grid
// scans 0..k_max).  Coefficient-file problems are configuration errors.
struct BoundRequest {
  std::string formula;
  std::string coefficients_path;
  std::string scan;
  std::vector<double> grid;
  int k_max = 10;
};

// Evaluates the requested bound; writes bound.json (plain) or scan.csv plus
// bound.json for the best grid point (scans).  Returns the main artifact
// path.
std::string cmd_bound(const RunConfig& cfg, const BoundRequest& req);

// Ingests a TU dataset, prints a one-line summary, and writes ingest.json
// {name, graphs, feature_dim, orders, edges, labels}.  Returns the JSON
// path; ingestion failures carry data-error codes (exit 3).
std::string cmd_ingest_check(const RunConfig& cfg);

}  // namespace gm
