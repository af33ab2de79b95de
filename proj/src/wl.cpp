#include "gm/wl.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

#include "gm/error.hpp"

namespace gm {

namespace {

std::string hex_bytes(const std::vector<double>& xs) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(xs.size() * 16);
  for (double x : xs) {
    uint64_t bits = 0;
    std::memcpy(&bits, &x, 8);
    for (int k = 15; k >= 0; --k) out.push_back(digits[(bits >> (4 * k)) & 0xf]);
  }
  return out;
}

struct Interner {
  std::unordered_map<std::string, int> ids;
  std::vector<ColorEntry> entries;

  int intern(std::string key, ColorEntry entry) {
    auto [it, fresh] = ids.emplace(std::move(key), static_cast<int>(entries.size()));
    if (fresh) entries.push_back(std::move(entry));
    return it->second;
  }
};

std::vector<int> initial_colors(const LabeledGraph& g, Interner& interner) {
  std::vector<int> colors(g.n);
  for (int v = 0; v < g.n; ++v)
    colors[v] = interner.intern("F|" + hex_bytes(g.features[v]),
                                ColorEntry{-1, {}, g.features[v]});
  return colors;
}

std::vector<int> next_colors(const std::vector<int>& prev,
                             const std::vector<std::vector<int>>& adj, Refinement kind,
                             Interner& interner) {
  const int n = static_cast<int>(prev.size());
  std::vector<int> colors(n);
  std::vector<int> nb;
  for (int v = 0; v < n; ++v) {
    nb.clear();
    for (int u : adj[v]) nb.push_back(prev[u]);
    std::sort(nb.begin(), nb.end());
    FreqSet fs;
    const long long deg = static_cast<long long>(nb.size());
    for (size_t i = 0; i < nb.size();) {
      size_t j = i;
      while (j < nb.size() && nb[j] == nb[i]) ++j;
      const long long count = static_cast<long long>(j - i);
      fs.emplace_back(nb[i], kind == Refinement::MWL ? make_fraction(count, deg)
                                                     : make_fraction(count, 1));
      i = j;
    }
    std::string key(kind == Refinement::MWL ? "M|" : "W|");
    key += std::to_string(prev[v]);
    for (const auto& [c, fr] : fs)
      key += "(" + std::to_string(c) + "," + std::to_string(fr.num) + "," +
             std::to_string(fr.den) + ")";
    colors[v] = interner.intern(std::move(key), ColorEntry{prev[v], std::move(fs), {}});
  }
  return colors;
}

int distinct_count(const std::vector<int>& colors) {
  std::vector<int> c = colors;
  std::sort(c.begin(), c.end());
  return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
}

// Runs the refinement, invoking on_round after every round (including
// iteration 0).  Stops early when on_round returns false, after `depth`
// rounds, or — with kStableDepth — when one extra round fails to split any
// class (that confirming round is reported).
template <typename OnRound>
RefinementRun run_refinement(const LabeledGraph& g, Refinement kind, int depth,
                             OnRound on_round) {
  if (depth < 0 && depth != kStableDepth)
    fail(Errc::BadArgument, "refinement depth must be >= 0 or stable");
  const auto adj = adjacency_lists(g);
  Interner interner;
  RefinementRun run;
  run.kind = kind;
  run.rounds.push_back({0, initial_colors(g, interner)});
  bool keep_going = on_round(run.rounds.back());
  int prev_distinct = distinct_count(run.rounds.back().colors);
  for (int t = 1; keep_going; ++t) {
    if (depth != kStableDepth && t > depth) break;
    if (depth == kStableDepth && t > g.n + 1) break;  // unreachable; defensive
    run.rounds.push_back({t, next_colors(run.rounds.back().colors, adj, kind, interner)});
    keep_going = on_round(run.rounds.back());
    const int now_distinct = distinct_count(run.rounds.back().colors);
    if (depth == kStableDepth && now_distinct == prev_distinct) break;
    prev_distinct = now_distinct;
  }
  run.table = std::move(interner.entries);
  return run;
}

bool joint_indistinguishable(const LabeledGraph& g, const LabeledGraph& h, Refinement kind,
                             int depth) {
  if (g.d != h.d)
    fail(Errc::DimMismatch, "feature dimensions " + std::to_string(g.d) + " vs " +
                                std::to_string(h.d));
  const auto u = disjoint_union(g, h);
  bool equal = true;
  auto compare = [&](const Coloring& round) {
    std::map<int, int> balance;  // +1 per g-side vertex, -1 per h-side vertex
    for (int v = 0; v < g.n; ++v) ++balance[round.colors[v]];
    for (int v = g.n; v < u.n; ++v) --balance[round.colors[v]];
    for (const auto& [color, diff] : balance)
      if (diff != 0) {
        equal = false;
        return false;  // short-circuit the run
      }
    return true;
  };
  run_refinement(u, kind, depth, compare);
  return equal;
}

}  // namespace

Fraction make_fraction(long long num, long long den) {
  if (den == 0) fail(Errc::BadArgument, "fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

RefinementRun wl1_refine(const LabeledGraph& g, int depth) {
  return run_refinement(g, Refinement::WL, depth, [](const Coloring&) { return true; });
}

RefinementRun mwl1_refine(const LabeledGraph& g, int depth) {
  return run_refinement(g, Refinement::MWL, depth, [](const Coloring&) { return true; });
}

bool wl1_joint_indistinguishable(const LabeledGraph& g, const LabeledGraph& h, int depth) {
  return joint_indistinguishable(g, h, Refinement::WL, depth);
}

bool mwl1_joint_indistinguishable(const LabeledGraph& g, const LabeledGraph& h, int depth) {
  return joint_indistinguishable(g, h, Refinement::MWL, depth);
}

std::vector<std::string> canonical_color_names(const RefinementRun& run) {
  // A name embeds the color's whole refinement history.  Spelling that history
  // out in full grows exponentially with depth, so each distinct history is
  // instead interned once into a process-wide table and a name spells out just
  // one refinement step, referencing the histories it builds on by their table
  // ids.  Within a process the id of a history never changes, so by induction
  // two colors (from any runs) get equal names exactly when their histories
  // coincide, i.e. when a joint run would merge them.
  static std::mutex table_mutex;
  static std::unordered_map<std::string, long long> history_ids;
  std::lock_guard<std::mutex> lock(table_mutex);

  std::vector<std::string> name(run.table.size());
  std::vector<long long> id(run.table.size());
  // Table entries only reference earlier ids, so one forward pass resolves.
  for (size_t c = 0; c < run.table.size(); ++c) {
    const ColorEntry& e = run.table[c];
    if (e.parent < 0) {
      name[c] = "L(" + hex_bytes(e.feature) + ")";
    } else {
      // Run-local color ids are not comparable across runs; the interned ids
      // are, so the neighbor summary is ordered by those.
      std::vector<std::pair<long long, Fraction>> parts;
      parts.reserve(e.neighbors.size());
      for (const auto& [color, fr] : e.neighbors) parts.emplace_back(id[color], fr);
      // Distinct run-local colors always have distinct histories, so the id
      // alone orders the summary.
      std::sort(parts.begin(), parts.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::string s = "N(#" + std::to_string(id[e.parent]) + ";";
      for (const auto& [hist, fr] : parts)
        s += "[#" + std::to_string(hist) + ":" + std::to_string(fr.num) + "/" +
             std::to_string(fr.den) + "]";
      s += ")";
      name[c] = std::move(s);
    }
    id[c] = history_ids.emplace(name[c], static_cast<long long>(history_ids.size()))
                .first->second;
  }
  return name;
}

QuotientResult quotient_classes(const GraphCollection& c, Refinement kind, int depth) {
  validate(c);
  int bound = depth;
  if (depth == kStableDepth) {
    bound = 0;
    for (const auto& g : c.graphs) bound = std::max(bound, g.n);
  } else if (depth < 0) {
    fail(Errc::BadArgument, "refinement depth must be >= 0 or stable");
  }
  QuotientResult result;
  result.class_of.resize(c.graphs.size());
  std::unordered_map<std::string, int> key_to_class;
  for (size_t i = 0; i < c.graphs.size(); ++i) {
    const auto run = kind == Refinement::WL ? wl1_refine(c.graphs[i], bound)
                                            : mwl1_refine(c.graphs[i], bound);
    const auto names = canonical_color_names(run);
    // The final-round names embed their whole refinement history, so their
    // multiset decides indistinguishability at every iteration up to `bound`.
    std::vector<std::string> multiset;
    for (int color : run.rounds.back().colors) multiset.push_back(names[color]);
    std::sort(multiset.begin(), multiset.end());
    std::string key;
    for (const auto& s : multiset) {
      key += s;
      key += '\n';
    }
    auto [it, fresh] = key_to_class.emplace(std::move(key), result.num_classes);
    if (fresh) {
      result.representatives.push_back(static_cast<int>(i));
      ++result.num_classes;
    }
    result.class_of[i] = it->second;
  }
  return result;
}

}  // namespace gm
