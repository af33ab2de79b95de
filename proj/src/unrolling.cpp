#include "gm/unrolling.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <numeric>

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

int add_node(RootedTree& t, std::vector<double> label) {
  t.children.emplace_back();
  t.labels.push_back(std::move(label));
  return tree_size(t) - 1;
}

struct Unroller {
  const LabeledGraph& g;
  const std::vector<std::vector<int>> adj;
  long long budget;
  // Subtree content depends only on (vertex, levels left), so codes are shared.
  std::map<std::pair<int, int>, std::string> codes;
  std::map<std::pair<int, int>, long long> sizes;

  // Node count of the subtree, saturated at budget+1 so it cannot overflow.
  long long size_of(int v, int levels_left) {
    auto it = sizes.find({v, levels_left});
    if (it != sizes.end()) return it->second;
    long long total = 1;
    if (levels_left > 0)
      for (int w : adj[v]) {
        total += size_of(w, levels_left - 1);
        if (total > budget) {
          total = budget + 1;
          break;
        }
      }
    sizes.emplace(std::make_pair(v, levels_left), total);
    return total;
  }

  const std::string& code_of(int v, int levels_left) {
    auto it = codes.find({v, levels_left});
    if (it != codes.end()) return it->second;
    std::vector<std::string> parts;
    if (levels_left > 0)
      for (int w : adj[v]) parts.push_back(code_of(w, levels_left - 1));
    std::sort(parts.begin(), parts.end());
    std::string c = "(" + hex_bytes(g.features[v]);
    for (const auto& p : parts) c += p;
    c += ")";
    return codes.emplace(std::make_pair(v, levels_left), std::move(c)).first->second;
  }

  int build(int v, int levels_left, int level, RootedTree& out) {
    if (--budget < 0)
      fail(Errc::ForestTooLarge, "walk tree exceeds the node cap");
    const int idx = add_node(out, g.features[v]);
    out.depth = std::max(out.depth, level);
    if (levels_left == 0) return idx;
    std::vector<std::pair<std::string, int>> order;  // (child code, neighbor)
    for (int w : adj[v]) order.emplace_back(code_of(w, levels_left - 1), w);
    std::sort(order.begin(), order.end());
    for (const auto& [code, w] : order) {
      const int child = build(w, levels_left - 1, level + 1, out);
      out.children[idx].push_back(child);  // after the recursion reallocates
    }
    return idx;
  }
};

struct Pruner {
  const RootedTree& in;
  std::vector<std::string> code;  // canonical code of the pruned subtree, per in-node

  // (pruned child code, in-node id, copies kept) groups in code order.
  std::vector<std::pair<int, int>> kept_children(int x) {
    std::vector<std::pair<std::string, int>> kids;
    for (int c : in.children[x]) kids.emplace_back(code[c], c);
    std::sort(kids.begin(), kids.end());
    std::vector<std::pair<int, int>> groups;  // (representative in-node, multiplicity)
    for (size_t i = 0; i < kids.size();) {
      size_t j = i;
      while (j < kids.size() && kids[j].first == kids[i].first) ++j;
      groups.emplace_back(kids[i].second, static_cast<int>(j - i));
      i = j;
    }
    long long g = 0;
    for (auto& [rep, m] : groups) g = std::gcd(g, static_cast<long long>(m));
    if (g > 1)
      for (auto& [rep, m] : groups) m = static_cast<int>(m / g);
    return groups;
  }

  void compute_codes() {
    code.resize(tree_size(in));
    compute(in.root);
  }

  void compute(int x) {
    for (int c : in.children[x]) compute(c);
    std::string s = "(" + hex_bytes(in.labels[x]);
    for (auto [rep, m] : kept_children(x))
      for (int k = 0; k < m; ++k) s += code[rep];
    s += ")";
    code[x] = std::move(s);
  }

  int materialize(int x, int level, RootedTree& out) {
    const int idx = add_node(out, in.labels[x]);
    out.depth = std::max(out.depth, level);
    for (auto [rep, m] : kept_children(x))
      for (int k = 0; k < m; ++k) {
        const int child = materialize(rep, level + 1, out);
        out.children[idx].push_back(child);  // after the recursion reallocates
      }
    return idx;
  }
};

void append_code(const RootedTree& t, int x, std::string& out) {
  out += "(";
  out += hex_bytes(t.labels[x]);
  for (int c : t.children[x]) append_code(t, c, out);
  out += ")";
}

std::string format_label(const std::vector<double>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    char buf[32];
    if (xs[i] == static_cast<long long>(xs[i]) && std::abs(xs[i]) < 1e15)
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(xs[i]));
    else
      std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
    s += buf;
  }
  return s;
}

void append_debug(const RootedTree& t, int x, std::string& out) {
  out += "(";
  out += format_label(t.labels[x]);
  for (int c : t.children[x]) append_debug(t, c, out);
  out += ")";
}

// Zero-pads node x (at `level`) so every node above `depth` has exactly
// `arity` children.
void pad_node(RootedTree& t, int x, int level, int depth, int arity, int d,
              std::vector<long long>* scaling) {
  if (level >= depth) return;
  for (int c : t.children[x]) pad_node(t, c, level + 1, depth, arity, d, scaling);
  if (static_cast<int>(t.children[x].size()) > arity)
    fail(Errc::BadArgument, "tree node with more than arity children");
  while (static_cast<int>(t.children[x].size()) < arity) {
    const int blank = add_node(t, std::vector<double>(d, 0.0));
    t.depth = std::max(t.depth, level + 1);
    if (scaling) scaling->push_back(1);
    t.children[x].push_back(blank);
    pad_node(t, blank, level + 1, depth, arity, d, scaling);
  }
}

}  // namespace

RootedTree unroll(const LabeledGraph& g, int root, int depth, long long max_nodes) {
  if (root < 0 || root >= g.n)
    fail(Errc::BadVertex, "unroll root " + std::to_string(root) + " out of range");
  if (depth < 0) fail(Errc::BadArgument, "unroll depth must be >= 0");
  Unroller u{g, adjacency_lists(g), max_nodes, {}, {}};
  if (u.size_of(root, depth) > max_nodes)
    fail(Errc::ForestTooLarge, "walk tree from vertex " + std::to_string(root) +
                                   " at depth " + std::to_string(depth) +
                                   " exceeds the node cap of " + std::to_string(max_nodes));
  RootedTree out;
  u.build(root, depth, 0, out);
  return out;
}

RootedTree mean_prune(const RootedTree& t) {
  Pruner p{t, {}};
  p.compute_codes();
  RootedTree out;
  p.materialize(t.root, 0, out);
  return out;
}

std::string canonical_code(const RootedTree& t) {
  std::string out;
  append_code(t, t.root, out);
  return out;
}

std::string debug_string(const RootedTree& t) {
  std::string out;
  append_debug(t, t.root, out);
  return out;
}

std::vector<long long> branch_scaling(const RootedTree& t) {
  std::vector<long long> s(tree_size(t), 1);
  // Parents are materialized before their children, so a forward pass works.
  for (int x = 0; x < tree_size(t); ++x)
    for (int c : t.children[x])
      s[c] = s[x] * static_cast<long long>(t.children[x].size());
  return s;
}

PaddedForest build_forest(const LabeledGraph& g, int depth, Aggregation mode,
                          long long max_nodes) {
  if (g.n < 2) fail(Errc::OrderTooSmall, "forest needs order >= 2");
  if (depth < 0) fail(Errc::BadArgument, "forest depth must be >= 0");
  // Padded size is exactly n * sum_{l<=depth} (n-1)^l; saturate while summing.
  long long per_tree = 0, power = 1;
  bool oversize = false;
  for (int l = 0; l <= depth; ++l) {
    if (power > max_nodes - per_tree) {
      oversize = true;
      break;
    }
    per_tree += power;
    if (l < depth) {
      if (power > max_nodes / (g.n - 1)) {
        oversize = true;
        break;
      }
      power *= (g.n - 1);
    }
  }
  if (oversize || per_tree > max_nodes / g.n)
    fail(Errc::ForestTooLarge,
         "padded forest needs more than " + std::to_string(max_nodes) +
             " nodes (order " + std::to_string(g.n) + ", depth " + std::to_string(depth) +
             "); raise the cap to proceed");

  PaddedForest f;
  f.n = g.n;
  f.depth = depth;
  f.arity = g.n - 1;
  f.mode = mode;
  for (int v = 0; v < g.n; ++v) {
    RootedTree t = unroll(g, v, depth, max_nodes);
    std::vector<long long> s;
    if (mode == Aggregation::Mean) {
      t = mean_prune(t);
      s = branch_scaling(t);
      for (int x = 0; x < tree_size(t); ++x)
        for (double& value : t.labels[x]) value /= static_cast<double>(s[x]);
    }
    pad_node(t, t.root, 0, depth, f.arity, g.d,
             mode == Aggregation::Mean ? &s : nullptr);
    f.trees.push_back(std::move(t));
    if (mode == Aggregation::Mean) f.scaling.push_back(std::move(s));
  }
  return f;
}

}  // namespace gm
