#include "gm/families.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "gm/error.hpp"

namespace gm {

namespace {

// Pairs (i,j), i<j, indexed colexicographically: j(j-1)/2 + i.  All pairs
// within the first k vertices then occupy the low k(k-1)/2 bits, so a mask of
// order k-1 embeds unchanged into order k.
int pair_index(int i, int j) { return j * (j - 1) / 2 + i; }

struct CanonTables {
  int n = 0;
  std::vector<std::vector<int>> perms;
  std::vector<std::vector<int>> pair_remap;  // per perm: old pair bit -> new
};

const CanonTables& canon_tables(int n) {
  static std::map<int, CanonTables> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  CanonTables t;
  t.n = n;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const int pairs = n * (n - 1) / 2;
  do {
    t.perms.push_back(perm);
    std::vector<int> remap(pairs);
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i)
        remap[pair_index(i, j)] =
            pair_index(std::min(perm[i], perm[j]), std::max(perm[i], perm[j]));
    t.pair_remap.push_back(std::move(remap));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cache.emplace(n, std::move(t)).first->second;
}

std::uint64_t remap_mask(std::uint64_t mask, const std::vector<int>& remap) {
  std::uint64_t out = 0;
  while (mask) {
    const int bit = __builtin_ctzll(mask);
    mask &= mask - 1;
    out |= std::uint64_t{1} << remap[bit];
  }
  return out;
}

std::uint64_t canon_mask(std::uint64_t mask, int n) {
  const CanonTables& t = canon_tables(n);
  std::uint64_t best = ~std::uint64_t{0};
  for (const auto& remap : t.pair_remap)
    best = std::min(best, remap_mask(mask, remap));
  return best;
}

// Key packing a labeling (base d, most significant = highest vertex) above
// the edge mask; the minimum over permutations is the canonical form.
std::uint64_t labeled_key(std::uint64_t mask, const std::vector<int>& labels, int d,
                          int pair_bits) {
  std::uint64_t code = 0;
  for (int v = static_cast<int>(labels.size()) - 1; v >= 0; --v)
    code = code * d + labels[v];
  return (code << pair_bits) | mask;
}

std::uint64_t canon_labeled(std::uint64_t mask, const std::vector<int>& labels, int d,
                            int n) {
  const CanonTables& t = canon_tables(n);
  const int pair_bits = n * (n - 1) / 2;
  std::uint64_t best = ~std::uint64_t{0};
  std::vector<int> moved(n);
  for (size_t p = 0; p < t.perms.size(); ++p) {
    for (int v = 0; v < n; ++v) moved[t.perms[p][v]] = labels[v];
    best = std::min(best, labeled_key(remap_mask(mask, t.pair_remap[p]), moved, d,
                                      pair_bits));
  }
  return best;
}

std::vector<std::pair<int, int>> mask_edges(std::uint64_t mask, int n) {
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (mask >> pair_index(i, j) & 1) edges.emplace_back(i, j);
  return edges;
}

std::uint64_t graph_mask(const LabeledGraph& g) {
  std::uint64_t mask = 0;
  for (auto [i, j] : g.edges) mask |= std::uint64_t{1} << pair_index(i, j);
  return mask;
}

std::vector<int> mask_degrees(std::uint64_t mask, int n) {
  std::vector<int> deg(n, 0);
  for (auto [i, j] : mask_edges(mask, n)) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

// All unlabeled graphs of order n up to isomorphism, as sorted canonical
// masks, built by extending the order n-1 representatives with every
// neighborhood of a fresh vertex.
std::vector<std::uint64_t> unlabeled_masks(int n) {
  std::vector<std::uint64_t> reps{0};  // the single order-1 graph
  for (int k = 2; k <= n; ++k) {
    std::set<std::uint64_t> next;
    for (std::uint64_t rep : reps)
      for (std::uint64_t nb = 0; nb < (std::uint64_t{1} << (k - 1)); ++nb) {
        std::uint64_t mask = rep;
        for (int i = 0; i < k - 1; ++i)
          if (nb >> i & 1) mask |= std::uint64_t{1} << pair_index(i, k - 1);
        next.insert(canon_mask(mask, k));
      }
    reps.assign(next.begin(), next.end());
  }
  return reps;
}

struct LabeledRep {
  std::uint64_t mask;
  std::vector<int> labels;
};

std::vector<LabeledRep> bounded_degree_reps(int n, int d, int q) {
  std::vector<LabeledRep> reps;
  for (int c = 0; c < d; ++c) reps.push_back({0, {c}});
  for (int k = 2; k <= n; ++k) {
    const int pair_bits = k * (k - 1) / 2;
    std::set<std::uint64_t> next;
    for (const LabeledRep& rep : reps) {
      const std::vector<int> deg = mask_degrees(rep.mask, k - 1);
      for (std::uint64_t nb = 0; nb < (std::uint64_t{1} << (k - 1)); ++nb) {
        if (__builtin_popcountll(nb) > q) continue;
        bool ok = true;
        std::uint64_t mask = rep.mask;
        for (int i = 0; i < k - 1 && ok; ++i)
          if (nb >> i & 1) {
            if (deg[i] + 1 > q) ok = false;
            mask |= std::uint64_t{1} << pair_index(i, k - 1);
          }
        if (!ok) continue;
        std::vector<int> labels = rep.labels;
        labels.push_back(0);
        for (int c = 0; c < d; ++c) {
          labels[k - 1] = c;
          next.insert(canon_labeled(mask, labels, d, k));
        }
      }
    }
    reps.clear();
    const std::uint64_t pair_mask = (std::uint64_t{1} << pair_bits) - 1;
    for (std::uint64_t key : next) {
      LabeledRep rep;
      rep.mask = key & pair_mask;
      std::uint64_t code = key >> pair_bits;
      for (int v = 0; v < k; ++v) {
        rep.labels.push_back(static_cast<int>(code % d));
        code /= d;
      }
      reps.push_back(std::move(rep));
    }
  }
  return reps;
}

LabeledGraph mask_to_graph(std::uint64_t mask, int n) {
  return make_uniform_graph(n, mask_edges(mask, n));
}

LabeledGraph labeled_rep_to_graph(const LabeledRep& rep, int n, int d) {
  std::vector<std::vector<double>> feats(n, std::vector<double>(d, 0.0));
  for (int v = 0; v < n; ++v) feats[v][rep.labels[v]] = 1.0;
  return make_graph(n, mask_edges(rep.mask, n), std::move(feats), true);
}

// ---- Otter trees ------------------------------------------------------------

struct OtterShape {
  int split = 0;  // leaves in the first subtree; 0 marks a leaf
  int a = -1, b = -1;
  std::string code;
};

// pool[m] lists every unordered full binary tree with m leaves exactly once:
// splits run over k <= m-k, and equal-size subtrees are ordered by code.
const std::vector<OtterShape>& otter_pool(int leaves) {
  static std::vector<std::vector<OtterShape>> pool{{}, {{0, -1, -1, "L"}}};
  while (static_cast<int>(pool.size()) <= leaves) {
    const int m = static_cast<int>(pool.size());
    std::vector<OtterShape> shapes;
    for (int k = 1; k <= m / 2; ++k)
      for (size_t i = 0; i < pool[k].size(); ++i)
        for (size_t j = 0; j < pool[m - k].size(); ++j) {
          if (k == m - k && pool[k][i].code > pool[m - k][j].code) continue;
          shapes.push_back({k, static_cast<int>(i), static_cast<int>(j),
                            "(" + pool[k][i].code + pool[m - k][j].code + ")"});
        }
    pool.push_back(std::move(shapes));
  }
  return pool[leaves];
}

int materialize_otter(const OtterShape& shape, int leaves,
                      std::vector<std::pair<int, int>>& edges, int& next_vertex) {
  const int me = next_vertex++;
  if (shape.split > 0) {
    const int left = materialize_otter(otter_pool(shape.split)[shape.a], shape.split,
                                       edges, next_vertex);
    edges.emplace_back(me, left);
    const int right = materialize_otter(otter_pool(leaves - shape.split)[shape.b],
                                        leaves - shape.split, edges, next_vertex);
    edges.emplace_back(me, right);
  }
  return me;
}

// ---- family dispatch --------------------------------------------------------

std::string family_tag(const FamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::AllGraphs: return "G" + std::to_string(spec.n);
    case FamilyKind::AllGraphsUpTo: return "G<=" + std::to_string(spec.n);
    case FamilyKind::OtterTrees: return "T" + std::to_string(spec.n);
    case FamilyKind::PartitionPaths: return "F" + std::to_string(spec.n);
    case FamilyKind::BoundedDegreeLabeled:
      return "B" + std::to_string(spec.n) + "d" + std::to_string(spec.d) + "q" +
             std::to_string(spec.q);
  }
  fail(Errc::BadArgument, "unknown family kind");
}

GraphCollection finish_collection(std::vector<LabeledGraph> graphs,
                                  const FamilySpec& spec, int d) {
  GraphCollection c;
  c.d = d;
  const std::string tag = family_tag(spec);
  for (size_t i = 0; i < graphs.size(); ++i)
    c.source_ids.push_back(tag + "#" + std::to_string(i));
  c.graphs = std::move(graphs);
  return c;
}

void check_order(const FamilySpec& spec) {
  if (spec.n < 1) fail(Errc::BadArgument, "family order must be >= 1");
  switch (spec.kind) {
    case FamilyKind::AllGraphs:
    case FamilyKind::AllGraphsUpTo:
      if (spec.n > 7) fail(Errc::TooLarge, "all-graphs enumeration supports n <= 7");
      break;
    case FamilyKind::OtterTrees:
      if (spec.n % 2 == 0 || spec.n < 3)
        fail(Errc::BadArgument, "full binary trees need odd order >= 3");
      if (spec.n > 21) fail(Errc::TooLarge, "binary-tree enumeration supports n <= 21");
      break;
    case FamilyKind::PartitionPaths:
      if (spec.n > 14) fail(Errc::TooLarge, "partition-path family supports n <= 14");
      break;
    case FamilyKind::BoundedDegreeLabeled:
      if (spec.n > 7)
        fail(Errc::TooLarge, "bounded-degree enumeration supports n <= 7");
      if (spec.d < 1 || spec.d > 8)
        fail(Errc::BadArgument, "label alphabet size must be in 1..8");
      if (spec.q < 0) fail(Errc::BadArgument, "degree bound must be >= 0");
      break;
  }
}

}  // namespace

GraphCollection enumerate_family(const FamilySpec& spec) {
  check_order(spec);
  std::vector<LabeledGraph> graphs;
  switch (spec.kind) {
    case FamilyKind::AllGraphs:
      for (std::uint64_t mask : unlabeled_masks(spec.n))
        graphs.push_back(mask_to_graph(mask, spec.n));
      return finish_collection(std::move(graphs), spec, 1);
    case FamilyKind::AllGraphsUpTo:
      for (int k = 1; k <= spec.n; ++k)
        for (std::uint64_t mask : unlabeled_masks(k))
          graphs.push_back(mask_to_graph(mask, k));
      return finish_collection(std::move(graphs), spec, 1);
    case FamilyKind::OtterTrees: {
      const int leaves = (spec.n + 1) / 2;
      for (const OtterShape& shape : otter_pool(leaves)) {
        std::vector<std::pair<int, int>> edges;
        int next_vertex = 0;
        materialize_otter(shape, leaves, edges, next_vertex);
        graphs.push_back(make_uniform_graph(spec.n, std::move(edges)));
      }
      return finish_collection(std::move(graphs), spec, 1);
    }
    case FamilyKind::PartitionPaths:
      return partition_path_family(spec.n).collection;
    case FamilyKind::BoundedDegreeLabeled:
      for (const LabeledRep& rep : bounded_degree_reps(spec.n, spec.d, spec.q))
        graphs.push_back(labeled_rep_to_graph(rep, spec.n, spec.d));
      return finish_collection(std::move(graphs), spec, spec.d);
  }
  fail(Errc::BadArgument, "unknown family kind");
}

bool isomorphic(const LabeledGraph& g, const LabeledGraph& h) {
  if (g.n != h.n || g.d != h.d || g.edges.size() != h.edges.size()) return false;
  if (g.n > 8) fail(Errc::TooLargeForExact, "exhaustive isomorphism supports n <= 8");
  if (g.n == 0) return true;
  const std::uint64_t hm = graph_mask(h);
  auto feature_equal = [&](int gv, int hv) {
    return std::memcmp(g.features[gv].data(), h.features[hv].data(),
                       sizeof(double) * g.d) == 0;
  };
  for (const auto& perm : canon_tables(g.n).perms) {
    bool ok = true;
    for (int v = 0; v < g.n && ok; ++v) ok = feature_equal(v, perm[v]);
    for (auto [i, j] : g.edges) {
      if (!ok) break;
      const int a = std::min(perm[i], perm[j]), b = std::max(perm[i], perm[j]);
      ok = hm >> pair_index(a, b) & 1;
    }
    if (ok) return true;
  }
  return false;
}

long long wedderburn_etherington(int j) {
  if (j < 1) fail(Errc::BadArgument, "index must be >= 1");
  // a[m] counts unordered full binary trees with m leaves; the answer is
  // a[j+1] since a tree with j internal vertices has j+1 leaves.
  const int top = j + 1;
  std::vector<long long> a(top + 1, 0);
  a[1] = 1;
  auto checked = [](long long x, long long y, long long& out) {
    if (__builtin_mul_overflow(x, y, &out))
      fail(Errc::TooLarge, "count exceeds 64 bits");
  };
  for (int m = 2; m <= top; ++m) {
    long long total = 0, term = 0;
    for (int i = 1; i < (m + 1) / 2; ++i) {
      checked(a[i], a[m - i], term);
      if (__builtin_add_overflow(total, term, &total))
        fail(Errc::TooLarge, "count exceeds 64 bits");
    }
    if (m % 2 == 0) {
      checked(a[m / 2], a[m / 2] + 1, term);
      if (__builtin_add_overflow(total, term / 2, &total))
        fail(Errc::TooLarge, "count exceeds 64 bits");
    }
    a[m] = total;
  }
  return a[top];
}

std::vector<std::vector<int>> integer_partitions(int n) {
  if (n < 1) fail(Errc::BadArgument, "partitions need n >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      cur.push_back(part);
      self(self, remaining - part, part);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

PartitionPathFamily partition_path_family(int n) {
  check_order({FamilyKind::PartitionPaths, n, 1, 0});
  PartitionPathFamily fam;
  fam.partitions = integer_partitions(n);
  std::vector<LabeledGraph> graphs;
  for (const auto& parts : fam.partitions) {
    // Vertices 0..n-1: the base path.  Vertices n..2n-1: one path per part,
    // laid out in descending part order; the attachment vertex u is the first
    // vertex of the largest part.
    std::vector<std::pair<int, int>> base;
    for (int i = 0; i + 1 < n; ++i) base.emplace_back(i, i + 1);
    int start = n;
    for (int part : parts) {
      for (int i = 0; i + 1 < part; ++i) base.emplace_back(start + i, start + i + 1);
      start += part;
    }
    const int u = n;
    std::vector<int> group;
    for (int j = 1; j <= (n + 1) / 2; ++j) {
      std::vector<std::pair<int, int>> edges = base;
      edges.emplace_back(j - 1, u);
      group.push_back(static_cast<int>(graphs.size()));
      graphs.push_back(make_uniform_graph(2 * n, std::move(edges)));
    }
    fam.groups.push_back(std::move(group));
  }
  fam.collection = finish_collection(std::move(graphs), {FamilyKind::PartitionPaths, n, 1, 0}, 1);
  return fam;
}

CoverTree cover_tree(const FamilySpec& spec, int depth) {
  if (spec.kind != FamilyKind::AllGraphs && spec.kind != FamilyKind::BoundedDegreeLabeled)
    fail(Errc::BadArgument, "cover trees support AllGraphs and BoundedDegreeLabeled");
  const bool labeled = spec.kind == FamilyKind::BoundedDegreeLabeled;
  const GraphCollection collection = enumerate_family(spec);
  const QuotientResult quotient = quotient_classes(collection, Refinement::WL, depth);

  // Canonical-form lookup from an edited graph back to its enumerated twin.
  std::map<std::uint64_t, int> index_of;
  auto canon_of = [&](const LabeledGraph& g) {
    if (!labeled) return canon_mask(graph_mask(g), spec.n);
    std::vector<int> labels(g.n);
    for (int v = 0; v < g.n; ++v)
      for (int c = 0; c < g.d; ++c)
        if (g.features[v][c] == 1.0) labels[v] = c;
    return canon_labeled(graph_mask(g), labels, spec.d, spec.n);
  };
  for (size_t i = 0; i < collection.graphs.size(); ++i)
    index_of[canon_of(collection.graphs[i])] = static_cast<int>(i);
  auto class_of_graph = [&](const LabeledGraph& g) {
    return quotient.class_of[index_of.at(canon_of(g))];
  };

  LabeledGraph root_graph;
  if (labeled) {
    std::vector<std::vector<double>> feats(spec.n, std::vector<double>(spec.d, 0.0));
    for (int v = 0; v < spec.n; ++v) feats[v][0] = 1.0;
    root_graph = make_graph(spec.n, {}, std::move(feats), true);
  } else {
    root_graph = complete_graph(spec.n);
  }
  const int root = class_of_graph(root_graph);

  std::vector<std::vector<int>> members(quotient.num_classes);
  for (size_t i = 0; i < collection.graphs.size(); ++i)
    members[quotient.class_of[i]].push_back(static_cast<int>(i));

  CoverTree tree;
  tree.family = spec;
  tree.depth = depth;
  tree.parent.assign(quotient.num_classes, -1);
  tree.level.assign(quotient.num_classes, -1);
  tree.level[root] = 0;
  std::queue<int> frontier;
  frontier.push(root);
  int assigned = 1;
  auto offer = [&](int cls, int from) {
    if (tree.level[cls] >= 0) return;
    tree.parent[cls] = from;
    tree.level[cls] = tree.level[from] + 1;
    frontier.push(cls);
    ++assigned;
  };
  while (!frontier.empty()) {
    const int cls = frontier.front();
    frontier.pop();
    for (int idx : members[cls]) {
      const LabeledGraph& g = collection.graphs[idx];
      if (!labeled) {
        for (auto [i, j] : g.edges) {
          LabeledGraph h = g;
          delete_edge(h, i, j);
          offer(class_of_graph(h), cls);
        }
      } else {
        const auto deg = mask_degrees(graph_mask(g), g.n);
        for (int j = 1; j < g.n; ++j)
          for (int i = 0; i < j; ++i) {
            if (has_edge(g, i, j) || deg[i] + 1 > spec.q || deg[j] + 1 > spec.q)
              continue;
            LabeledGraph h = g;
            add_edge(h, i, j);
            offer(class_of_graph(h), cls);
          }
        for (int v = 0; v < g.n; ++v)
          for (int c = 0; c < g.d; ++c) {
            if (g.features[v][c] == 1.0) continue;
            LabeledGraph h = g;
            std::vector<double> feat(g.d, 0.0);
            feat[c] = 1.0;
            set_feature(h, v, feat);
            offer(class_of_graph(h), cls);
          }
      }
    }
  }
  if (assigned != quotient.num_classes)
    fail(Errc::BadArgument, "internal: cover tree left classes unreached");
  for (int cls = 0; cls < quotient.num_classes; ++cls)
    tree.representative.push_back(collection.graphs[quotient.representatives[cls]]);
  return tree;
}

std::vector<std::vector<int>> merge_cover(const CoverTree& tree, int k) {
  if (k < 1) fail(Errc::BadArgument, "merge count must be >= 1");
  const int m = static_cast<int>(tree.parent.size());
  std::vector<std::vector<int>> children(m);
  int root = 0;
  for (int v = 0; v < m; ++v) {
    if (tree.parent[v] < 0)
      root = v;
    else
      children[tree.parent[v]].push_back(v);
  }

  // Bottom-up accumulation: every node folds its children's still-open sets
  // into its own and emits the set as a group once it reaches k+1 classes.
  // An open set is connected and holds at most k classes, so every member
  // sits within k tree edges of the set's top node; emitted groups therefore
  // have pairwise spread at most 2k edges.
  std::vector<std::vector<int>> pending(m), groups;
  std::vector<int> group_at_child(m, -1);  // group emitted at a child of v
  std::vector<int> order;  // post-order: children before parents
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int c : children[v]) stack.push_back(c);
  }
  std::reverse(order.begin(), order.end());
  for (int v : order) {
    pending[v].push_back(v);
    for (int c : children[v])
      pending[v].insert(pending[v].end(), pending[c].begin(), pending[c].end());
    if (static_cast<int>(pending[v].size()) >= k + 1) {
      std::sort(pending[v].begin(), pending[v].end());
      if (tree.parent[v] >= 0 && group_at_child[tree.parent[v]] < 0)
        group_at_child[tree.parent[v]] = static_cast<int>(groups.size());
      groups.push_back(std::move(pending[v]));
      pending[v].clear();
    }
  }

  if (!pending[root].empty()) {
    std::sort(pending[root].begin(), pending[root].end());
    if (groups.empty()) {
      groups.push_back(std::move(pending[root]));
    } else {
      // Fold the leftover (all within k-1 edges of each other, touching the
      // root) into a group emitted just below it; combined spread stays
      // within 2k edges.
      int target = -1;
      for (int v : pending[root])
        if (group_at_child[v] >= 0) {
          target = group_at_child[v];
          break;
        }
      if (target < 0) fail(Errc::BadArgument, "internal: no adjacent group to absorb leftover");
      auto& g = groups[target];
      g.insert(g.end(), pending[root].begin(), pending[root].end());
      std::sort(g.begin(), g.end());
    }
  }
  return groups;
}

}  // namespace gm
