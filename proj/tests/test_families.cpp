#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

#include "gm/error.hpp"
#include "gm/families.hpp"
#include "gm/graph.hpp"
#include "gm/metrics.hpp"
#include "gm/tu_io.hpp"
#include "gm/wl.hpp"

using namespace gm;

namespace {

Errc thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::BadArgument;
}

std::vector<int> degree_sequence(const LabeledGraph& g) {
  std::vector<int> deg(g.n, 0);
  for (auto [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

bool acyclic(const LabeledGraph& g) {
  std::vector<int> root(g.n);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return root[x] == x ? x : root[x] = find(root[x]);
  };
  for (auto [u, v] : g.edges) {
    const int a = find(u), b = find(v);
    if (a == b) return false;
    root[a] = b;
  }
  return true;
}

void check_pairwise_non_isomorphic(const GraphCollection& c) {
  for (size_t i = 0; i < c.graphs.size(); ++i)
    for (size_t j = i + 1; j < c.graphs.size(); ++j)
      CHECK_FALSE(isomorphic(c.graphs[i], c.graphs[j]));
}

// Pairwise hop counts inside the (undirected view of the) cover tree.
std::vector<std::vector<int>> tree_distances(const CoverTree& t) {
  const int m = static_cast<int>(t.parent.size());
  std::vector<std::vector<int>> adj(m), dist(m, std::vector<int>(m, -1));
  for (int v = 0; v < m; ++v)
    if (t.parent[v] >= 0) {
      adj[v].push_back(t.parent[v]);
      adj[t.parent[v]].push_back(v);
    }
  for (int s = 0; s < m; ++s) {
    std::queue<int> q;
    q.push(s);
    dist[s][s] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (dist[s][w] < 0) {
          dist[s][w] = dist[s][v] + 1;
          q.push(w);
        }
    }
  }
  return dist;
}

void check_merge_cover(const CoverTree& tree, int k) {
  const auto groups = merge_cover(tree, k);
  const int m = static_cast<int>(tree.parent.size());
  std::vector<int> seen(m, 0);
  for (const auto& group : groups) {
    CHECK(static_cast<int>(group.size()) >= k + 1);
    for (int cls : group) ++seen[cls];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  CHECK(static_cast<int>(groups.size()) <= m / (k + 1));
  const auto dist = tree_distances(tree);
  for (const auto& group : groups)
    for (size_t a = 0; a < group.size(); ++a)
      for (size_t b = a + 1; b < group.size(); ++b) {
        CHECK(dist[group[a]][group[b]] <= 2 * k);
        CHECK(delta_ds_1(tree.representative[group[a]],
                         tree.representative[group[b]]) <= 4.0 * k + 1e-6);
      }
}

}  // namespace

TEST_SUITE("families") {

TEST_CASE("integer partitions") {
  CHECK(integer_partitions(1) == std::vector<std::vector<int>>{{1}});
  const std::vector<std::vector<int>> p4{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  CHECK(integer_partitions(4) == p4);
  CHECK(integer_partitions(5).size() == 7);
  for (const auto& parts : integer_partitions(9)) {
    CHECK(std::accumulate(parts.begin(), parts.end(), 0) == 9);
    CHECK(std::is_sorted(parts.rbegin(), parts.rend()));
  }
  CHECK(thrown_code([] { integer_partitions(0); }) == Errc::BadArgument);
}

TEST_CASE("binary tree counts follow the recurrence") {
  const std::vector<long long> expected{1, 1, 2, 3, 6, 11, 23, 46, 98, 207};
  for (int j = 1; j <= 10; ++j) CHECK(wedderburn_etherington(j) == expected[j - 1]);
  CHECK(thrown_code([] { wedderburn_etherington(0); }) == Errc::BadArgument);

  // The counts grow like j^{-3/2} b^j with b close to 2.4832: the compensated
  // sequence w_j j^{3/2} / b^j settles down, its successive relative changes
  // shrinking by two orders of magnitude over j <= 40.
  const double b = 2.4832;
  auto compensated = [&](int j) {
    return static_cast<double>(wedderburn_etherington(j)) * std::pow(j, 1.5) /
           std::pow(b, j);
  };
  auto change = [&](int j) { return std::abs(compensated(j + 1) / compensated(j) - 1.0); };
  CHECK(change(5) > 0.02);
  CHECK(change(10) < change(5));
  CHECK(change(20) < change(10));
  CHECK(change(40) < change(20));
  CHECK(change(40) < 1e-3);
  CHECK(compensated(40) > 0.7);
  CHECK(compensated(40) < 0.85);
}

TEST_CASE("full binary tree enumeration") {
  for (int j = 1; j <= 10; ++j) {
    const GraphCollection c = enumerate_family({FamilyKind::OtterTrees, 2 * j + 1, 1, 0});
    CHECK(static_cast<long long>(c.graphs.size()) == wedderburn_etherington(j));
  }
  const GraphCollection nine = enumerate_family({FamilyKind::OtterTrees, 9, 1, 0});
  for (const LabeledGraph& g : nine.graphs) {
    CHECK(g.n == 9);
    CHECK(g.edges.size() == 8);
    const auto deg = degree_sequence(g);
    CHECK(std::count(deg.begin(), deg.end(), 2) == 1);
    for (int d : deg) CHECK((d == 1 || d == 2 || d == 3));
  }
  check_pairwise_non_isomorphic(enumerate_family({FamilyKind::OtterTrees, 7, 1, 0}));
  // The plain refinement separates non-isomorphic forests, so the quotient
  // seeing one class per tree certifies pairwise non-isomorphism at order 11.
  const GraphCollection eleven = enumerate_family({FamilyKind::OtterTrees, 11, 1, 0});
  CHECK(quotient_classes(eleven, Refinement::WL, kStableDepth).num_classes ==
        static_cast<int>(eleven.graphs.size()));

  CHECK(thrown_code([] { enumerate_family({FamilyKind::OtterTrees, 8, 1, 0}); }) ==
        Errc::BadArgument);
  CHECK(thrown_code([] { enumerate_family({FamilyKind::OtterTrees, 1, 1, 0}); }) ==
        Errc::BadArgument);
  CHECK(thrown_code([] { enumerate_family({FamilyKind::OtterTrees, 23, 1, 0}); }) ==
        Errc::TooLarge);
}

TEST_CASE("all-graphs enumeration") {
  const std::vector<size_t> counts{1, 2, 4, 11, 34, 156};
  for (int n = 1; n <= 6; ++n)
    CHECK(enumerate_family({FamilyKind::AllGraphs, n, 1, 0}).graphs.size() ==
          counts[n - 1]);

  const GraphCollection four = enumerate_family({FamilyKind::AllGraphs, 4, 1, 0});
  CHECK(four.source_ids[0] == "G4#0");
  std::map<size_t, int> by_edges;
  for (const LabeledGraph& g : four.graphs) ++by_edges[g.edges.size()];
  CHECK(by_edges == std::map<size_t, int>{{0, 1}, {1, 1}, {2, 2}, {3, 3}, {4, 2}, {5, 1}, {6, 1}});
  check_pairwise_non_isomorphic(enumerate_family({FamilyKind::AllGraphs, 5, 1, 0}));

  const GraphCollection upto = enumerate_family({FamilyKind::AllGraphsUpTo, 4, 1, 0});
  CHECK(upto.graphs.size() == 18);
  CHECK(std::is_sorted(upto.graphs.begin(), upto.graphs.end(),
                       [](const LabeledGraph& a, const LabeledGraph& b) { return a.n < b.n; }));

  CHECK(thrown_code([] { enumerate_family({FamilyKind::AllGraphs, 8, 1, 0}); }) ==
        Errc::TooLarge);
  CHECK(thrown_code([] { enumerate_family({FamilyKind::AllGraphs, 0, 1, 0}); }) ==
        Errc::BadArgument);
}

TEST_CASE("all-graphs enumeration at order seven") {
  CHECK(enumerate_family({FamilyKind::AllGraphs, 7, 1, 0}).graphs.size() == 1044);
}

TEST_CASE("refinement merges exactly four pairs at order six") {
  // The four indistinguishable pairs: the 2-regular pair (hexagon vs two
  // triangles), the same pair with an antipodal chord vs a bridge between the
  // triangles, the complements of those, and the 3-regular pair (complete
  // bipartite vs prism).  One pair per edge count 6..9.
  const GraphCollection six = enumerate_family({FamilyKind::AllGraphs, 6, 1, 0});
  const QuotientResult q = quotient_classes(six, Refinement::WL, kStableDepth);
  CHECK(q.num_classes == 152);
  std::vector<std::vector<int>> members(q.num_classes);
  for (size_t i = 0; i < six.graphs.size(); ++i)
    members[q.class_of[i]].push_back(static_cast<int>(i));
  std::set<size_t> merged_edge_counts;
  for (const auto& cls : members) {
    CHECK(cls.size() <= 2);
    if (cls.size() != 2) continue;
    const LabeledGraph &a = six.graphs[cls[0]], &b = six.graphs[cls[1]];
    CHECK_FALSE(isomorphic(a, b));
    CHECK(wl1_joint_indistinguishable(a, b));
    auto da = degree_sequence(a), db = degree_sequence(b);
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    CHECK(da == db);
    REQUIRE(a.edges.size() == b.edges.size());
    merged_edge_counts.insert(a.edges.size());
    if (a.edges.size() == 6) CHECK(da == std::vector<int>{2, 2, 2, 2, 2, 2});
    if (a.edges.size() == 9) CHECK(da == std::vector<int>{3, 3, 3, 3, 3, 3});
  }
  CHECK(merged_edge_counts == std::set<size_t>{6, 7, 8, 9});
}

TEST_CASE("bounded-degree labeled enumeration") {
  auto count = [](int n, int d, int q) {
    return enumerate_family({FamilyKind::BoundedDegreeLabeled, n, d, q}).graphs.size();
  };
  CHECK(count(2, 1, 1) == 2);   // empty pair, single edge
  CHECK(count(2, 2, 1) == 6);   // three label multisets, with and without the edge
  CHECK(count(3, 1, 1) == 2);   // matchings only
  CHECK(count(3, 1, 2) == 4);   // every order-3 graph has max degree <= 2
  CHECK(count(4, 1, 3) == 11);  // degree cap inactive: all order-4 graphs
  CHECK(count(3, 2, 0) == 4);   // labelings of the empty graph
  CHECK(count(5, 1, 2) == 11);  // disjoint unions of paths and cycles on 5 vertices

  const GraphCollection c = enumerate_family({FamilyKind::BoundedDegreeLabeled, 3, 2, 2});
  CHECK(c.d == 2);
  for (const LabeledGraph& g : c.graphs) {
    CHECK(g.one_hot);
    for (const auto& f : g.features)
      CHECK(std::count(f.begin(), f.end(), 1.0) == 1);
    for (int deg : degree_sequence(g)) CHECK(deg <= 2);
  }
  check_pairwise_non_isomorphic(c);

  CHECK(thrown_code([] { enumerate_family({FamilyKind::BoundedDegreeLabeled, 3, 9, 1}); }) ==
        Errc::BadArgument);
  CHECK(thrown_code([] { enumerate_family({FamilyKind::BoundedDegreeLabeled, 3, 2, -1}); }) ==
        Errc::BadArgument);
  CHECK(thrown_code([] { enumerate_family({FamilyKind::BoundedDegreeLabeled, 8, 2, 2}); }) ==
        Errc::TooLarge);
}

TEST_CASE("partition path family") {
  const PartitionPathFamily f4 = partition_path_family(4);
  CHECK(f4.partitions.size() == 5);
  CHECK(f4.groups.size() == 5);
  CHECK(f4.collection.graphs.size() == 10);
  for (const auto& group : f4.groups) CHECK(group.size() == 2);
  for (const LabeledGraph& g : f4.collection.graphs) {
    CHECK(g.n == 8);
    CHECK(acyclic(g));
  }
  check_pairwise_non_isomorphic(f4.collection);

  // Members of one group share every edge except the cross edge: two edits.
  for (const auto& group : f4.groups)
    for (size_t a = 0; a < group.size(); ++a)
      for (size_t b = a + 1; b < group.size(); ++b) {
        const auto& ea = f4.collection.graphs[group[a]].edges;
        const auto& eb = f4.collection.graphs[group[b]].edges;
        std::vector<std::pair<int, int>> diff;
        std::set_symmetric_difference(ea.begin(), ea.end(), eb.begin(), eb.end(),
                                      std::back_inserter(diff));
        CHECK(diff.size() == 2);
        CHECK(delta_ds_1(f4.collection.graphs[group[a]],
                         f4.collection.graphs[group[b]]) <= 4.0 + 1e-6);
      }

  // Different component counts force different edge counts across groups.
  CHECK(f4.collection.graphs[f4.groups[0][0]].edges.size() !=
        f4.collection.graphs[f4.groups[4][0]].edges.size());

  // Larger orders: certified pairwise distinct through the forest-complete
  // refinement quotient.
  for (int n : {6, 7}) {
    const PartitionPathFamily fam = partition_path_family(n);
    CHECK(fam.groups.size() == integer_partitions(n).size());
    for (const auto& group : fam.groups)
      CHECK(static_cast<int>(group.size()) == (n + 1) / 2);
    CHECK(quotient_classes(fam.collection, Refinement::WL, kStableDepth).num_classes ==
          static_cast<int>(fam.collection.graphs.size()));
  }

  CHECK(thrown_code([] { partition_path_family(15); }) == Errc::TooLarge);
  CHECK(thrown_code([] { partition_path_family(0); }) == Errc::BadArgument);
}

TEST_CASE("exhaustive isomorphism check") {
  std::vector<int> perm{2, 0, 3, 1, 4};
  const LabeledGraph g = make_graph(5, {{0, 1}, {1, 2}, {2, 3}},
                                    {{1.0}, {2.0}, {1.0}, {3.0}, {0.5}});
  CHECK(isomorphic(g, permute_vertices(g, perm)));
  CHECK_FALSE(isomorphic(complete_graph(3), path_graph(3)));
  LabeledGraph h = g;
  set_feature(h, 4, {0.75});
  CHECK_FALSE(isomorphic(g, h));
  CHECK(thrown_code([] { isomorphic(empty_graph(9), empty_graph(9)); }) ==
        Errc::TooLargeForExact);
}

TEST_CASE("cover tree walks the all-graphs classes by single deletions") {
  const CoverTree t = cover_tree({FamilyKind::AllGraphs, 4, 1, 0}, kStableDepth);
  REQUIRE(t.representative.size() == 11);
  std::map<int, int> level_sizes;
  int roots = 0, root = -1;
  for (size_t cls = 0; cls < t.parent.size(); ++cls) {
    ++level_sizes[t.level[cls]];
    if (t.parent[cls] < 0) {
      ++roots;
      root = static_cast<int>(cls);
    } else {
      CHECK(t.level[cls] == t.level[t.parent[cls]] + 1);
    }
  }
  CHECK(roots == 1);
  CHECK(t.level[root] == 0);
  CHECK(isomorphic(t.representative[root], complete_graph(4)));
  CHECK(level_sizes ==
        std::map<int, int>{{0, 1}, {1, 1}, {2, 2}, {3, 3}, {4, 2}, {5, 1}, {6, 1}});
  for (size_t cls = 0; cls < t.parent.size(); ++cls) {
    CHECK(static_cast<int>(t.representative[cls].edges.size()) == 6 - t.level[cls]);
    if (t.parent[cls] >= 0)
      CHECK(delta_ds_1(t.representative[cls], t.representative[t.parent[cls]]) <=
            2.0 + 1e-7);
  }
  for (size_t a = 0; a < t.parent.size(); ++a)
    for (size_t b = a + 1; b < t.parent.size(); ++b)
      if (t.parent[a] >= 0 && t.parent[a] == t.parent[b])
        CHECK(delta_ds_1(t.representative[a], t.representative[b]) <= 4.0 + 1e-7);

  const CoverTree t6 = cover_tree({FamilyKind::AllGraphs, 6, 1, 0}, kStableDepth);
  CHECK(t6.representative.size() == 152);
  for (int cls = 0; cls < 10; ++cls)
    if (t6.parent[cls] >= 0)
      CHECK(delta_ds_1(t6.representative[cls], t6.representative[t6.parent[cls]]) <=
            2.0 + 1e-7);

  CHECK(thrown_code([] { cover_tree({FamilyKind::OtterTrees, 5, 1, 0}, 1); }) ==
        Errc::BadArgument);
}

TEST_CASE("cover tree walks the labeled classes by single edits") {
  // Classes at order 3, two labels, degree cap 2: four labelings each of the
  // empty graph and the triangle, six each of the single edge and the path.
  const CoverTree t = cover_tree({FamilyKind::BoundedDegreeLabeled, 3, 2, 2}, 2);
  CHECK(t.representative.size() == 20);
  int root = -1;
  for (size_t cls = 0; cls < t.parent.size(); ++cls)
    if (t.parent[cls] < 0) root = static_cast<int>(cls);
  REQUIRE(root >= 0);
  CHECK(t.representative[root].edges.empty());
  for (const auto& f : t.representative[root].features)
    CHECK(f == std::vector<double>{1.0, 0.0});
  // Each parent-child pair is one edit apart, so it stays within the
  // single-edit transport bound 2 q^L (1 + ... + q^{L-1}) = 24.
  for (size_t cls = 0; cls < t.parent.size(); ++cls) {
    CHECK(t.level[cls] >= 0);
    if (t.parent[cls] >= 0)
      CHECK(forest_distance(t.representative[cls], t.representative[t.parent[cls]], 2) <=
            24.0 + 1e-9);
  }

  // Depth zero sees only the label multisets; edge edits collapse.
  const CoverTree flat = cover_tree({FamilyKind::BoundedDegreeLabeled, 3, 2, 2}, 0);
  CHECK(flat.representative.size() == 4);
}

TEST_CASE("merge cover groups classes along the tree") {
  const CoverTree t = cover_tree({FamilyKind::AllGraphs, 4, 1, 0}, kStableDepth);
  check_merge_cover(t, 1);
  check_merge_cover(t, 2);
  const auto everything = merge_cover(t, 20);
  REQUIRE(everything.size() == 1);
  CHECK(everything[0].size() == 11);
  CHECK(thrown_code([&] { merge_cover(t, 0); }) == Errc::BadArgument);
}

TEST_CASE("family export round-trips through the dataset reader") {
  namespace fs = std::filesystem;
  const std::string dir = "families_tu_roundtrip";
  for (const FamilySpec spec : {FamilySpec{FamilyKind::AllGraphs, 4, 1, 0},
                                FamilySpec{FamilyKind::BoundedDegreeLabeled, 3, 2, 1}}) {
    const GraphCollection out = enumerate_family(spec);
    write_tu_dataset(dir, "fam", out);
    const GraphCollection back = ingest_tu_dataset(dir, "fam");
    REQUIRE(back.graphs.size() == out.graphs.size());
    for (size_t i = 0; i < out.graphs.size(); ++i)
      CHECK(serialize(back.graphs[i]) == serialize(out.graphs[i]));
    fs::remove_all(dir);
  }
}

}
