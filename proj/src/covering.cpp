#include "gm/covering.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "gm/error.hpp"

namespace gm {

namespace {

int check_matrix(const DistanceMatrix& dm, double epsilon) {
  if (epsilon < 0.0) fail(Errc::BadArgument, "cover radius must be >= 0");
  const int m = static_cast<int>(dm.values.size());
  for (const auto& row : dm.values)
    if (static_cast<int>(row.size()) != m)
      fail(Errc::BadArgument, "distance matrix is not square");
  for (const auto& row : dm.values)
    for (double v : row)
      if (!(v >= -kBallSlack))
        fail(Errc::BadArgument, "distance matrix has a negative entry");
  return m;
}

bool inside(double dist, double epsilon) { return dist <= epsilon + kBallSlack; }

// Representatives (smallest member index) of the zero-distance equivalence
// classes, in ascending order, plus each graph's class.  Transitive closure
// guards against LP noise splitting a class.
struct Classes {
  std::vector<int> rep;       // per class
  std::vector<int> class_of;  // per graph
};

Classes merge_zero_classes(const DistanceMatrix& dm) {
  const int m = static_cast<int>(dm.values.size());
  std::vector<int> root(m);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return root[x] == x ? x : root[x] = find(root[x]);
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (inside(dm.values[i][j], 0.0)) {
        const int a = find(i), b = find(j);
        if (a != b) root[std::max(a, b)] = std::min(a, b);
      }
  Classes cs;
  cs.class_of.resize(m);
  for (int i = 0; i < m; ++i)
    if (find(i) == i) {
      cs.class_of[i] = static_cast<int>(cs.rep.size());
      cs.rep.push_back(i);
    } else {
      cs.class_of[i] = cs.class_of[find(i)];
    }
  return cs;
}

// balls[i] = classes within epsilon of class i's representative, as bit
// blocks over class indices.
std::vector<std::vector<uint64_t>> class_balls(const DistanceMatrix& dm,
                                               const Classes& cs, double epsilon) {
  const int z = static_cast<int>(cs.rep.size());
  const int blocks = (z + 63) / 64;
  std::vector<std::vector<uint64_t>> balls(z, std::vector<uint64_t>(blocks, 0));
#pragma omp parallel for schedule(static) if (z > 256)
  for (int i = 0; i < z; ++i)
    for (int j = 0; j < z; ++j)
      if (inside(dm.values[cs.rep[i]][cs.rep[j]], epsilon))
        balls[i][j / 64] |= uint64_t{1} << (j % 64);
  return balls;
}

std::vector<int> greedy_centers(const std::vector<std::vector<uint64_t>>& balls) {
  const int z = static_cast<int>(balls.size());
  if (z == 0) return {};
  const int blocks = static_cast<int>(balls[0].size());
  std::vector<uint64_t> uncovered(blocks, ~uint64_t{0});
  if (z % 64) uncovered[blocks - 1] = (uint64_t{1} << (z % 64)) - 1;
  std::vector<int> centers;
  int left = z;
  while (left > 0) {
    int best = -1, best_gain = 0;
    for (int i = 0; i < z; ++i) {
      int gain = 0;
      for (int b = 0; b < blocks; ++b)
        gain += __builtin_popcountll(balls[i][b] & uncovered[b]);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    // Every class ball contains the class itself (zero diagonal), so progress
    // is guaranteed on any matrix that passed validation.
    if (best < 0)
      fail(Errc::BadArgument, "a class ball misses its own class (nonzero diagonal?)");
    for (int b = 0; b < blocks; ++b) uncovered[b] &= ~balls[best][b];
    left -= best_gain;
    centers.push_back(best);
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

// Classes no single ball contains two of; each needs its own center.
int packing_lower_bound(uint64_t uncovered, const std::vector<uint64_t>& cover_of) {
  uint64_t used_centers = 0;
  int packed = 0;
  for (uint64_t rest = uncovered; rest; rest &= rest - 1) {
    const int e = __builtin_ctzll(rest);
    if ((cover_of[e] & used_centers) == 0) {
      used_centers |= cover_of[e];
      ++packed;
    }
  }
  return packed;
}

struct ExactSearch {
  const std::vector<uint64_t>& balls;     // over class bits, z <= 64
  const std::vector<uint64_t>& cover_of;  // per class: centers whose ball holds it
  std::vector<int> best;
  std::vector<int> chosen;

  void dfs(uint64_t uncovered) {
    if (uncovered == 0) {
      best = chosen;
      return;
    }
    if (static_cast<int>(chosen.size()) + packing_lower_bound(uncovered, cover_of) >=
        static_cast<int>(best.size()))
      return;
    // Branch on the uncovered class with the fewest candidate centers.
    int elem = -1, fewest = 65;
    for (uint64_t rest = uncovered; rest; rest &= rest - 1) {
      const int e = __builtin_ctzll(rest);
      const int options = __builtin_popcountll(cover_of[e]);
      if (options < fewest) {
        fewest = options;
        elem = e;
      }
    }
    for (uint64_t rest = cover_of[elem]; rest; rest &= rest - 1) {
      const int center = __builtin_ctzll(rest);
      chosen.push_back(center);
      dfs(uncovered & ~balls[center]);
      chosen.pop_back();
    }
  }
};

// Nearest chosen center per graph, ties to the smallest center index.
std::vector<int> nearest_assignment(const DistanceMatrix& dm,
                                    const std::vector<int>& centers) {
  const int m = static_cast<int>(dm.values.size());
  std::vector<int> assignment(m, -1);
  for (int g = 0; g < m; ++g) {
    double best = 0.0;
    for (int c : centers)
      if (assignment[g] < 0 || dm.values[c][g] < best) {
        best = dm.values[c][g];
        assignment[g] = c;
      }
  }
  return assignment;
}

// `slack` is kBallSlack when coverage is the caller's contract (construction
// groups), and a small multiple of it for the internal re-check of computed
// covers, where merging near-zero distances transitively can chain a few
// slacks together.
void check_coverage(const DistanceMatrix& dm, const CoverResult& r, double slack) {
  for (size_t g = 0; g < dm.values.size(); ++g)
    if (!(dm.values[r.assignment[g]][g] <= r.epsilon + slack))
      fail(Errc::BadArgument, "graph " + std::to_string(g) +
                                  " lies outside the ball of its center " +
                                  std::to_string(r.assignment[g]));
}

const char* method_name(CoverMethod m) {
  switch (m) {
    case CoverMethod::Greedy: return "greedy";
    case CoverMethod::Exact: return "exact";
    case CoverMethod::ConstructionTree: return "construction-tree";
  }
  fail(Errc::BadArgument, "unknown cover method");
}

}  // namespace

CoverResult greedy_cover(const DistanceMatrix& dm, double epsilon) {
  check_matrix(dm, epsilon);
  const Classes cs = merge_zero_classes(dm);
  const auto balls = class_balls(dm, cs, epsilon);
  CoverResult r;
  r.epsilon = epsilon;
  r.method = CoverMethod::Greedy;
  for (int cls : greedy_centers(balls)) r.centers.push_back(cs.rep[cls]);
  r.assignment = nearest_assignment(dm, r.centers);
  check_coverage(dm, r, 10 * kBallSlack);
  return r;
}

CoverResult exact_cover(const DistanceMatrix& dm, double epsilon, int limit) {
  check_matrix(dm, epsilon);
  if (limit < 1) fail(Errc::BadArgument, "class limit must be >= 1");
  const Classes cs = merge_zero_classes(dm);
  const int z = static_cast<int>(cs.rep.size());
  if (z > limit || z > 64)
    fail(Errc::TooLarge, "exact cover limited to " + std::to_string(std::min(limit, 64)) +
                             " equivalence classes, collection has " + std::to_string(z));
  const auto blocks = class_balls(dm, cs, epsilon);
  std::vector<uint64_t> balls(z), cover_of(z, 0);
  for (int i = 0; i < z; ++i) balls[i] = blocks[i][0];
  for (int i = 0; i < z; ++i)
    for (uint64_t rest = balls[i]; rest; rest &= rest - 1)
      cover_of[__builtin_ctzll(rest)] |= uint64_t{1} << i;

  ExactSearch search{balls, cover_of, greedy_centers(blocks), {}};
  if (z > 0) {
    const uint64_t all = z == 64 ? ~uint64_t{0} : (uint64_t{1} << z) - 1;
    search.dfs(all);
  }
  CoverResult r;
  r.epsilon = epsilon;
  r.method = CoverMethod::Exact;
  for (int cls : search.best) r.centers.push_back(cs.rep[cls]);
  std::sort(r.centers.begin(), r.centers.end());
  r.assignment = nearest_assignment(dm, r.centers);
  check_coverage(dm, r, 10 * kBallSlack);
  return r;
}

CoverResult construction_cover(const DistanceMatrix& dm, double epsilon,
                               const std::vector<std::vector<int>>& groups) {
  const int m = check_matrix(dm, epsilon);
  CoverResult r;
  r.epsilon = epsilon;
  r.method = CoverMethod::ConstructionTree;
  r.assignment.assign(m, -1);
  for (const auto& group : groups) {
    if (group.empty()) fail(Errc::BadArgument, "empty group");
    const int center = *std::min_element(group.begin(), group.end());
    r.centers.push_back(center);
    for (int g : group) {
      if (g < 0 || g >= m) fail(Errc::BadArgument, "group index out of range");
      if (r.assignment[g] >= 0)
        fail(Errc::BadArgument, "graph " + std::to_string(g) + " is in two groups");
      r.assignment[g] = center;
    }
  }
  for (int g = 0; g < m; ++g)
    if (r.assignment[g] < 0)
      fail(Errc::BadArgument, "graph " + std::to_string(g) + " is in no group");
  check_coverage(dm, r, kBallSlack);
  return r;
}

std::vector<std::vector<int>> cover_to_partition(const CoverResult& c,
                                                 const DistanceMatrix& dm) {
  const int m = static_cast<int>(dm.values.size());
  for (int center : c.centers)
    if (center < 0 || center >= m) fail(Errc::BadArgument, "center index out of range");
  if (c.centers.empty() && m > 0) fail(Errc::BadArgument, "cover has no centers");
  std::vector<int> cell_of_center(m, -1);
  for (size_t k = 0; k < c.centers.size(); ++k)
    cell_of_center[c.centers[k]] = static_cast<int>(k);
  std::vector<std::vector<int>> cells(c.centers.size());
  const auto nearest = nearest_assignment(dm, c.centers);
  for (int g = 0; g < m; ++g) cells[cell_of_center[nearest[g]]].push_back(g);
  return cells;
}

void write_cover_json(const std::string& path, const CoverResult& c) {
  std::vector<int> sizes(c.centers.size(), 0);
  std::vector<int> cell_of_center(
      c.centers.empty() ? 0
                        : 1 + *std::max_element(c.centers.begin(), c.centers.end()),
      -1);
  for (size_t k = 0; k < c.centers.size(); ++k)
    cell_of_center[c.centers[k]] = static_cast<int>(k);
  for (int center : c.assignment) {
    if (center < 0 || center >= static_cast<int>(cell_of_center.size()) ||
        cell_of_center[center] < 0)
      fail(Errc::BadArgument, "assignment references a non-center");
    ++sizes[cell_of_center[center]];
  }
  nlohmann::json j;
  j["epsilon"] = c.epsilon;
  j["method"] = method_name(c.method);
  j["centers"] = c.centers;
  j["sizes"] = sizes;
  j["assignment"] = c.assignment;
  std::ofstream out(path);
  if (!out) fail(Errc::MissingFile, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace gm
