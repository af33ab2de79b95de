#include "gm/tu_io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <string_view>

#include "gm/error.hpp"

namespace fs = std::filesystem;

namespace gm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::MissingFile, path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

[[noreturn]] void bad_line(const fs::path& file, size_t lineno, const std::string& line) {
  fail(Errc::MalformedLine, file.filename().string() + " line " + std::to_string(lineno) +
                                ": '" + line + "'");
}

// Comma-separated integers; exactly `expected` of them.
std::vector<long long> parse_ints(const std::string& line, size_t expected,
                                  const fs::path& file, size_t lineno) {
  std::vector<long long> out;
  std::string_view rest = line;
  while (true) {
    size_t comma = rest.find(',');
    std::string_view tok = trim(rest.substr(0, comma));
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      bad_line(file, lineno, line);
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.size() != expected) bad_line(file, lineno, line);
  return out;
}

}  // namespace

GraphCollection ingest_tu_dataset(const std::string& dir, const std::string& name) {
  const fs::path base = fs::path(dir);
  const fs::path f_edges = base / (name + "_A.txt");
  const fs::path f_indicator = base / (name + "_graph_indicator.txt");
  const fs::path f_node_labels = base / (name + "_node_labels.txt");
  const fs::path f_graph_labels = base / (name + "_graph_labels.txt");

  const auto indicator_lines = read_lines(f_indicator);
  const size_t total = indicator_lines.size();
  std::vector<int> graph_of(total);  // 0-based graph id per global vertex
  int num_graphs = 0;
  for (size_t v = 0; v < total; ++v) {
    long long gid = parse_ints(indicator_lines[v], 1, f_indicator, v + 1)[0];
    if (gid < 1)
      fail(Errc::InconsistentIndicator, "graph id " + std::to_string(gid) + " < 1");
    graph_of[v] = static_cast<int>(gid) - 1;
    num_graphs = std::max(num_graphs, static_cast<int>(gid));
  }
  std::vector<int> order(num_graphs, 0);   // vertices per graph
  std::vector<int> local_id(total);        // local index of each global vertex
  for (size_t v = 0; v < total; ++v) local_id[v] = order[graph_of[v]]++;
  for (int gi = 0; gi < num_graphs; ++gi)
    if (order[gi] == 0)
      fail(Errc::InconsistentIndicator, "graph id " + std::to_string(gi + 1) +
                                            " never appears in the indicator");

  std::vector<std::vector<std::pair<int, int>>> edges(num_graphs);
  const auto edge_lines = read_lines(f_edges);
  for (size_t k = 0; k < edge_lines.size(); ++k) {
    auto ij = parse_ints(edge_lines[k], 2, f_edges, k + 1);
    long long i = ij[0], j = ij[1];
    if (i < 1 || j < 1 || i > static_cast<long long>(total) || j > static_cast<long long>(total))
      fail(Errc::InconsistentIndicator,
           "edge endpoint out of vertex range in line " + std::to_string(k + 1));
    if (i == j) bad_line(f_edges, k + 1, edge_lines[k]);
    int u = static_cast<int>(i) - 1, v = static_cast<int>(j) - 1;
    if (graph_of[u] != graph_of[v])
      fail(Errc::InconsistentIndicator,
           "edge between graphs " + std::to_string(graph_of[u] + 1) + " and " +
               std::to_string(graph_of[v] + 1) + " in line " + std::to_string(k + 1));
    edges[graph_of[u]].emplace_back(local_id[u], local_id[v]);
  }

  int d = 1;
  bool one_hot = false;
  std::vector<std::vector<double>> features(total);
  if (fs::exists(f_node_labels)) {
    const auto label_lines = read_lines(f_node_labels);
    if (label_lines.size() != total)
      fail(Errc::InconsistentIndicator,
           std::to_string(label_lines.size()) + " node labels for " + std::to_string(total) +
               " vertices");
    std::vector<long long> raw(total);
    std::map<long long, int> rank;  // ascending label alphabet -> one-hot slot
    for (size_t v = 0; v < total; ++v) {
      raw[v] = parse_ints(label_lines[v], 1, f_node_labels, v + 1)[0];
      rank.emplace(raw[v], 0);
    }
    int next = 0;
    for (auto& [label, r] : rank) r = next++;
    d = next;
    one_hot = true;
    for (size_t v = 0; v < total; ++v) {
      features[v].assign(d, 0.0);
      features[v][rank[raw[v]]] = 1.0;
    }
  } else {
    for (auto& row : features) row.assign(1, 1.0);
  }

  const auto class_lines = read_lines(f_graph_labels);
  if (class_lines.size() != static_cast<size_t>(num_graphs))
    fail(Errc::InconsistentIndicator, std::to_string(class_lines.size()) +
                                          " graph labels for " + std::to_string(num_graphs) +
                                          " graphs");
  std::vector<long long> raw_class(num_graphs);
  std::map<long long, int> class_rank;
  for (int gi = 0; gi < num_graphs; ++gi) {
    raw_class[gi] = parse_ints(class_lines[gi], 1, f_graph_labels, gi + 1)[0];
    class_rank.emplace(raw_class[gi], 0);
  }
  if (class_rank.size() > 2)
    fail(Errc::InvalidGraphLabels,
         std::to_string(class_rank.size()) + " distinct graph labels; at most 2 supported");
  int next_class = 0;
  for (auto& [label, r] : class_rank) r = next_class++;

  GraphCollection c;
  c.d = d;
  std::vector<std::vector<std::vector<double>>> per_graph_features(num_graphs);
  for (int gi = 0; gi < num_graphs; ++gi) per_graph_features[gi].resize(order[gi]);
  for (size_t v = 0; v < total; ++v)
    per_graph_features[graph_of[v]][local_id[v]] = std::move(features[v]);
  for (int gi = 0; gi < num_graphs; ++gi) {
    c.graphs.push_back(make_graph(order[gi], std::move(edges[gi]),
                                  std::move(per_graph_features[gi]), one_hot));
    c.labels.push_back(class_rank[raw_class[gi]]);
    c.source_ids.push_back(name + "#" + std::to_string(gi + 1));
  }
  validate(c);
  return c;
}

void write_tu_dataset(const std::string& dir, const std::string& name,
                      const GraphCollection& c) {
  validate(c);
  const fs::path base = fs::path(dir);
  fs::create_directories(base);

  bool uniform = true;
  for (const auto& g : c.graphs) {
    if (g.d != 1) uniform = false;
    for (const auto& row : g.features)
      if (row != std::vector<double>{1.0}) uniform = false;
    if (!uniform) break;
  }

  std::vector<int> vertex_base(c.graphs.size() + 1, 0);
  for (size_t gi = 0; gi < c.graphs.size(); ++gi)
    vertex_base[gi + 1] = vertex_base[gi] + c.graphs[gi].n;

  {
    std::ofstream out(base / (name + "_A.txt"));
    std::vector<std::pair<int, int>> directed;
    for (size_t gi = 0; gi < c.graphs.size(); ++gi)
      for (auto [u, v] : c.graphs[gi].edges) {
        directed.emplace_back(vertex_base[gi] + u + 1, vertex_base[gi] + v + 1);
        directed.emplace_back(vertex_base[gi] + v + 1, vertex_base[gi] + u + 1);
      }
    std::sort(directed.begin(), directed.end());
    for (auto [i, j] : directed) out << i << ", " << j << "\n";
  }
  {
    std::ofstream out(base / (name + "_graph_indicator.txt"));
    for (size_t gi = 0; gi < c.graphs.size(); ++gi)
      for (int v = 0; v < c.graphs[gi].n; ++v) out << gi + 1 << "\n";
  }
  if (!uniform) {
    std::ofstream out(base / (name + "_node_labels.txt"));
    for (const auto& g : c.graphs)
      for (const auto& row : g.features) {
        int slot = -1;
        for (int k = 0; k < g.d; ++k) {
          if (row[k] == 1.0 && slot < 0)
            slot = k;
          else if (row[k] != 0.0)
            fail(Errc::BadArgument,
                 "cannot export non-indicator features to the TU text layout");
        }
        if (slot < 0)
          fail(Errc::BadArgument,
               "cannot export non-indicator features to the TU text layout");
        out << slot << "\n";
      }
  }
  {
    std::ofstream out(base / (name + "_graph_labels.txt"));
    for (size_t gi = 0; gi < c.graphs.size(); ++gi)
      out << (c.labels.empty() ? 1 : c.labels[gi]) << "\n";
  }
}

}  // namespace gm
