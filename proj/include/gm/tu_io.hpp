#pragma once

#include <string>

#include "gm/graph.hpp"

namespace gm {

// Reads a dataset in the TU benchmark text layout from `dir`:
//   NAME_A.txt               edge list "i, j", 1-based global vertex ids;
//                            duplicate/mirrored lines collapse to one edge
//   NAME_graph_indicator.txt line v: 1-based graph id of global vertex v
//   NAME_node_labels.txt     optional; line v: integer label of vertex v.
//                            Labels become one-hot features over the sorted
//                            distinct label alphabet.  Absent file: d = 1 and
//                            every feature is [1].
//   NAME_graph_labels.txt    line g: integer class of graph g; at most two
//                            distinct values, mapped ascending to 0 and 1
// Local vertex ids follow ascending global id within each graph.
GraphCollection ingest_tu_dataset(const std::string& dir, const std::string& name);

// Inverse of ingest_tu_dataset (creates `dir` if needed).  Requires one-hot
// or uniform-[1] features; general real features have no TU representation.
// Node labels are written as the one-hot index; with uniform d=1 features the
// node-label file is omitted.  Edges are written in both directions.
void write_tu_dataset(const std::string& dir, const std::string& name,
                      const GraphCollection& c);

}  // namespace gm
