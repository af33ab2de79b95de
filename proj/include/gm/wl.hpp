#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "gm/graph.hpp"

namespace gm {

enum class Refinement { WL, MWL };

// Depth argument meaning "iterate until the vertex partition stabilizes"
// (at most n rounds; the confirming round is included in the output).
constexpr int kStableDepth = -1;

// Exact reduced fraction; mean refinement summarizes neighborhoods as
// count/degree weights, plain refinement as integer counts (denominator 1).
struct Fraction {
  long long num = 0;
  long long den = 1;  // > 0, gcd(|num|, den) == 1
  auto operator<=>(const Fraction&) const = default;
};

Fraction make_fraction(long long num, long long den);

// Neighbor summary of a refinement signature: (color, weight) pairs sorted by
// color id, one entry per distinct neighbor color.
using FreqSet = std::vector<std::pair<int, Fraction>>;

struct Coloring {
  int iteration = 0;
  std::vector<int> colors;  // colors[v] = interned color id of vertex v
};

// Interned signature behind a color id.  Iteration-0 colors store the raw
// feature vector; later colors store the vertex's previous color and its
// neighbor summary.  Fresh ids are handed out in first-seen vertex order and
// never reused across iterations.
struct ColorEntry {
  int parent = -1;  // -1 for iteration-0 colors
  FreqSet neighbors;
  std::vector<double> feature;
};

struct RefinementRun {
  Refinement kind = Refinement::WL;
  std::vector<Coloring> rounds;   // iterations 0..T
  std::vector<ColorEntry> table;  // signature per color id, shared across rounds
};

// Color refinement with multiset neighbor signatures (depth rounds, or until
// stable).  Iteration-0 colors intern the exact feature bytes.
RefinementRun wl1_refine(const LabeledGraph& g, int depth = kStableDepth);

// Mean variant: the neighbor summary weights each neighbor color by
// count/degree as an exact reduced fraction (empty summary for degree 0).
RefinementRun mwl1_refine(const LabeledGraph& g, int depth = kStableDepth);

// Runs the refinement on the disjoint union of g and h and compares, at every
// iteration, the per-color vertex counts of the two sides; returns false as
// soon as any count differs.  Feature dimensions must agree.
bool wl1_joint_indistinguishable(const LabeledGraph& g, const LabeledGraph& h,
                                 int depth = kStableDepth);
bool mwl1_joint_indistinguishable(const LabeledGraph& g, const LabeledGraph& h,
                                  int depth = kStableDepth);

// Canonical printable name per color id.  Names agree across separate runs of
// the same refinement kind exactly when the colors would coincide in a joint
// run, so they make colors comparable between graphs.
std::vector<std::string> canonical_color_names(const RefinementRun& run);

struct QuotientResult {
  int num_classes = 0;
  std::vector<int> class_of;         // class index per collection member
  std::vector<int> representatives;  // smallest member index of each class
};

// Groups the collection by refinement indistinguishability at the given depth
// (kStableDepth uses the largest order in the collection as the bound).
// Classes are numbered by first occurrence, so representatives are ascending.
QuotientResult quotient_classes(const GraphCollection& c, Refinement kind, int depth);

}  // namespace gm
