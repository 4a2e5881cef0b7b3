#pragma once

#include <string>
#include <vector>

#include "mtn/interval.hpp"
#include "mtn/rational.hpp"

namespace mtn {

// Rational values on a finite rooted tree with ordered children.
struct TreeVector {
  struct Node {
    Rat value;
    std::vector<int> children;
  };
  std::vector<Node> nodes;  // node 0 is the root
  int root = 0;

  size_t size() const { return nodes.size(); }
  // "(v child child ...)" with rational v, e.g. "(1 (2 (3)) (4))".
  static TreeVector parse_text(const std::string& text);
  // {"value": "p/q", "children": [...]}
  static TreeVector parse_json(const std::string& text);
  // Accepts either of the two formats above.
  static TreeVector parse(const std::string& text);
  std::string to_json() const;
};

// Chain between two comparable nodes, top an ancestor-or-equal of bottom.
struct Segment {
  int top;
  int bottom;
};

struct JTreeResult {
  Enclosure norm;   // outward-rounded square root
  Rat squared;      // exact pre-sqrt maximum
};

// Norm given by the best family of pairwise incomparable segments, scoring
// the sum of squared segment absolute-value sums. Two segments are
// incomparable when no node of one is an ancestor-or-equal of a node of the
// other; in particular a segment excludes everything above and below it, so
// the recursion either keeps the subtrees of v independent or commits to a
// single chain through v.
JTreeResult jtree_norm(const TreeVector& tv, int sqrt_bits = 64);

// Exhaustive check over all incomparable segment families (node count
// capped); returns the exact squared maximum.
Rat jtree_norm_bruteforce(const TreeVector& tv, size_t node_cap = 12);

}  // namespace mtn
