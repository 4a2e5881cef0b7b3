#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mtn/config.hpp"
#include "mtn/ground.hpp"

namespace mtn {

struct NodeAddress {
  std::vector<int> path;  // child positions from the root, 1-based

  size_t depth() const { return path.size(); }
  bool is_prefix_of(const NodeAddress& o) const;
  NodeAddress child(int k) const;
  std::string str() const;
};

struct FunctionalTree;
using TreePtr = std::shared_ptr<const FunctionalTree>;

struct ConvexTerm {
  int index;   // weight index; the child must be Weighted(index)
  Rat lam;     // > 0; zero terms are simply omitted
  TreePtr child;
};

// Norming functional as an explicit tree. Nesting follows the saturation
// steps: a convex node combines weighted nodes (one per weight index, sum
// of lambda^2 at most 1), a weighted node averages successive ground or
// convex children (at most n_j of them, scaled by 1/m_j).
struct FunctionalTree {
  enum class Kind { Ground, Weighted, Convex } kind;

  GroundFunctional ground;          // Kind::Ground
  int weight_index = 0;             // Kind::Weighted
  std::vector<TreePtr> children;    // Kind::Weighted
  std::vector<ConvexTerm> terms;    // Kind::Convex; empty = zero functional

  static TreePtr make_ground(GroundFunctional g);
  static TreePtr make_weighted(int index, std::vector<TreePtr> children);
  static TreePtr make_convex(std::vector<ConvexTerm> terms);
  static TreePtr zero();
};

bool tree_equal(const TreePtr& a, const TreePtr& b);

struct TreeError : ValidationError {
  NodeAddress address;
  TreeError(NodeAddress addr, const std::string& what);
};

// Full structural validation against the weight parameters and base space.
// Throws TreeError carrying the offending node address.
void validate_tree(const TreePtr& f, const WeightConfig& cfg,
                   const GroundSpace& space);

Rat evaluate(const TreePtr& f, const WeightConfig& cfg,
             const GroundSpace& space, const FiniteVector& x);

// Exact max over coordinates of |f(e_k)|.
Rat sup_norm(const TreePtr& f, const WeightConfig& cfg,
             const GroundSpace& space);

// Support of f as a functional (cancellation-aware); nullopt when f = 0.
struct SupportBounds {
  long min = 0, max = 0;
};
std::optional<SupportBounds> support_bounds(const TreePtr& f,
                                            const WeightConfig& cfg,
                                            const GroundSpace& space);

// Weight annotations of the root. A root with more than one index is "not
// weighted"; weights are annotations of the tree, not canonical properties
// of the functional it denotes.
struct WeightDescriptor {
  std::set<int> indices;
  bool weighted() const { return indices.size() == 1; }
  int sole_index() const { return *indices.begin(); }
};
WeightDescriptor weight_of(const TreePtr& f);

// Splits a convex root into (terms with index <= i0, terms with index > i0).
// Evaluation is additive across the split.
std::pair<TreePtr, TreePtr> split_at(const TreePtr& f, int i0);

// Merges two convex roots with disjoint weight-index sets, scaling both
// term lists by lam; requires 2*lam^2 <= 1.
TreePtr combine_orthogonal(const TreePtr& psi, const TreePtr& phi,
                           const Rat& lam);

enum class CheckStatus { Ok, Failed, Unsupported, Rejected };

struct FiniteSupportCheck {
  CheckStatus status;
  std::string reason;
  int i0 = 0;
  Rat tail_bound;   // sum_{j>i0} |supp y| / m_j, tail rule applied
  Rat value;        // f_{>i0}(y)
  Rat eps;
  bool ok() const { return status == CheckStatus::Ok; }
};

// Splitting level i0 = min{i >= 0 : sum_{j>i} |supp y|/m_j < eps} and the
// bound f_{>i0}(y) < eps. Needs the doubling tail rule; without it the
// infinite part of the sum is unmodeled.
FiniteSupportCheck check_tail_splitting(const WeightConfig& cfg,
                                             const GroundSpace& space,
                                             const TreePtr& f,
                                             const FiniteVector& y,
                                             const Rat& eps);

struct SmallWeightCheck {
  CheckStatus status;
  std::string reason;
  Rat value;   // f applied to the block average
  Rat bound;   // 3 / m_{j0}
  Rat margin;  // bound - value
  bool ok() const { return status == CheckStatus::Ok; }
};

// A functional of sole weight m_{j0} against the average of n_j successive
// normalized blocks (j > j0) stays below 3/m_{j0}. Block norm enclosures
// are supplied by the caller and must contain 1.
SmallWeightCheck check_small_weight_average(
    const WeightConfig& cfg, const GroundSpace& space, const TreePtr& f,
    const std::vector<FiniteVector>& blocks, int j,
    const std::vector<Enclosure>& block_norms);

struct TreeShape {
  enum class Kind { Free, MinTerminalDepth, WeightFloor } kind =
      Kind::Free;
  int param = 0;  // depth bound 2n, or floor index j0

  static TreeShape free() { return {Kind::Free, 0}; }
  static TreeShape min_terminal_depth(int d) {
    return {Kind::MinTerminalDepth, d};
  }
  static TreeShape weight_floor(int j0) { return {Kind::WeightFloor, j0}; }
};

// Seed-deterministic generator of valid trees meeting the shape constraint.
TreePtr random_tree(const WeightConfig& cfg, const GroundSpace& space,
                    const TreeShape& shape, unsigned long long seed);

// Seed-deterministic sparse rational vector, entries bounded by sup bound.
FiniteVector random_vector(unsigned long long seed, int max_support = 6,
                           long max_coord = 12, long max_num = 2,
                           long max_den = 2);

std::string tree_to_json(const TreePtr& f);
TreePtr tree_from_json(const std::string& text);

}  // namespace mtn
