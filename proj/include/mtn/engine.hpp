#pragma once

#include "mtn/functionals.hpp"

namespace mtn {

struct EngineOptions {
  // Model the weight tail in upper bounds (doubling rule); lower bounds
  // always stay within the configured levels.
  bool extended = false;
  int sqrt_bits = 0;    // 0: derived from the target width
  int max_sweeps = 0;   // 0: derived from the contraction factor
  bool trace = false;   // record the root width after every sweep
};

// Per-window enclosures of the final sweep, exposed for inspection and for
// the monotonicity/soundness property tests.
struct NormTable {
  std::vector<long> support;                 // support coordinates of x
  std::vector<std::vector<Enclosure>> cell;  // cell[i][j-i] = window k_i..k_j
  int sweeps = 0;
  bool width_reached = true;
  std::vector<Rat> root_widths;  // per sweep, de-normalized (with trace)

  const Enclosure& window(size_t i, size_t j) const {
    return cell.at(i).at(j - i);
  }
  Enclosure root() const;
};

struct NormResult {
  Enclosure enclosure;  // lo is the exact value of the witness below
  TreePtr witness;
  Rat witness_value;
  NormTable table;
};

// Certified two-sided norm computation. Lower and upper tables start at the
// ground norm and the l1 norm of each window and are swept through the
// saturation recurrence until the root width reaches the target; each sweep
// contracts the gap by rho = sqrt(sum 1/m_j^2). Refuses configurations with
// rho >= 1.
NormResult norm(const WeightConfig& cfg, const GroundSpace& space,
                const FiniteVector& x, const Rat& target_width,
                const EngineOptions& opts = {});

// Anytime lower bound: the witnessed value after `budget_sweeps` lower
// sweeps. Nondecreasing in the budget.
std::pair<Rat, TreePtr> norm_lower_witness(const WeightConfig& cfg,
                                           const GroundSpace& space,
                                           const FiniteVector& x,
                                           int budget_sweeps);

}  // namespace mtn
