#pragma once

#include "mtn/engine.hpp"

namespace mtn {

struct Ell1Report {
  Enclosure constant;            // min over the grid of norm/l1
  std::vector<Rat> arg_pattern;  // coefficients attaining the smallest hi
  size_t patterns_tested = 0;
};

// Best l1-domination constant realizable by the family over a finite
// coefficient grid: every +-1 sign pattern plus caller-supplied rows. An
// upper bound on any spreading-model constant the family could witness,
// never a claim about the infimum over the whole sphere.
Ell1Report ell1_constant(const WeightConfig& cfg, const GroundSpace& space,
                         const std::vector<FiniteVector>& family,
                         const std::vector<std::vector<Rat>>& extra_grid,
                         const Rat& width, const EngineOptions& opts = {});

struct BlockGrowthRow {
  int level = 0;  // j
  long count = 0;                                 // n_j
  Enclosure norm;                                 // ||sum of first n_j||
  Rat reference;                                  // n_j / m_j
  std::vector<std::pair<Rat, Enclosure>> powers;  // (p, n_j^(1/p))
  TreePtr witness;    // level-j average of the per-block witnesses
  Rat witness_value;  // its exact value on the partial sum
  bool lower_bound_ok = false;
};

struct BlockGrowthReport {
  std::vector<BlockGrowthRow> rows;
  bool blocks_certified = false;  // every block witnessed with norm >= 1
};

BlockGrowthReport block_growth_table(const WeightConfig& cfg,
                                     const GroundSpace& space,
                                     const std::vector<FiniteVector>& blocks,
                                     const std::vector<Rat>& p_list,
                                     const Rat& width,
                                     const EngineOptions& opts = {});

// Norm of the running averages (1/c) sum_{i<=c} x_i for each requested c.
std::vector<Enclosure> cesaro_profile(const WeightConfig& cfg,
                                      const GroundSpace& space,
                                      const std::vector<FiniteVector>& sequence,
                                      const std::vector<long>& counts,
                                      const Rat& width,
                                      const EngineOptions& opts = {});

struct QuotientReport {
  std::vector<Rat> z;
  int j0 = 0;
  J0Report conditions;
  bool conditions_ok = false;  // experiment proceeds with a warning if not
  FiniteVector x;
  std::vector<FiniteVector> blocks;  // y_t, one per repetition
  bool quotient_exact = false;       // class sums of x reproduce z
  Rat ground_lower;                  // value of the dual-ball certificate
  GroundFunctional certificate;
  Enclosure norm;
  std::vector<Rat> block_l1;      // per block, expected <= dim
  std::vector<Rat> block_ground;  // ground norm per block, expected <= 1
  bool blocks_ground_ok = false;
};

// Interlaced averaging vector x with class sums equal to z, an exact lower
// certificate, and the engine enclosure of its norm. Representatives are
// the smallest unused coordinates in class order.
QuotientReport quotient_experiment(const WeightConfig& cfg,
                                   const GroundSpace& space,
                                   const std::vector<Rat>& z, int j0,
                                   const Rat& width,
                                   const EngineOptions& opts = {});

struct AuditReport {
  std::vector<NodeAddress> deep, floored, shallow;  // A1 / A2 / A3
  TreePtr f_deep, f_floored, f_shallow;
  Rat v_deep, v_floored, v_shallow, v_total;
  bool additive = false;
  size_t boundary_blocks = 0;  // |E2|
  bool counting_ok = false;    // |E2| < 2 |A3|
};

// Classifies the terminal nodes of f against the block structure of an
// experiment vector: deep terminals (depth at least 2*s_j0, decided exactly
// via m_1^depth >= m_j0^2), terminals below a weight >= m_j0, and the rest;
// splits f accordingly and audits the boundary-block count.
AuditReport node_partition_audit(const WeightConfig& cfg,
                                 const GroundSpace& space, const TreePtr& f,
                                 const FiniteVector& x,
                                 const std::vector<FiniteVector>& blocks,
                                 int j0);

}  // namespace mtn
