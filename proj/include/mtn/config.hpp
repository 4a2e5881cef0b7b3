#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtn/interval.hpp"
#include "mtn/rational.hpp"

namespace mtn {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TailRule { None, Doubling };

// Scaling and cardinality parameters (m_j, n_j), truncated to J entries.
// Under TailRule::Doubling the scalings extrapolate as m_{J+k} = m_J * 2^k;
// the extrapolation only ever enters analytic tail bounds, never explicit
// functional structure.
struct WeightConfig {
  std::vector<long> m;
  std::vector<long> n;
  TailRule tail = TailRule::None;

  int levels() const { return static_cast<int>(m.size()); }
  long m_at(int j) const { return m.at(j - 1); }  // 1-based
  long n_at(int j) const { return n.at(j - 1); }

  // Throws ValidationError naming the violated invariant.
  void validate() const;

  // sum_{j=from..J} 1/m_j (finite part only).
  Rat inv_m_prefix(int from = 1) const;
  // sum_{j>J} 1/m_j under the tail rule; nullopt when the tail is not
  // modeled (TailRule::None).
  std::optional<Rat> inv_m_tail() const;
  // sum over all modeled weights of 1/m_j starting at `from`; includes the
  // tail term when modeled. `from` may exceed J.
  std::optional<Rat> inv_m_from(int from) const;

  Rat inv_m2_prefix() const;
  std::optional<Rat> inv_m2_tail() const;

  // Contraction factor rho^2 used by the norm engine: sum 1/m_j^2 over the
  // weights the requested mode models.
  Rat rho_squared(bool extended) const;

  // Enclosure of s_i = log_{m_1}(m_i).
  Enclosure s_enclosure(int i, int frac_bits) const;
};

enum class Evidence { Verified, Failed, FiniteEvidence, Undecided };

std::string evidence_str(Evidence e);

struct ConditionReport {
  struct ScalingSum {       // sum 1/m_j < 1/10
    Rat prefix;
    std::optional<Rat> tail;
    Evidence verdict;       // Verified/Failed when decidable
  } scaling_sum;

  struct GrowthRow {        // ((i-1) n_{i-1})^{s_i} / n_i
    int i;
    Enclosure value;
  };
  std::vector<GrowthRow> growth_table;   // finite evidence only
  Evidence growth_verdict = Evidence::FiniteEvidence;

  struct PowerRow {         // n_i^alpha / m_i
    Rat alpha;
    int i;
    Enclosure value;
  };
  std::vector<PowerRow> power_table;     // finite evidence only
  Evidence power_verdict = Evidence::FiniteEvidence;
};

// Evaluates the three admissibility conditions on (m_j, n_j): the scaling
// sum exactly, the other two as finite evidence tables.
ConditionReport check_weight_conditions(const WeightConfig& cfg,
                                       const std::vector<Rat>& alphas,
                                       int frac_bits = 64);

struct J0Report {
  struct Item {
    Verdict verdict;
    Enclosure lhs;
    Rat rhs;
    std::string what;
  };
  Item tail_sum;     // sum_{j>=j0} 2d/m_j < 1/5
  Item growth;       // 2((j0-1) n_{j0-1})^{s_j0} / n_j0 < 1/(5d)
  Item depth;        // d / 10^{s_j0} < 1/5
  bool all_true() const;
};

// The three threshold inequalities the quotient experiment needs from its
// level j0. Each verdict is certified, with Undecided when the interval
// precision cannot separate the sides; retries shrink the precision twice
// before giving up.
J0Report check_j0_conditions(const WeightConfig& cfg, long d, int j0,
                             int frac_bits = 64);

}  // namespace mtn
