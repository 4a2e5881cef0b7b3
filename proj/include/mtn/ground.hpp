#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtn/config.hpp"
#include "mtn/interval.hpp"
#include "mtn/rational.hpp"

namespace mtn {

// Finitely supported rational sequence; zero entries are never stored.
struct FiniteVector {
  std::map<long, Rat> entries;

  static FiniteVector unit(long coord, Rat value = Rat(1));
  // Whitespace-separated rationals, either positional ("1 -1 3/2" fills
  // coordinates 1,2,3) or indexed ("2:1 7:-1/3"); the two styles cannot mix.
  static FiniteVector parse(const std::string& text);

  void set(long coord, const Rat& value);
  Rat get(long coord) const;
  bool empty() const { return entries.empty(); }
  long min_coord() const;
  long max_coord() const;
  Rat l1() const;
  Rat linf() const;
  FiniteVector restricted(long a, long b) const;
  FiniteVector scaled(const Rat& c) const;
  FiniteVector plus(const FiniteVector& o) const;
  std::string str() const;
  bool operator==(const FiniteVector& o) const { return entries == o.entries; }
};

// Assignment of coordinates to base-space directions. Round-robin by
// default; an explicit assignment repeats its period, so every class is
// hit infinitely often as long as it appears in the period.
struct Partition {
  std::vector<int> period;  // 1-based classes; round robin = {1, 2, ..., d}

  static Partition round_robin(int dim);
  int class_of(long coord) const;  // coord >= 1
  // k-th smallest coordinate of the given class (k >= 1).
  long coord_of_class(int cls, long k) const;
  void validate(int dim) const;
  bool is_round_robin(int dim) const;
};

// Finite-dimensional base space given by the extreme-point description of
// its dual ball: a symmetric finite set F of rational functionals, with
// ||z|| = max_{f in F} f(z).
struct GroundSpace {
  int dim = 0;
  std::vector<std::vector<Rat>> norming_set;
  Partition partition;

  // Checks symmetry, spanning, per-direction normalization, and the
  // interval-restriction (bimonotonicity) certificate. Throws
  // ValidationError naming the violated clause.
  void validate() const;
};

// Element of the ground norming set: coefficients inside the dual ball,
// applied to class sums over a coordinate interval.
struct GroundFunctional {
  long a = 1, b = 0;          // coordinate interval [a, b]; empty when b < a
  std::vector<Rat> coeffs;    // one per base direction

  Rat evaluate(const GroundSpace& space, const FiniteVector& x) const;
  // Membership of coeffs in the dual ball; exact.
  void validate(const GroundSpace& space) const;
};

// Exact feasibility: does v lie in the convex hull of the given points?
// (For a symmetric F this is the absolute convex hull.) Decided by exact
// rational phase-1 simplex with Bland's rule.
bool in_convex_hull(const std::vector<std::vector<Rat>>& points,
                    const std::vector<Rat>& v);

// max_{f in F} f(z); exact.
Rat z_norm(const GroundSpace& space, const std::vector<Rat>& z);

// Class sums: i-th output entry is the sum of x over the i-th class.
std::vector<Rat> quotient_apply(const GroundSpace& space,
                                const FiniteVector& x);

// sup over ground functionals; equals the max over coordinate intervals E
// of ||quotient(x|_E)||. Exact.
Rat ground_norm(const GroundSpace& space, const FiniteVector& x);
// Same value with an attaining functional.
std::pair<Rat, GroundFunctional> ground_norm_witness(const GroundSpace& space,
                                                     const FiniteVector& x);

// Places z_i on representative coordinates, one per class. Representatives
// must be strictly increasing across classes; that ordering is what makes
// the interval estimates collapse to the base norm exactly.
FiniteVector lift_isometric(const GroundSpace& space,
                            const std::vector<Rat>& z,
                            const std::vector<long>& reps);

// Certified norm oracle for an externally held space: given coefficients
// against a fixed generating sequence, returns an enclosure of the norm of
// the combination.
using NormOracle = std::function<Enclosure(const std::vector<Rat>&)>;

// sup over coordinate intervals E of oracle(a restricted to E).
Enclosure zx_norm(const NormOracle& oracle, size_t count,
                  const std::vector<Rat>& a);

}  // namespace mtn
