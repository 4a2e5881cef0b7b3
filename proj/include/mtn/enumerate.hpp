#pragma once

#include <functional>

#include "mtn/functionals.hpp"

namespace mtn {

struct CapExceeded : std::runtime_error {
  Int estimate;
  CapExceeded(Int est, long cap)
      : std::runtime_error("enumeration would emit at least " +
                           est.get_str() + " trees, over the cap of " +
                           std::to_string(cap)),
        estimate(std::move(est)) {}
};

// The finite functional class used as the independent oracle: saturation
// stages up to `depth`, ground leaves with endpoints on the given support,
// convex coefficients drawn from the nonnegative rationals with denominator
// at most `lambda_max_den`.
struct EnumOptions {
  int depth = 1;
  long lambda_max_den = 2;
  long cap = 200000;  // stream size guard
};

// Streams every tree of the class. Counts first and refuses with a size
// estimate when the stream would exceed the cap.
void enumerate_functionals(const WeightConfig& cfg, const GroundSpace& space,
                           const std::vector<long>& support,
                           const EnumOptions& opts,
                           const std::function<void(const TreePtr&)>& sink);

// Exact maximum of f(x) over the same class, with an attaining tree.
// Computed stage by stage: per-window ground maxima, partition maxima for
// each weight, then the best grid combination (branch and bound); per-stage
// factorization keeps this exact without materializing the stream.
std::pair<Rat, TreePtr> enumerate_max(const WeightConfig& cfg,
                                      const GroundSpace& space,
                                      const FiniteVector& x,
                                      const EnumOptions& opts);

}  // namespace mtn
