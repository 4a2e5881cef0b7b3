#pragma once

#include "mtn/config.hpp"
#include "mtn/ground.hpp"

namespace fixtures {

// m = (2,4,8,16), n = (4,8,16,32): admits the engine (sum 1/m^2 = 85/256)
// but fails the scaling condition.
inline mtn::WeightConfig cfg_a() {
  mtn::WeightConfig cfg;
  cfg.m = {2, 4, 8, 16};
  cfg.n = {4, 8, 16, 32};
  cfg.tail = mtn::TailRule::None;
  return cfg;
}

// m = (60,120,240,480), n = (8,16,32,64), doubling tail: satisfies the
// scaling condition.
inline mtn::WeightConfig cfg_q() {
  mtn::WeightConfig cfg;
  cfg.m = {60, 120, 240, 480};
  cfg.n = {8, 16, 32, 64};
  cfg.tail = mtn::TailRule::Doubling;
  return cfg;
}

// One-dimensional base: F = {+1, -1}, every class-sum functional.
inline mtn::GroundSpace line_space() {
  mtn::GroundSpace sp;
  sp.dim = 1;
  sp.norming_set = {{mtn::Rat(1)}, {mtn::Rat(-1)}};
  sp.partition = mtn::Partition::round_robin(1);
  return sp;
}

// Two-dimensional sup-norm base: F = {+-e1, +-e2}.
inline mtn::GroundSpace sup2_space() {
  mtn::GroundSpace sp;
  sp.dim = 2;
  sp.norming_set = {{mtn::Rat(1), mtn::Rat(0)},
                    {mtn::Rat(-1), mtn::Rat(0)},
                    {mtn::Rat(0), mtn::Rat(1)},
                    {mtn::Rat(0), mtn::Rat(-1)}};
  sp.partition = mtn::Partition::round_robin(2);
  return sp;
}

// Two-dimensional l1-norm base: the dual ball of l1 is the sup ball, whose
// extreme points are the four sign vectors.
inline mtn::GroundSpace l1_2_space() {
  mtn::GroundSpace sp;
  sp.dim = 2;
  sp.norming_set = {{mtn::Rat(1), mtn::Rat(1)},
                    {mtn::Rat(1), mtn::Rat(-1)},
                    {mtn::Rat(-1), mtn::Rat(1)},
                    {mtn::Rat(-1), mtn::Rat(-1)},
                    {mtn::Rat(1), mtn::Rat(0)},
                    {mtn::Rat(-1), mtn::Rat(0)},
                    {mtn::Rat(0), mtn::Rat(1)},
                    {mtn::Rat(0), mtn::Rat(-1)}};
  sp.partition = mtn::Partition::round_robin(2);
  return sp;
}

inline mtn::FiniteVector vec(std::initializer_list<long> entries) {
  mtn::FiniteVector v;
  long coord = 1;
  for (long e : entries) v.set(coord++, mtn::Rat(e));
  return v;
}

}  // namespace fixtures
