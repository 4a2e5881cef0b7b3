#include "doctest.h"
#include "fixtures.hpp"
#include "mtn/config.hpp"

using namespace mtn;

TEST_CASE("weight config validation") {
  CHECK_NOTHROW(fixtures::cfg_a().validate());
  CHECK_NOTHROW(fixtures::cfg_q().validate());

  WeightConfig bad = fixtures::cfg_a();
  bad.m = {2, 2, 8, 16};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = fixtures::cfg_a();
  bad.m = {1, 4, 8, 16};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = fixtures::cfg_a();
  bad.n = {4, 8, 16};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  // strictly increasing m with m_1 >= 2 forces m_j >= j+1, so the
  // contraction sum never reaches sum_{k>=2} 1/k^2 < 1
  WeightConfig tight;
  tight.m = {2, 3, 4, 5};
  tight.n = {4, 8, 16, 32};
  CHECK_NOTHROW(tight.validate());
  CHECK(tight.rho_squared(false) < 1);
}

TEST_CASE("tail sums under the doubling rule") {
  WeightConfig q = fixtures::cfg_q();
  CHECK(q.inv_m_prefix() == Rat(1, 32));
  CHECK(*q.inv_m_tail() == Rat(1, 480));
  // sum_{j>1} 1/m_j = 1/120 + 1/240 + 1/480 + 1/480 = 1/60
  CHECK(*q.inv_m_from(2) == Rat(1, 60));
  // beyond the configured levels the doubling tail halves each step
  CHECK(*q.inv_m_from(5) == Rat(1, 480));
  CHECK(*q.inv_m_from(6) == Rat(1, 960));
  CHECK(*q.inv_m2_tail() == Rat(1, 3 * 480L * 480L));

  WeightConfig a = fixtures::cfg_a();
  CHECK(a.inv_m2_prefix() == Rat(85, 256));
  CHECK(!a.inv_m_tail().has_value());
  CHECK(a.rho_squared(false) == Rat(85, 256));
}

TEST_CASE("scaling-sum condition report") {
  auto rep = check_weight_conditions(fixtures::cfg_q(), {Rat(1, 2)});
  CHECK(rep.scaling_sum.prefix == Rat(1, 32));
  CHECK(*rep.scaling_sum.tail == Rat(1, 480));
  CHECK(rep.scaling_sum.verdict == Evidence::Verified);

  // (c) table contains sqrt(8)/60 for alpha = 1/2
  bool found = false;
  for (const auto& row : rep.power_table) {
    if (row.i == 1 && row.alpha == Rat(1, 2)) {
      found = true;
      // enclosure of 8^(1/2)/60: certified by squaring
      CHECK(row.value.lo * row.value.lo * 3600 <= 8);
      CHECK(row.value.hi * row.value.hi * 3600 >= 8);
    }
  }
  CHECK(found);
  CHECK(rep.power_verdict == Evidence::FiniteEvidence);
  CHECK(rep.growth_verdict == Evidence::FiniteEvidence);
  CHECK(rep.growth_table.size() == 3);  // i = 2, 3, 4

  auto bad = check_weight_conditions(fixtures::cfg_a(), {});
  CHECK(bad.scaling_sum.verdict == Evidence::Failed);  // 1/2 alone >= 1/10

  // truncated tail: a passing prefix is evidence, not verification
  WeightConfig qa = fixtures::cfg_q();
  qa.tail = TailRule::None;
  CHECK(check_weight_conditions(qa, {}).scaling_sum.verdict ==
        Evidence::FiniteEvidence);
}

TEST_CASE("level conditions for the quotient experiment") {
  // d = 1, j0 = 1: (1) 2*(1/30) = 1/15 < 1/5, (2) zero base, (3) s_1 = 1
  auto rep = check_j0_conditions(fixtures::cfg_q(), 1, 1);
  CHECK(rep.tail_sum.verdict == Verdict::True);
  CHECK(rep.tail_sum.lhs.lo == Rat(1, 15));
  CHECK(rep.growth.verdict == Verdict::True);
  CHECK(rep.growth.lhs.is_point());
  CHECK(rep.depth.verdict == Verdict::True);
  CHECK(rep.all_true());

  // d = 1000 breaks the tail sum immediately
  auto big = check_j0_conditions(fixtures::cfg_q(), 1000, 1);
  CHECK(big.tail_sum.verdict == Verdict::False);

  // j0 = 2 needs the certified power (8)^{s_2}; the verdict must be decided
  auto j2 = check_j0_conditions(fixtures::cfg_q(), 1, 2);
  CHECK(j2.growth.verdict != Verdict::Undecided);
  // 2*8^{s2}/16 with s2 ~ 1.169: 8^{1.169} ~ 11.4, lhs ~ 1.42 >= 1/16
  CHECK(j2.growth.verdict == Verdict::False);

  CHECK_THROWS_AS(check_j0_conditions(fixtures::cfg_q(), 1, 5),
                  ValidationError);
  CHECK_THROWS_AS(check_j0_conditions(fixtures::cfg_q(), 0, 1),
                  ValidationError);
}

TEST_CASE("s enclosures certify the defining power identity") {
  WeightConfig q = fixtures::cfg_q();
  CHECK(q.s_enclosure(1, 32).is_point());
  CHECK(q.s_enclosure(1, 32).lo == 1);
  for (int i = 2; i <= 4; ++i) {
    Enclosure s = q.s_enclosure(i, 64);
    CHECK(s.lo > 1);
    CHECK(s.hi < 2);
    Enclosure p = pow_enclosure(Rat(60), s, 64);
    CHECK(p.lo <= q.m_at(i));
    CHECK(p.hi >= q.m_at(i));
  }
}
