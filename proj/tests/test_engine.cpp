#include "doctest.h"
#include "fixtures.hpp"
#include "mtn/engine.hpp"

using namespace mtn;

namespace {

const Rat kWidth(1, 1000000000);

// contains sqrt(s) certified by squaring (s rational, enclosure nonnegative)
bool contains_sqrt(const Enclosure& e, const Rat& s) {
  return e.lo * e.lo <= s && e.hi * e.hi >= s;
}

}  // namespace

TEST_CASE("alternating vectors under the small configuration") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();

  // (1,-1): singleton windows are ground-exact, both partitions sum to 2,
  // so the convex step yields sqrt(sum (2/m_j)^2) = sqrt(85/64).
  NormResult r = norm(cfg, sp, fixtures::vec({1, -1}), kWidth);
  CHECK(r.table.width_reached);
  CHECK(r.enclosure.width() <= kWidth);
  CHECK(contains_sqrt(r.enclosure, Rat(85, 64)));
  CHECK_NOTHROW(validate_tree(r.witness, cfg, sp));
  CHECK(evaluate(r.witness, cfg, sp, fixtures::vec({1, -1})) ==
        r.witness_value);
  CHECK(r.witness_value == r.enclosure.lo);

  // (1,-1,1,-1): singleton partitions give 4/m_j, so sqrt(85/16).
  NormResult r4 = norm(cfg, sp, fixtures::vec({1, -1, 1, -1}), kWidth);
  CHECK(contains_sqrt(r4.enclosure, Rat(85, 16)));
  CHECK(r4.enclosure.width() <= kWidth);

  // (1,1,1,1): the ground functional attains the l1 bound exactly.
  NormResult rp = norm(cfg, sp, fixtures::vec({1, 1, 1, 1}), kWidth);
  CHECK(rp.enclosure.lo == 4);
  CHECK(rp.enclosure.hi == 4);
}

TEST_CASE("degenerate inputs") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();

  NormResult z = norm(cfg, sp, FiniteVector{}, kWidth);
  CHECK(z.enclosure.lo == 0);
  CHECK(z.enclosure.hi == 0);

  NormResult s = norm(cfg, sp, FiniteVector::unit(7, Rat(-3, 4)), kWidth);
  CHECK(s.enclosure.lo == Rat(3, 4));
  CHECK(s.enclosure.hi == Rat(3, 4));
  CHECK(s.table.sweeps == 1);

  CHECK_THROWS_AS(norm(cfg, sp, FiniteVector::unit(1), Rat(0)),
                  ValidationError);
}

TEST_CASE("averaged interlaced vector is exactly norm one") {
  auto cfg = fixtures::cfg_q();
  auto sp = fixtures::line_space();
  FiniteVector x;
  for (long t = 1; t <= 8; ++t) x.set(t, Rat(1, 8));

  for (bool extended : {false, true}) {
    EngineOptions opts;
    opts.extended = extended;
    NormResult r = norm(cfg, sp, x, kWidth, opts);
    CHECK(r.enclosure.lo == 1);
    CHECK(r.enclosure.hi == 1);
  }
}

TEST_CASE("upper and lower tables bracket ground and l1") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::sup2_space();
  for (unsigned long long s = 1; s <= 25; ++s) {
    FiniteVector x = random_vector(s, 5, 8);
    if (x.empty()) continue;
    NormResult r = norm(cfg, sp, x, Rat(1, 1000));
    size_t n = r.table.support.size();
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i; j < n; ++j) {
        FiniteVector w =
            x.restricted(r.table.support[i], r.table.support[j]);
        const Enclosure& e = r.table.window(i, j);
        CHECK(e.lo >= ground_norm(sp, w));
        CHECK(e.hi <= w.l1());
        CHECK(e.lo <= e.hi);
      }
    }
  }
}

TEST_CASE("restriction monotonicity of upper bounds") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  for (unsigned long long s = 1; s <= 20; ++s) {
    FiniteVector x = random_vector(s, 6, 9);
    if (x.empty()) continue;
    NormResult r = norm(cfg, sp, x, Rat(1, 100000));
    size_t n = r.table.support.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i; j < n; ++j)
        for (size_t i2 = i; i2 <= j; ++i2)
          for (size_t j2 = i2; j2 <= j; ++j2)
            CHECK(r.table.window(i2, j2).hi <= r.table.window(i, j).hi);
  }
}

TEST_CASE("bounds are exactly homogeneous") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  FiniteVector x = fixtures::vec({1, -1, 2});
  NormResult base = norm(cfg, sp, x, kWidth);

  NormResult scaled = norm(cfg, sp, x.scaled(Rat(3, 2)), kWidth * Rat(3, 2));
  CHECK(scaled.enclosure.lo == base.enclosure.lo * Rat(3, 2));
  CHECK(scaled.enclosure.hi == base.enclosure.hi * Rat(3, 2));

  NormResult neg = norm(cfg, sp, x.scaled(Rat(-2)), kWidth * 2);
  CHECK(neg.enclosure.lo == base.enclosure.lo * 2);
  CHECK(neg.enclosure.hi == base.enclosure.hi * 2);
}

TEST_CASE("class-wise sign flips leave the enclosure unchanged") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::sup2_space();
  for (unsigned long long s = 1; s <= 15; ++s) {
    FiniteVector x = random_vector(s, 5, 8);
    if (x.empty()) continue;
    FiniteVector flipped;
    for (const auto& [k, v] : x.entries)
      flipped.set(k, sp.partition.class_of(k) == 2 ? Rat(-v) : v);
    NormResult a = norm(cfg, sp, x, Rat(1, 100000));
    NormResult b = norm(cfg, sp, flipped, Rat(1, 100000));
    CHECK(a.enclosure.lo == b.enclosure.lo);
    CHECK(a.enclosure.hi == b.enclosure.hi);
  }
}

TEST_CASE("triangle inequality within the rounding budget") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  Rat w(1, 1000000);
  for (unsigned long long s = 1; s <= 15; ++s) {
    FiniteVector x = random_vector(s, 4, 6);
    FiniteVector y = random_vector(s + 100, 4, 6);
    FiniteVector sum = x.plus(y);
    if (x.empty() || y.empty() || sum.empty()) continue;
    Rat hx = norm(cfg, sp, x, w).enclosure.hi;
    Rat hy = norm(cfg, sp, y, w).enclosure.hi;
    Rat hs = norm(cfg, sp, sum, w).enclosure.hi;
    CHECK(hs <= hx + hy + w);
  }
}

TEST_CASE("per-sweep widths contract at the predicted rate") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  const Rat rho2(85, 256);
  for (unsigned long long s = 1; s <= 10; ++s) {
    FiniteVector x = random_vector(s, 8, 10);
    if (x.empty()) continue;
    EngineOptions opts;
    opts.trace = true;
    opts.max_sweeps = 4;
    opts.sqrt_bits = 128;
    NormResult r = norm(cfg, sp, x, Rat(Int(1), Int(1) << 200), opts);
    Rat bound = x.l1();
    for (size_t k = 0; k < r.table.root_widths.size(); ++k) {
      const Rat& width = r.table.root_widths[k];
      // width <= rho^{k+1} l1, compared via squares to avoid the root
      CHECK(width * width <=
            rat_pow_int(rho2, static_cast<unsigned long>(k + 1)) * bound *
                bound);
    }
    // an early stop only happens when the bounds have already collapsed
    if (r.table.width_reached) {
      CHECK(r.table.root_widths.back() == 0);
    } else {
      CHECK(r.table.root_widths.size() == 4);
    }
  }
}

TEST_CASE("lower witness search is anytime and monotone") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();

  auto [v1, t1] = norm_lower_witness(cfg, sp, FiniteVector::unit(1), 0);
  CHECK(v1 == 1);
  CHECK(t1->kind == FunctionalTree::Kind::Ground);

  auto [v2, t2] = norm_lower_witness(cfg, sp, fixtures::vec({1, -1}), 2);
  CHECK(v2 >= 1);
  CHECK_NOTHROW(validate_tree(t2, cfg, sp));

  for (unsigned long long s = 1; s <= 25; ++s) {
    FiniteVector x = random_vector(s, 5, 8);
    if (x.empty()) continue;
    Rat prev(-1);
    for (int budget : {0, 1, 2, 3}) {
      auto [v, t] = norm_lower_witness(cfg, sp, x, budget);
      CHECK(v >= prev);
      CHECK(evaluate(t, cfg, sp, x) == v);
      prev = v;
    }
  }
}

TEST_CASE("block lower bound with an explicit weighted witness") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  NormResult r = norm(cfg, sp, fixtures::vec({1, 1, 1, 1}), kWidth);
  CHECK(r.enclosure.lo >= 2);  // n_1 / m_1 = 2

  // the explicit witness: weight-1 node over the four unit functionals
  std::vector<TreePtr> kids;
  for (long k = 1; k <= 4; ++k) {
    GroundFunctional g;
    g.a = k;
    g.b = k;
    g.coeffs = {Rat(1)};
    kids.push_back(FunctionalTree::make_ground(g));
  }
  TreePtr wit = FunctionalTree::make_convex(
      {{1, Rat(1), FunctionalTree::make_weighted(1, kids)}});
  CHECK_NOTHROW(validate_tree(wit, cfg, sp));
  CHECK(evaluate(wit, cfg, sp, fixtures::vec({1, 1, 1, 1})) == 2);
}

TEST_CASE("unreachable width is flagged, not silently widened") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  EngineOptions opts;
  opts.max_sweeps = 1;
  NormResult r =
      norm(cfg, sp, fixtures::vec({1, -1, 1, -1, 1}), Rat(Int(1), Int(1) << 90),
           opts);
  CHECK(!r.table.width_reached);
  CHECK(r.enclosure.lo <= r.enclosure.hi);
}

TEST_CASE("extended mode requires a tail rule") {
  auto cfg = fixtures::cfg_a();  // tail_rule none
  auto sp = fixtures::line_space();
  EngineOptions ext;
  ext.extended = true;
  CHECK_THROWS_AS(norm(cfg, sp, FiniteVector::unit(1), Rat(1, 10), ext),
                  ValidationError);

  // with the doubling rule on the same weights, the tail makes the upper
  // bound exact for alternating vectors: sqrt(85/64 + 4/768) = 2/sqrt(3)
  cfg.tail = TailRule::Doubling;
  NormResult r = norm(cfg, sp, fixtures::vec({1, -1}), Rat(1, 1000000), ext);
  CHECK(r.enclosure.hi * r.enclosure.hi >= Rat(4, 3));
  CHECK(r.enclosure.hi * r.enclosure.hi <= Rat(4, 3) + Rat(1, 1000));
  // the infinite-space value exceeds every truncated witness, so the
  // requested width is honestly unreachable here
  CHECK(!r.table.width_reached);
  CHECK(r.enclosure.lo * r.enclosure.lo <= Rat(85, 64));
}

TEST_CASE("extended mode stays sound and close to truncated") {
  auto cfg = fixtures::cfg_q();
  auto sp = fixtures::line_space();
  FiniteVector x = fixtures::vec({1, -1, 2, -2});
  EngineOptions ext;
  ext.extended = true;
  NormResult t = norm(cfg, sp, x, kWidth);
  NormResult e = norm(cfg, sp, x, kWidth, ext);
  // the extended upper bound dominates the truncated one
  CHECK(e.enclosure.hi >= t.enclosure.hi);
  // lower bounds are witnessed in both modes
  CHECK(e.enclosure.lo >= t.enclosure.lo - kWidth);
  CHECK_NOTHROW(validate_tree(e.witness, cfg, sp));
}
