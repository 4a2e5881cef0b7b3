#include <functional>

#include "doctest.h"
#include "fixtures.hpp"
#include "mtn/functionals.hpp"

using namespace mtn;

namespace {

GroundFunctional gf(long a, long b, std::vector<Rat> coeffs) {
  GroundFunctional g;
  g.a = a;
  g.b = b;
  g.coeffs = std::move(coeffs);
  return g;
}

TreePtr unit_leaf(long k, Rat sign = Rat(1)) {
  return FunctionalTree::make_ground(gf(k, k, {sign}));
}

size_t min_leaf_depth(const TreePtr& f, size_t depth = 0) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground:
      return depth;
    case FunctionalTree::Kind::Weighted: {
      size_t best = SIZE_MAX;
      for (const auto& c : f->children)
        best = std::min(best, min_leaf_depth(c, depth + 1));
      return best;
    }
    default: {
      size_t best = SIZE_MAX;
      for (const auto& t : f->terms)
        best = std::min(best, min_leaf_depth(t.child, depth + 1));
      return best;
    }
  }
}

bool every_path_floored(const TreePtr& f, int j0, bool seen = false) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground:
      return seen;
    case FunctionalTree::Kind::Weighted: {
      bool s = seen || f->weight_index >= j0;
      for (const auto& c : f->children)
        if (!every_path_floored(c, j0, s)) return false;
      return true;
    }
    default:
      for (const auto& t : f->terms)
        if (!every_path_floored(t.child, j0, seen)) return false;
      return true;
  }
}

}  // namespace

TEST_CASE("evaluation of the three node kinds") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  FiniteVector x = fixtures::vec({1, 1, 1, 1});

  std::vector<TreePtr> leaves = {unit_leaf(1), unit_leaf(2), unit_leaf(3),
                                 unit_leaf(4)};
  TreePtr w = FunctionalTree::make_weighted(1, leaves);
  CHECK(evaluate(w, cfg, sp, x) == 2);  // (1/2) * 4

  TreePtr c = FunctionalTree::make_convex({{1, Rat(1), w}});
  CHECK_NOTHROW(validate_tree(c, cfg, sp));
  CHECK(evaluate(c, cfg, sp, x) == 2);

  TreePtr g = FunctionalTree::make_ground(gf(1, 4, {Rat(1)}));
  FiniteVector alt = fixtures::vec({1, -1, 1, -1});
  CHECK(evaluate(g, cfg, sp, alt) == 0);  // telescoping class sum

  CHECK(evaluate(FunctionalTree::zero(), cfg, sp, x) == 0);
}

TEST_CASE("validation pinpoints the offending node") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();

  // overlapping children of a weighted node
  TreePtr bad1 = FunctionalTree::make_weighted(
      1, {FunctionalTree::make_ground(gf(1, 3, {Rat(1)})),
          FunctionalTree::make_ground(gf(2, 4, {Rat(1)}))});
  CHECK_THROWS_WITH_AS(validate_tree(bad1, cfg, sp),
                       doctest::Contains("successive"), TreeError);
  try {
    validate_tree(bad1, cfg, sp);
  } catch (const TreeError& e) {
    CHECK(e.address.str() == "2");
  }

  // too many children for n_1 = 4
  std::vector<TreePtr> many;
  for (long k = 1; k <= 5; ++k) many.push_back(unit_leaf(k));
  CHECK_THROWS_WITH_AS(
      validate_tree(FunctionalTree::make_weighted(1, many), cfg, sp),
      doctest::Contains("n_j"), TreeError);

  // lambda budget exceeded
  TreePtr w1 = FunctionalTree::make_weighted(1, {unit_leaf(1)});
  TreePtr w2 = FunctionalTree::make_weighted(2, {unit_leaf(2)});
  CHECK_THROWS_WITH_AS(
      validate_tree(FunctionalTree::make_convex(
                        {{1, Rat(9, 10), w1}, {2, Rat(1, 2), w2}}),
                    cfg, sp),
      doctest::Contains("squared"), TreeError);

  // convex term whose child weight disagrees with the index
  CHECK_THROWS_WITH_AS(
      validate_tree(FunctionalTree::make_convex({{2, Rat(1), w1}}), cfg, sp),
      doctest::Contains("match"), TreeError);

  // ground coefficients outside the dual ball
  TreePtr fat = FunctionalTree::make_ground(gf(1, 1, {Rat(2)}));
  CHECK_THROWS_AS(validate_tree(fat, cfg, sp), TreeError);

  // weighted child of a weighted node breaks the saturation nesting
  CHECK_THROWS_WITH_AS(
      validate_tree(FunctionalTree::make_weighted(2, {w1}), cfg, sp),
      doctest::Contains("child of a weighted"), TreeError);

  // overlap between convex terms is allowed
  TreePtr wa = FunctionalTree::make_weighted(1, {unit_leaf(1)});
  TreePtr wb = FunctionalTree::make_weighted(2, {unit_leaf(1, Rat(-1))});
  CHECK_NOTHROW(validate_tree(
      FunctionalTree::make_convex({{1, Rat(1, 2), wa}, {2, Rat(1, 2), wb}}),
      cfg, sp));
}

TEST_CASE("weight annotations") {
  TreePtr w3 = FunctionalTree::make_weighted(3, {unit_leaf(1)});
  CHECK(weight_of(w3).indices == std::set<int>{3});
  CHECK(weight_of(w3).weighted());

  TreePtr both = FunctionalTree::make_convex(
      {{1, Rat(1, 2), FunctionalTree::make_weighted(1, {unit_leaf(1)})},
       {2, Rat(1, 2), FunctionalTree::make_weighted(2, {unit_leaf(2)})}});
  CHECK(weight_of(both).indices == std::set<int>{1, 2});
  CHECK(!weight_of(both).weighted());

  TreePtr solo = FunctionalTree::make_convex(
      {{4, Rat(1), FunctionalTree::make_weighted(4, {unit_leaf(1)})}});
  CHECK(weight_of(solo).indices == std::set<int>{4});
  CHECK(weight_of(solo).weighted());

  CHECK_THROWS_AS(weight_of(unit_leaf(1)), ValidationError);
}

TEST_CASE("splitting a convex root is evaluation additive") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  TreePtr f = FunctionalTree::make_convex(
      {{1, Rat(1, 2), FunctionalTree::make_weighted(1, {unit_leaf(1)})},
       {2, Rat(1, 2), FunctionalTree::make_weighted(2, {unit_leaf(2)})},
       {4, Rat(1, 2), FunctionalTree::make_weighted(4, {unit_leaf(3)})}});

  auto [low, high] = split_at(f, 2);
  CHECK(low->terms.size() == 2);
  CHECK(high->terms.size() == 1);
  CHECK(high->terms[0].index == 4);

  auto [none, all] = split_at(f, 0);
  CHECK(none->terms.empty());
  CHECK(all->terms.size() == 3);

  for (unsigned long long s = 1; s <= 20; ++s) {
    FiniteVector x = random_vector(s);
    CHECK(evaluate(low, cfg, sp, x) + evaluate(high, cfg, sp, x) ==
          evaluate(f, cfg, sp, x));
  }
  CHECK_THROWS_AS(split_at(unit_leaf(1), 1), ValidationError);
}

TEST_CASE("sup norm equals the coordinate brute force") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();

  CHECK(sup_norm(unit_leaf(1), cfg, sp) == 1);
  TreePtr w = FunctionalTree::make_weighted(3, {unit_leaf(1), unit_leaf(2)});
  CHECK(sup_norm(w, cfg, sp) == Rat(1, 8));

  auto sup2 = fixtures::sup2_space();
  for (unsigned long long s = 1; s <= 40; ++s) {
    const GroundSpace& space = s % 2 ? sp : sup2;
    TreePtr f = random_tree(cfg, space, TreeShape::free(), s);
    auto sb = support_bounds(f, cfg, space);
    REQUIRE(sb.has_value());
    Rat brute(0);
    for (long k = 1; k <= sb->max + 2; ++k)
      brute = std::max(
          brute, rat_abs(evaluate(f, cfg, space, FiniteVector::unit(k))));
    CHECK(sup_norm(f, cfg, space) == brute);
  }
}

TEST_CASE("evaluation is bounded by sup norm times l1") {
  auto cfg = fixtures::cfg_q();
  auto sp = fixtures::line_space();
  for (unsigned long long s = 1; s <= 30; ++s) {
    TreePtr f = random_tree(cfg, sp, TreeShape::free(), s);
    FiniteVector x = random_vector(s + 1000);
    CHECK(rat_abs(evaluate(f, cfg, sp, x)) <= sup_norm(f, cfg, sp) * x.l1());
  }
}

TEST_CASE("evaluation is linear in the vector") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::sup2_space();
  for (unsigned long long s = 1; s <= 25; ++s) {
    TreePtr f = random_tree(cfg, sp, TreeShape::free(), s);
    FiniteVector x = random_vector(s + 50);
    FiniteVector y = random_vector(s + 90);
    CHECK(evaluate(f, cfg, sp, x.plus(y)) ==
          evaluate(f, cfg, sp, x) + evaluate(f, cfg, sp, y));
    CHECK(evaluate(f, cfg, sp, x.scaled(Rat(-7, 3))) ==
          Rat(-7, 3) * evaluate(f, cfg, sp, x));
    // per-coordinate evaluations reproduce the sup-norm coefficients
    auto sb = support_bounds(f, cfg, sp);
    if (sb) {
      Rat mx(0);
      for (long k = sb->min; k <= sb->max; ++k)
        mx = std::max(mx,
                      rat_abs(evaluate(f, cfg, sp, FiniteVector::unit(k))));
      CHECK(mx == sup_norm(f, cfg, sp));
    }
  }
}

TEST_CASE("finite-support splitting bound") {
  auto cfg = fixtures::cfg_q();
  auto sp = fixtures::line_space();

  // |supp y| = 4: sum_{j>1} 4/m_j = 4/60 < 1/2 picks level 1
  FiniteVector y = fixtures::vec({1, -1, 1, -1});
  TreePtr f = FunctionalTree::make_convex(
      {{1, Rat(1), FunctionalTree::make_weighted(1, {unit_leaf(1)})}});
  auto res = check_tail_splitting(cfg, sp, f, y, Rat(1, 2));
  CHECK(res.ok());
  CHECK(res.i0 == 1);
  CHECK(res.tail_bound == Rat(1, 15));
  CHECK(res.value == 0);  // no terms above level 1

  // unsupported without the doubling tail
  auto cfg_none = fixtures::cfg_a();
  CHECK(check_tail_splitting(cfg_none, sp, f, y, Rat(1, 2)).status ==
        CheckStatus::Unsupported);

  // randomized: trees and sup-bounded vectors always satisfy the bound
  for (unsigned long long s = 1; s <= 100; ++s) {
    TreePtr g = random_tree(cfg, sp, TreeShape::free(), s);
    FiniteVector v = random_vector(s + 7, 6, 12, 1, 2);  // sup norm <= 1
    auto r = check_tail_splitting(cfg, sp, g, v, Rat(1, 4));
    CHECK(r.ok());
  }
}

TEST_CASE("small-weight functionals against block averages") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();

  TreePtr f = FunctionalTree::make_convex(
      {{1, Rat(1),
        FunctionalTree::make_weighted(
            1, {FunctionalTree::make_ground(gf(1, 4, {Rat(1)}))})}});
  std::vector<FiniteVector> blocks;
  std::vector<Enclosure> norms;
  for (long t = 0; t < cfg.n_at(2); ++t) {
    blocks.push_back(FiniteVector::unit(9 + t));
    norms.push_back(Enclosure(Rat(1)));
  }
  auto res = check_small_weight_average(cfg, sp, f, blocks, 2, norms);
  CHECK(res.ok());
  CHECK(res.bound == Rat(3, 2));
  CHECK(res.value <= Rat(1, 2));

  // zero evaluation passes trivially
  TreePtr far = FunctionalTree::make_convex(
      {{1, Rat(1), FunctionalTree::make_weighted(1, {unit_leaf(100)})}});
  CHECK(check_small_weight_average(cfg, sp, far, blocks, 2, norms).ok());

  // rejections
  CHECK(check_small_weight_average(cfg, sp, f, blocks, 1, norms).status ==
        CheckStatus::Rejected);  // j must exceed j0
  auto short_blocks = blocks;
  short_blocks.pop_back();
  auto short_norms = norms;
  short_norms.pop_back();
  CHECK(check_small_weight_average(cfg, sp, f, short_blocks, 2, short_norms)
            .status == CheckStatus::Rejected);

  // randomized instances
  auto cfg_q = fixtures::cfg_q();
  for (unsigned long long s = 1; s <= 100; ++s) {
    int j0 = 1 + static_cast<int>(s % 3);
    int j = j0 + 1;
    TreePtr inner = random_tree(cfg_q, sp, TreeShape::free(), s);
    auto sb = support_bounds(inner, cfg_q, sp);
    TreePtr g = FunctionalTree::make_convex(
        {{j0, Rat(1), FunctionalTree::make_weighted(j0, {inner})}});
    std::vector<FiniteVector> bl;
    std::vector<Enclosure> no;
    long base = sb ? sb->max : 0;
    for (long t = 0; t < cfg_q.n_at(j); ++t) {
      bl.push_back(FiniteVector::unit(base + 1 + t));
      no.push_back(Enclosure(Rat(1)));
    }
    CHECK(check_small_weight_average(cfg_q, sp, g, bl, j, no).ok());
  }
}

TEST_CASE("orthogonal combination") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  TreePtr psi = FunctionalTree::make_convex(
      {{1, Rat(1), FunctionalTree::make_weighted(1, {unit_leaf(1)})}});
  TreePtr phi = FunctionalTree::make_convex(
      {{2, Rat(1), FunctionalTree::make_weighted(2, {unit_leaf(2)})}});

  TreePtr f = combine_orthogonal(psi, phi, Rat(7, 10));
  CHECK_NOTHROW(validate_tree(f, cfg, sp));
  Rat sq(0);
  for (const auto& t : f->terms) sq += t.lam * t.lam;
  CHECK(sq == Rat(49, 50));  // 2 * (7/10)^2

  CHECK_THROWS_AS(combine_orthogonal(psi, phi, Rat(3, 4)), ValidationError);
  CHECK_THROWS_AS(combine_orthogonal(psi, psi, Rat(1, 2)), ValidationError);

  for (unsigned long long s = 1; s <= 20; ++s) {
    FiniteVector x = random_vector(s);
    CHECK(evaluate(f, cfg, sp, x) ==
          Rat(7, 10) *
              (evaluate(psi, cfg, sp, x) + evaluate(phi, cfg, sp, x)));
  }
}

TEST_CASE("random trees are valid, reproducible, and meet their shapes") {
  auto cfg = fixtures::cfg_q();
  auto sp = fixtures::sup2_space();

  CHECK(tree_equal(random_tree(cfg, sp, TreeShape::free(), 42),
                   random_tree(cfg, sp, TreeShape::free(), 42)));
  CHECK(!tree_equal(random_tree(cfg, sp, TreeShape::free(), 42),
                    random_tree(cfg, sp, TreeShape::free(), 43)));

  for (unsigned long long s = 1; s <= 50; ++s) {
    TreePtr free_tree = random_tree(cfg, sp, TreeShape::free(), s);
    CHECK_NOTHROW(validate_tree(free_tree, cfg, sp));

    TreePtr deep = random_tree(cfg, sp, TreeShape::min_terminal_depth(2), s);
    CHECK_NOTHROW(validate_tree(deep, cfg, sp));
    CHECK(min_leaf_depth(deep) >= 2);

    TreePtr deep4 = random_tree(cfg, sp, TreeShape::min_terminal_depth(4), s);
    CHECK(min_leaf_depth(deep4) >= 4);

    TreePtr floored = random_tree(cfg, sp, TreeShape::weight_floor(2), s);
    CHECK_NOTHROW(validate_tree(floored, cfg, sp));
    CHECK(every_path_floored(floored, 2));
  }

  CHECK_THROWS_AS(random_tree(cfg, sp, TreeShape::weight_floor(9), 1),
                  ValidationError);
}

TEST_CASE("tree serialization round-trips exactly") {
  auto cfg = fixtures::cfg_q();
  auto sp = fixtures::sup2_space();
  for (unsigned long long s = 1; s <= 30; ++s) {
    TreePtr f = random_tree(cfg, sp, TreeShape::free(), s);
    TreePtr g = tree_from_json(tree_to_json(f));
    CHECK(tree_equal(f, g));
  }
  CHECK_THROWS_AS(tree_from_json("{\"kind\": \"mystery\"}"), ValidationError);
  CHECK_THROWS_AS(tree_from_json("not json"), ValidationError);
}

TEST_CASE("node addresses order by prefix") {
  NodeAddress root;
  NodeAddress c2 = root.child(2);
  NodeAddress c21 = c2.child(1);
  CHECK(root.is_prefix_of(c21));
  CHECK(c2.is_prefix_of(c21));
  CHECK(!c21.is_prefix_of(c2));
  CHECK(!c2.is_prefix_of(root.child(3)));
  CHECK(c21.str() == "2.1");
  CHECK(root.str() == "root");
}
