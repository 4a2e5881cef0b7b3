#include "doctest.h"
#include "fixtures.hpp"
#include "mtn/engine.hpp"
#include "mtn/enumerate.hpp"

using namespace mtn;

TEST_CASE("depth zero streams exactly the ground functionals") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  EnumOptions opts;
  opts.depth = 0;
  std::vector<TreePtr> out;
  enumerate_functionals(cfg, sp, {1}, opts,
                        [&](const TreePtr& t) { out.push_back(t); });
  CHECK(out.size() == 2);  // one interval, F = {+1, -1}
  for (const auto& t : out) {
    CHECK(t->kind == FunctionalTree::Kind::Ground);
    CHECK_NOTHROW(validate_tree(t, cfg, sp));
  }
}

TEST_CASE("depth one includes paired singletons under a convex root") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  EnumOptions opts;
  opts.depth = 1;
  opts.lambda_max_den = 1;  // grid {1}
  opts.cap = 2000000;
  bool found = false;
  size_t streamed = 0;
  enumerate_functionals(cfg, sp, {1, 2}, opts, [&](const TreePtr& t) {
    ++streamed;
    if (t->kind != FunctionalTree::Kind::Convex || t->terms.size() != 1)
      return;
    const auto& term = t->terms[0];
    if (term.index != 1 || term.lam != 1) return;
    const auto& w = term.child;
    if (w->children.size() == 2 &&
        w->children[0]->kind == FunctionalTree::Kind::Ground &&
        w->children[0]->ground.a == 1 && w->children[0]->ground.b == 1 &&
        w->children[1]->ground.a == 2 && w->children[1]->ground.b == 2)
      found = true;
  });
  CHECK(found);
  CHECK(streamed > 6);
}

TEST_CASE("the stream refuses oversized requests with an estimate") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  EnumOptions opts;
  opts.depth = 3;
  opts.lambda_max_den = 8;
  opts.cap = 1000;
  CHECK_THROWS_AS(
      enumerate_functionals(cfg, sp, {1, 2, 3, 4, 5}, opts,
                            [](const TreePtr&) {}),
      CapExceeded);
  try {
    enumerate_functionals(cfg, sp, {1, 2, 3, 4, 5}, opts,
                          [](const TreePtr&) {});
  } catch (const CapExceeded& e) {
    CHECK(e.estimate > 1000);
  }
}

TEST_CASE("every streamed tree is valid and dominated by the class max") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  FiniteVector x = fixtures::vec({1, -1});
  EnumOptions opts;
  opts.depth = 1;
  opts.lambda_max_den = 1;
  opts.cap = 100000;
  auto [best, wit] = enumerate_max(cfg, sp, x, opts);
  Rat streamed_best(0);
  size_t streamed = 0;
  enumerate_functionals(cfg, sp, {1, 2}, opts, [&](const TreePtr& t) {
    ++streamed;
    CHECK_NOTHROW(validate_tree(t, cfg, sp));
    streamed_best = std::max(streamed_best, evaluate(t, cfg, sp, x));
  });
  CHECK(streamed > 0);
  CHECK(streamed_best == best);
  CHECK(evaluate(wit, cfg, sp, x) == best);
  CHECK_NOTHROW(validate_tree(wit, cfg, sp));
}

TEST_CASE("class max witnesses evaluate to the reported value") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  EnumOptions opts;
  opts.depth = 2;
  opts.lambda_max_den = 4;
  for (unsigned long long s = 1; s <= 15; ++s) {
    FiniteVector x = random_vector(s, 4, 5);
    if (x.empty()) continue;
    auto [v, wit] = enumerate_max(cfg, sp, x, opts);
    CHECK(evaluate(wit, cfg, sp, x) == v);
    CHECK_NOTHROW(validate_tree(wit, cfg, sp));
    CHECK(v >= ground_norm(sp, x));
  }
}

TEST_CASE("grid maxima grow with depth and stay under the engine bound") {
  auto cfg = fixtures::cfg_a();
  auto sp = fixtures::line_space();
  for (unsigned long long s = 1; s <= 10; ++s) {
    FiniteVector x = random_vector(s, 5, 6);
    if (x.empty()) continue;
    EnumOptions o1{1, 4, 200000};
    EnumOptions o2{2, 4, 200000};
    auto [v1, w1] = enumerate_max(cfg, sp, x, o1);
    auto [v2, w2] = enumerate_max(cfg, sp, x, o2);
    CHECK(v2 >= v1);
    Rat hi = norm(cfg, sp, x, Rat(1, 1000000)).enclosure.hi;
    CHECK(v2 <= hi);
  }
}
