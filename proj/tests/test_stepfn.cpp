#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qtakagi/qtakagi.hpp"

using namespace qtakagi;

namespace {

std::vector<Rational> rats(std::initializer_list<Rational> vs) { return vs; }

}  // namespace

TEST_CASE("digit selectors") {
  SystemConfig swap(2, {1, 0});
  CHECK(digit_selector(swap, 0).values() ==
        rats({Rational(1), Rational(0), Rational(0), Rational(1)}));
  CHECK(digit_selector(swap, 1).values() ==
        rats({Rational(0), Rational(1), Rational(1), Rational(0)}));

  // q=3 cycle: selector 0 picks the cells whose twisted digit is 0
  SystemConfig cycle(3, {1, 2, 0});
  std::vector<Rational> sel0(9, Rational(0));
  sel0[0] = 1;  // (0,0): id
  sel0[5] = 1;  // (1,2): sigma(2) = 0
  sel0[7] = 1;  // (2,1): sigma^2(1) = 0
  CHECK(digit_selector(cycle, 0).values() == sel0);

  for (const ConfigCase& cc : standard_configs()) {
    StepFunction sum = StepFunction::constant(cc.cfg.q(), Rational(0));
    for (int l = 0; l < cc.cfg.q(); ++l) sum = sum + digit_selector(cc.cfg, l);
    CHECK(step_equal(sum, StepFunction::constant(cc.cfg.q(), Rational(1))));
  }
}

TEST_CASE("selector differences") {
  SystemConfig id2(2, {0, 1});
  WeightVec half({make_rational(1, 2), make_rational(1, 2)});
  CHECK(selector_diff(id2, half, 0).values() ==
        rats({Rational(2), Rational(-2), Rational(2), Rational(-2)}));

  SystemConfig swap(2, {1, 0});
  WeightVec r({make_rational(1, 4), make_rational(3, 4)});
  CHECK(selector_diff(swap, r, 0).values() ==
        rats({Rational(4), make_rational(-4, 3), make_rational(-4, 3), Rational(4)}));

  // mean zero under every twisted measure, whatever the leading weights
  DeterministicRng rng(23);
  for (const ConfigCase& cc : standard_configs())
    for (int t = 0; t < 3; ++t) {
      WeightVec d = random_weight_vec(rng, cc.cfg.q());
      WeightVec rr = random_weight_vec(rng, cc.cfg.q());
      MeasureContext mc(cc.cfg, d, rr);
      for (int l = 0; l <= cc.cfg.q() - 2; ++l)
        CHECK(expectation_total(mc, selector_diff(cc.cfg, rr, l)) == 0);
    }
}

TEST_CASE("composition with the shift") {
  // an indicator pulled back one level covers both translated cells
  StepFunction ind = StepFunction::indicator(QAdicInterval(2, 1, 1));
  CHECK(compose_shift(ind, 1).values() ==
        rats({Rational(0), Rational(1), Rational(0), Rational(1)}));

  StepFunction c = StepFunction::constant(2, make_rational(7, 3));
  CHECK(step_equal(compose_shift(c, 4), c));

  SystemConfig id2(2, {0, 1});
  WeightVec half({make_rational(1, 2), make_rational(1, 2)});
  StepFunction d0 = compose_shift(selector_diff(id2, half, 0), 1);
  CHECK(d0.level() == 3);
  CHECK(d0.values() == rats({Rational(2), Rational(-2), Rational(2), Rational(-2),
                             Rational(2), Rational(-2), Rational(2), Rational(-2)}));

  // value_at after releveling never changes
  DeterministicRng rng(29);
  StepFunction f = random_step_function(rng, 3, 2);
  for (const QAdicPoint& x : grid_points(3, 3))
    CHECK(f.releveled(4).value_at(x) == f.value_at(x));
}

TEST_CASE("step algebra") {
  StepFunction a = StepFunction::indicator(QAdicInterval(2, 2, 1));
  StepFunction b = StepFunction::indicator(QAdicInterval(2, 1, 0));
  // intersection of nested cells is the finer cell
  CHECK(step_equal(step_multiply(a, b), a));
  // disjoint cells multiply to zero
  StepFunction c = StepFunction::indicator(QAdicInterval(2, 1, 1));
  CHECK(step_equal(step_multiply(a, c), StepFunction::constant(2, Rational(0))));

  SystemConfig id2(2, {0, 1});
  WeightVec half({make_rational(1, 2), make_rational(1, 2)});
  StepFunction sq = step_multiply(selector_diff(id2, half, 0), selector_diff(id2, half, 0));
  CHECK(step_equal(sq, StepFunction::constant(2, Rational(4))));

  CHECK_THROWS_AS(StepFunction(2, 2, std::vector<Rational>(3, Rational(0))), ConfigError);
  CHECK_THROWS_AS(StepFunction(2, 21, std::vector<Rational>{}), LevelCapExceeded);
  CHECK_THROWS_AS(compose_shift(StepFunction::constant(2, Rational(1)), 21),
                  LevelCapExceeded);
}

TEST_CASE("one-step density factor") {
  SystemConfig swap(2, {1, 0});
  WeightVec r({make_rational(1, 4), make_rational(3, 4)});
  WeightVec s({make_rational(1, 3), make_rational(2, 3)});

  CHECK(step_equal(rn_step(swap, r, r), StepFunction::constant(2, Rational(1))));
  CHECK(rn_step(swap, s, r).values() ==
        rats({make_rational(4, 3), make_rational(8, 9), make_rational(8, 9),
              make_rational(4, 3)}));

  // expansion over the selectors
  StepFunction expansion = StepFunction::constant(2, Rational(0));
  for (int l = 0; l < 2; ++l)
    expansion = expansion + step_scale(digit_selector(swap, l), s[l] / r[l]);
  CHECK(step_equal(expansion, rn_step(swap, s, r)));
}

TEST_CASE("density on the level-k cells") {
  SystemConfig swap(2, {1, 0});
  WeightVec d({make_rational(1, 3), make_rational(2, 3)});
  WeightVec r({make_rational(1, 4), make_rational(3, 4)});
  WeightVec e({make_rational(1, 2), make_rational(1, 2)});
  WeightVec s({make_rational(1, 3), make_rational(2, 3)});

  CHECK(step_equal(rn_derivative(swap, e, s, d, r, 0), StepFunction::constant(2, Rational(1))));
  StepFunction z1 = rn_derivative(swap, e, s, d, r, 1);
  CHECK(z1.values() == rats({e[0] / d[0], e[1] / d[1]}));

  StepFunction w = rn_step(swap, s, r);
  StepFunction z3 = rn_derivative(swap, e, s, d, r, 3);
  StepFunction product = step_multiply(step_multiply(compose_shift(w, 0), compose_shift(w, 1)), z1);
  CHECK(step_equal(z3, product));

  // product formula across random weights, all levels up to 4
  DeterministicRng rng(31);
  for (const ConfigCase& cc : standard_configs()) {
    int q = cc.cfg.q();
    WeightVec re = random_weight_vec(rng, q);
    WeightVec rs = random_weight_vec(rng, q);
    WeightVec rd = random_weight_vec(rng, q);
    WeightVec rr = random_weight_vec(rng, q);
    StepFunction rw = rn_step(cc.cfg, rs, rr);
    StepFunction rz1 = rn_derivative(cc.cfg, re, rs, rd, rr, 1);
    StepFunction acc = StepFunction::constant(q, Rational(1));
    for (int k = 1; k <= 4; ++k) {
      acc = step_multiply(acc, compose_shift(rw, k - 1));
      CHECK(step_equal(rn_derivative(cc.cfg, re, rs, rd, rr, k + 1),
                       step_multiply(acc, rz1)));
    }
    // integrating the density up to a point of level <= k recovers the
    // target distribution exactly
    MeasureContext bottom(cc.cfg, rd, rr);
    MeasureContext top(cc.cfg, re, rs);
    for (const QAdicPoint& x : grid_points(q, 2))
      for (int k = x.level(); k <= 5; ++k)
        CHECK(integrate(bottom, rn_derivative(cc.cfg, re, rs, rd, rr, k), x) ==
              cdf(top, x));
  }
}
