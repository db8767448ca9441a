#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qtakagi/qtakagi.hpp"

using namespace qtakagi;

namespace {

MeasureContext gray_context() {
  SystemConfig cfg(2, {1, 0});
  return MeasureContext(cfg, WeightVec({make_rational(1, 3), make_rational(2, 3)}),
                        WeightVec({make_rational(1, 4), make_rational(3, 4)}));
}

MeasureContext uniform2_context() {
  SystemConfig cfg(2, {0, 1});
  return MeasureContext(cfg, WeightVec::uniform(2), WeightVec::uniform(2));
}

}  // namespace

TEST_CASE("cell masses match the level recursion") {
  MeasureContext gray = gray_context();
  CHECK(interval_measure(gray, QAdicInterval(2, 0, 0)) == 1);
  CHECK(interval_measure(gray, QAdicInterval::from_digits(2, {1, 0})) ==
        make_rational(1, 2));
  CHECK(interval_measure(gray, QAdicInterval::from_digits(2, {1, 1, 0})) ==
        make_rational(1, 8));

  DeterministicRng rng(11);
  for (const ConfigCase& cc : standard_configs()) {
    int q = cc.cfg.q();
    WeightVec d = random_weight_vec(rng, q);
    WeightVec r = random_weight_vec(rng, q);
    MeasureContext mc(cc.cfg, d, r);
    for (int k = 0; k <= 5; ++k) {
      std::vector<Rational> table = mass_table(mc, k);
      for (std::int64_t n = 0; n < checked_pow_i64(q, k); ++n) {
        Rational expected = oracles::recursive_mass(q, cc.cfg.sigma(), d.components(),
                                                    r.components(), k, n);
        CHECK(interval_measure(mc, QAdicInterval(q, k, n)) == expected);
        CHECK(table[static_cast<std::size_t>(n)] == expected);
      }
    }
  }
}

TEST_CASE("distribution function") {
  MeasureContext gray = gray_context();
  CHECK(cdf(gray, QAdicPoint(2, 1, 0)) == 1);
  CHECK(cdf(gray, QAdicPoint(2, 0, 0)) == 0);
  CHECK(cdf(gray, QAdicPoint(2, 3, 2)) == make_rational(5, 6));

  // uniform weights flatten the distribution regardless of the permutation
  for (const ConfigCase& cc : standard_configs()) {
    MeasureContext mc(cc.cfg, WeightVec::uniform(cc.cfg.q()),
                      WeightVec::uniform(cc.cfg.q()));
    for (const QAdicPoint& x : grid_points(cc.cfg.q(), 4))
      CHECK(cdf(mc, x) == x.value());
  }

  // brute enumeration of all level-K cells agrees with the greedy form
  DeterministicRng rng(13);
  for (const ConfigCase& cc : standard_configs()) {
    int q = cc.cfg.q();
    WeightVec d = random_weight_vec(rng, q);
    WeightVec r = random_weight_vec(rng, q);
    MeasureContext mc(cc.cfg, d, r);
    for (const QAdicPoint& x : grid_points(q, 4))
      CHECK(cdf(mc, x) ==
            oracles::brute_cdf(q, cc.cfg.sigma(), d.components(), r.components(), x));
  }
}

TEST_CASE("integration over [0,x]") {
  MeasureContext gray = gray_context();
  StepFunction phi0 = digit_selector(gray.cfg, 0);

  for (const QAdicPoint& x : grid_points(2, 3))
    CHECK(integrate(gray, StepFunction::constant(2, Rational(1)), x) == cdf(gray, x));

  CHECK(integrate(gray, phi0, QAdicPoint(2, 1, 0)) == make_rational(1, 4));
  CHECK(integrate(gray, phi0, QAdicPoint(2, 1, 1)) == make_rational(1, 12));

  // splitting a cell of the integrand exactly: x finer than the function
  CHECK(integrate(gray, phi0, QAdicPoint(2, 1, 3)) ==
        interval_measure(gray, QAdicInterval::from_digits(2, {0, 0, 0})));
}

TEST_CASE("expectation on cells") {
  MeasureContext gray = gray_context();
  MeasureContext flat = uniform2_context();
  StepFunction phi0 = digit_selector(gray.cfg, 0);

  CHECK(expectation(gray, StepFunction::constant(2, Rational(1)),
                    QAdicInterval(2, 0, 0)) == 1);
  CHECK(expectation(gray, phi0, QAdicInterval(2, 1, 1)) == make_rational(1, 6));
  CHECK(expectation(flat, selector_diff(flat.cfg, flat.r, 0), QAdicInterval(2, 1, 0)) ==
        0);
  CHECK(expectation_total(gray, phi0) == make_rational(1, 4));
}

TEST_CASE("conditional expectation") {
  MeasureContext gray = gray_context();
  StepFunction phi0 = digit_selector(gray.cfg, 0);

  StepFunction ce = cond_expect(gray, phi0, 1);
  CHECK(ce.level() == 1);
  CHECK(ce[0] == make_rational(1, 4));
  CHECK(ce[1] == make_rational(1, 4));

  StepFunction diff0 = selector_diff(gray.cfg, gray.r, 0);
  StepFunction cd = cond_expect(gray, diff0, 1);
  CHECK(cd[0] == 0);
  CHECK(cd[1] == 0);

  // measurable functions are fixed points (up to releveling)
  DeterministicRng rng(17);
  StepFunction f = random_step_function(rng, 2, 2);
  CHECK(step_equal(cond_expect(gray, f, 3), f));

  // defining adjunction on every generating cell
  StepFunction g = random_step_function(rng, 2, 3);
  for (int k = 0; k <= 2; ++k) {
    StepFunction cg = cond_expect(gray, g, k);
    for (std::int64_t n = 0; n < checked_pow_i64(2, k); ++n)
      CHECK(expectation(gray, cg, QAdicInterval(2, k, n)) ==
            expectation(gray, g, QAdicInterval(2, k, n)));
  }
}

TEST_CASE("lebesgue cell integrals") {
  SystemConfig cfg(2, {0, 1});
  CHECK(lebesgue_cell_integral(cfg, 0, QAdicPoint(2, 3, 2)) == make_rational(1, 2));
  CHECK(lebesgue_cell_integral(cfg, 1, QAdicPoint(2, 3, 2)) == make_rational(1, 4));
  CHECK(lebesgue_cell_integral(cfg, 1, QAdicPoint(2, 1, 2)) == 0);
  CHECK(lebesgue_cell_integral(cfg, 0, QAdicPoint(2, 1, 0)) == make_rational(1, 2));
}

TEST_CASE("measure level caps") {
  MeasureContext flat = uniform2_context();
  CHECK_THROWS_AS(mass_table(flat, 21), LevelCapExceeded);
  CHECK_THROWS_AS(cond_expect(flat, StepFunction::constant(2, Rational(1)), 21),
                  LevelCapExceeded);
}

TEST_CASE("factorization through the twist of the prefix") {
  DeterministicRng rng(19);
  for (const ConfigCase& cc : standard_configs()) {
    int q = cc.cfg.q();
    WeightVec d = random_weight_vec(rng, q);
    WeightVec r = random_weight_vec(rng, q);
    MeasureContext mc(cc.cfg, d, r);
    for (int trial = 0; trial < 25; ++trial) {
      int i = rng.uniform_int(1, 4);
      int k = rng.uniform_int(1, 5 - i);
      std::int64_t b = rng.uniform_int(0, static_cast<int>(checked_pow_i64(q, i)) - 1);
      std::int64_t a = rng.uniform_int(0, static_cast<int>(checked_pow_i64(q, k)) - 1);
      MeasureContext tail_mc(cc.cfg, permuted_weights(cc.cfg, r, b % q), r);
      CHECK(interval_measure(mc, QAdicInterval(q, i + k, b * checked_pow_i64(q, k) + a)) ==
            interval_measure(mc, QAdicInterval(q, i, b)) *
                interval_measure(tail_mc, QAdicInterval(q, k, a)));
    }
  }
}
