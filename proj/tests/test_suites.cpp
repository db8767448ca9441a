#include <catch2/catch_amalgamated.hpp>

#include "qtakagi/qtakagi.hpp"

using namespace qtakagi;

TEST_CASE("every named suite passes at small scale") {
  SuiteScale scale = SuiteScale::from_trials(2);
  for (const std::string& name : verify_suite_names())
    for (const SuiteReport& rep : run_named_suite(name, scale, 3, false)) {
      INFO(name << " / " << rep.name << ": " << rep.first_counterexample);
      CHECK(rep.failures == 0);
      CHECK(rep.checks > 0);
    }
}

TEST_CASE("suite runs are deterministic in the seed") {
  SuiteScale scale = SuiteScale::from_trials(2);
  for (const std::string name : {"theorem", "takagi-equiv"}) {
    auto a = run_named_suite(name, scale, 99, false);
    auto b = run_named_suite(name, scale, 99, false);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].checks == b[i].checks);
      CHECK(a[i].failures == b[i].failures);
      CHECK(a[i].first_counterexample == b[i].first_counterexample);
    }
  }
}

TEST_CASE("corrupted sigma powers are caught by the derivative suites") {
  SuiteScale scale = SuiteScale::from_trials(2);
  auto reports = run_named_suite("theorem", scale, 7, true);
  long long failures = 0;
  std::string example;
  for (const SuiteReport& rep : reports) {
    failures += rep.failures;
    if (example.empty()) example = rep.first_counterexample;
  }
  CHECK(failures > 0);
  CHECK(!example.empty());
}

TEST_CASE("equivalence records feed the bound suite") {
  SuiteScale scale = SuiteScale::from_trials(1);
  std::vector<ConfigCase> cfgs = standard_configs();
  EquivalenceResult eq = run_takagi_equivalence(cfgs, scale, 5);
  CHECK(eq.equality.failures == 0);
  CHECK(eq.stabilization.failures == 0);
  CHECK(!eq.records.empty());
  SuiteReport bounds = run_bounds(cfgs, scale, 5, &eq.records);
  INFO(bounds.first_counterexample);
  CHECK(bounds.failures == 0);
  CHECK(bounds.checks > static_cast<long long>(eq.records.size()));
}

TEST_CASE("random weights respect the denominator cap") {
  DeterministicRng rng(17);
  for (int q : {2, 3}) {
    for (int t = 0; t < 200; ++t) {
      WeightVec w = random_weight_vec(rng, q, 64);
      Rational sum = 0;
      for (int i = 0; i < q; ++i) {
        CHECK(w[i].get_den() <= 64);
        CHECK(sgn(w[i]) > 0);
        sum += w[i];
      }
      CHECK(sum == 1);
    }
  }
  // identical seeds reproduce identical draws
  DeterministicRng a(123), b(123);
  for (int t = 0; t < 20; ++t) CHECK(random_weight_vec(a, 3) == random_weight_vec(b, 3));
}
