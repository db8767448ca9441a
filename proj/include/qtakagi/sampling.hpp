#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qtakagi/core.hpp"
#include "qtakagi/stepfn.hpp"

namespace qtakagi {

// Seeded generator with explicit sampling arithmetic, so the same seed yields
// the same instances on every platform and standard library.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

// A strictly positive rational probability vector with a common denominator
// at most max_denominator: a random composition of the denominator into q
// positive parts.
inline WeightVec random_weight_vec(DeterministicRng& rng, int q,
                                   int max_denominator = 64) {
  int den = rng.uniform_int(q, max_denominator);
  std::vector<int> cuts;
  while (static_cast<int>(cuts.size()) < q - 1) {
    int c = rng.uniform_int(1, den - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> parts;
  parts.reserve(static_cast<std::size_t>(q));
  int prev = 0;
  for (int c : cuts) {
    parts.push_back(make_rational(c - prev, den));
    prev = c;
  }
  parts.push_back(make_rational(den - prev, den));
  return WeightVec(std::move(parts));
}

// Random step function with small rational values, for substitution and
// conditional-expectation properties.
inline StepFunction random_step_function(DeterministicRng& rng, int q, int level) {
  std::vector<Rational> v(static_cast<std::size_t>(table_size(q, level)));
  for (Rational& c : v)
    c = make_rational(rng.uniform_int(-8, 8), rng.uniform_int(1, 8));
  return StepFunction(q, level, std::move(v));
}

struct ConfigCase {
  SystemConfig cfg;
  std::string label;
};

// The four bases exercised everywhere: both orders at q = 2 and q = 3.
inline std::vector<ConfigCase> standard_configs(bool corrupt_sigma_powers = false) {
  std::vector<ConfigCase> out;
  out.push_back({SystemConfig(2, {0, 1}), "q=2 sigma=id"});
  out.push_back({SystemConfig(2, {1, 0}), "q=2 sigma=swap"});
  out.push_back({SystemConfig(3, {0, 1, 2}), "q=3 sigma=id"});
  out.push_back({SystemConfig(3, {1, 2, 0}), "q=3 sigma=cycle"});
  if (corrupt_sigma_powers)
    for (ConfigCase& c : out) c.cfg = c.cfg.corrupted_powers_for_testing();
  return out;
}

// Every multi-index over q-1 entries with the given total order.
inline std::vector<MultiIndex> multi_indices_with_total(int q, int total) {
  std::vector<MultiIndex> out;
  std::vector<int> current(static_cast<std::size_t>(q - 1), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == q - 2) {
      current[static_cast<std::size_t>(pos)] = remaining;
      out.emplace_back(q, current);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      current[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

inline std::vector<MultiIndex> multi_indices_up_to(int q, int max_total) {
  std::vector<MultiIndex> out;
  for (int t = 1; t <= max_total; ++t)
    for (MultiIndex& u : multi_indices_with_total(q, t)) out.push_back(std::move(u));
  return out;
}

// All grid points m/q^level, m = 0..q^level.
inline std::vector<QAdicPoint> grid_points(int q, int level) {
  std::int64_t cells = table_size(q, level);
  std::vector<QAdicPoint> out;
  out.reserve(static_cast<std::size_t>(cells + 1));
  for (std::int64_t m = 0; m <= cells; ++m) out.emplace_back(q, m, level);
  return out;
}

}  // namespace qtakagi
