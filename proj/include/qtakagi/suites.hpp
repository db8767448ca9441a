#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtakagi/core.hpp"
#include "qtakagi/derivs.hpp"
#include "qtakagi/measure.hpp"
#include "qtakagi/sampling.hpp"
#include "qtakagi/stepfn.hpp"
#include "qtakagi/takagi.hpp"

namespace qtakagi {

struct SuiteReport {
  std::string name;
  long long checks = 0;
  long long failures = 0;
  std::string first_counterexample;
  bool ok() const { return failures == 0; }
};

namespace detail {

class Recorder {
 public:
  explicit Recorder(std::string name) { report_.name = std::move(name); }

  template <typename DescribeFn>
  void check(bool ok, DescribeFn&& describe) {
    ++report_.checks;
    if (!ok) {
      if (report_.failures == 0) report_.first_counterexample = describe();
      ++report_.failures;
    }
  }

  SuiteReport take() { return std::move(report_); }

 private:
  SuiteReport report_;
};

inline std::string describe(const WeightVec& w) {
  std::string out = "(";
  for (int i = 0; i < w.q(); ++i) {
    if (i) out += ",";
    out += to_fraction_string(w[i]);
  }
  return out + ")";
}

inline std::string describe(const MultiIndex& u) {
  std::string out = "(";
  for (std::size_t i = 0; i < u.orders().size(); ++i) {
    if (i) out += ",";
    out += std::to_string(u.orders()[i]);
  }
  return out + ")";
}

inline std::string describe(const QAdicPoint& x) { return to_fraction_string(x.value()); }

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return seed * 6364136223846793005ull + tag * 1442695040888963407ull + 1ull;
}

inline std::vector<Rational> prefix_components(const WeightVec& r) {
  return std::vector<Rational>(r.components().begin(), r.components().end() - 1);
}

}  // namespace detail

// Instance sizes for every suite. The defaults keep the command-line runner
// quick; acceptance_scale() pins the sizes the acceptance gate demands.
struct SuiteScale {
  int theorem_i_weights = 5;
  int theorem_i_grid = 3;
  int theorem_ii_weights = 2;
  int theorem_ii_grid = 2;
  int theorem_ii_max_order = 3;
  int chain_weights = 2;
  int chain_grid = 2;
  int anchor_grid = 6;
  int basechange_weights = 5;
  int basechange_grid = 3;
  int equiv_weights = 2;
  int equiv_grid = 2;
  int equiv_kmax = 3;
  int equiv_max_order = 3;
  int zero_weights = 4;
  int zero_beta_max = 4;
  int zero_kmax = 3;
  int rn_weights = 3;
  int rn_kmax = 4;
  int rn_grid = 2;
  int axiom_weights = 3;
  int reduction_weights = 3;
  int reduction_grid = 4;
  int substitution_weights = 2;
  int bounds_tail_grid = 5;

  static SuiteScale from_trials(int trials) {
    SuiteScale s;
    int t = std::max(1, trials);
    s.theorem_i_weights = t;
    s.theorem_ii_weights = std::max(1, t / 2);
    s.chain_weights = std::max(1, t / 2);
    s.basechange_weights = t;
    s.equiv_weights = std::max(1, t / 2);
    s.zero_weights = t;
    s.rn_weights = t;
    s.axiom_weights = t;
    s.reduction_weights = t;
    s.substitution_weights = std::max(1, t / 2);
    return s;
  }

  static SuiteScale acceptance_scale() {
    SuiteScale s;
    s.theorem_i_weights = 20;
    s.theorem_i_grid = 4;
    s.theorem_ii_weights = 5;
    s.theorem_ii_grid = 3;
    s.equiv_weights = 5;
    s.equiv_grid = 4;
    s.equiv_kmax = 5;
    s.zero_weights = 10;
    s.zero_beta_max = 5;
    s.zero_kmax = 4;
    s.rn_weights = 5;
    s.rn_kmax = 4;
    s.rn_grid = 2;
    s.basechange_weights = 20;
    s.basechange_grid = 5;
    s.axiom_weights = 5;
    s.reduction_weights = 5;
    s.bounds_tail_grid = 8;
    return s;
  }
};

// One evaluated truncation instance, kept so the bound suite can sweep every
// instance the equivalence suite produced.
struct DRecord {
  int cfg_index;
  WeightVec d;
  WeightVec r;
  MultiIndex u;
  int k;
  QAdicPoint x;
  Rational value;
};

// ---------------------------------------------------------------------------
// measure axioms: additivity, normalization, factorization of cell masses
// ---------------------------------------------------------------------------
inline SuiteReport run_measure_axioms(const std::vector<ConfigCase>& cfgs,
                                      const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("measure-axioms");
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 11 + ci));
    for (int t = 0; t < scale.axiom_weights; ++t) {
      WeightVec d = random_weight_vec(rng, q);
      WeightVec r = random_weight_vec(rng, q);
      MeasureContext mc(cfg, d, r);
      std::vector<std::vector<Rational>> tables;
      for (int k = 0; k <= 5; ++k) tables.push_back(mass_table(mc, k));
      for (int k = 0; k <= 5; ++k) {
        Rational sum = 0;
        for (const Rational& m : tables[static_cast<std::size_t>(k)]) sum += m;
        rec.check(sum == 1, [&] {
          return cfgs[ci].label + " d=" + detail::describe(d) + " r=" + detail::describe(r) +
                 ": level-" + std::to_string(k) + " masses sum to " + to_fraction_string(sum);
        });
      }
      for (int k = 0; k <= 4; ++k)
        for (std::size_t n = 0; n < tables[static_cast<std::size_t>(k)].size(); ++n) {
          Rational children = 0;
          for (int l = 0; l < q; ++l)
            children += tables[static_cast<std::size_t>(k + 1)]
                              [n * static_cast<std::size_t>(q) + static_cast<std::size_t>(l)];
          rec.check(children == tables[static_cast<std::size_t>(k)][n], [&] {
            return cfgs[ci].label + ": additivity fails at level " + std::to_string(k) +
                   " cell " + std::to_string(n);
          });
        }
      for (int k = 0; k <= 3; ++k)
        for (std::int64_t n = 0; n < checked_pow_i64(q, k); ++n) {
          QAdicInterval iv(q, k, n);
          rec.check(interval_measure(mc, iv) ==
                        tables[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)],
                    [&] {
                      return cfgs[ci].label + ": closed form disagrees with recursion at level " +
                             std::to_string(k) + " cell " + std::to_string(n);
                    });
        }
      // mass of a concatenated word factors through the twist named by the
      // last digit of the prefix
      for (int i = 1; i <= 5; ++i)
        for (int k = 1; i + k <= 6; ++k)
          for (std::int64_t b = 0; b < checked_pow_i64(q, i); ++b)
            for (std::int64_t a = 0; a < checked_pow_i64(q, k); ++a) {
              QAdicInterval whole(q, i + k, b * checked_pow_i64(q, k) + a);
              MeasureContext tail_mc(cfg, permuted_weights(cfg, r, b % q), r);
              Rational lhs = interval_measure(mc, whole);
              Rational rhs = interval_measure(mc, QAdicInterval(q, i, b)) *
                             interval_measure(tail_mc, QAdicInterval(q, k, a));
              rec.check(lhs == rhs, [&] {
                return cfgs[ci].label + " d=" + detail::describe(d) + " r=" +
                       detail::describe(r) + ": factorization fails at i=" + std::to_string(i) +
                       " k=" + std::to_string(k) + " b=" + std::to_string(b) +
                       " a=" + std::to_string(a) + ": " + to_fraction_string(lhs) +
                       " != " + to_fraction_string(rhs);
              });
            }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// reductions: untwisted product measure, uniform cdf, selector expectations
// ---------------------------------------------------------------------------
inline SuiteReport run_reductions(const std::vector<ConfigCase>& cfgs,
                                  const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("reductions");
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 23 + ci));
    MeasureContext uniform_mc(cfg, WeightVec::uniform(q), WeightVec::uniform(q));
    for (const QAdicPoint& x : grid_points(q, scale.reduction_grid))
      rec.check(cdf(uniform_mc, x) == x.value(), [&] {
        return cfgs[ci].label + ": uniform cdf differs from x at " + detail::describe(x);
      });
    for (int t = 0; t < scale.reduction_weights; ++t) {
      WeightVec d = random_weight_vec(rng, q);
      WeightVec d2 = random_weight_vec(rng, q);
      WeightVec r = random_weight_vec(rng, q);
      for (int l = 0; l < q; ++l) {
        StepFunction sel = digit_selector(cfg, l);
        Rational e1 = expectation_total(MeasureContext(cfg, d, r), sel);
        Rational e2 = expectation_total(MeasureContext(cfg, d2, r), sel);
        rec.check(e1 == r[l] && e2 == r[l], [&] {
          return cfgs[ci].label + " r=" + detail::describe(r) + ": selector " +
                 std::to_string(l) + " expectation " + to_fraction_string(e1) + " / " +
                 to_fraction_string(e2) + " != " + to_fraction_string(r[l]);
        });
      }
      if (cfg.is_identity()) {
        MeasureContext mc(cfg, d, r);
        for (int k = 1; k <= 4; ++k)
          for (std::int64_t n = 0; n < checked_pow_i64(q, k); ++n) {
            QAdicInterval iv(q, k, n);
            std::vector<int> word = iv.digits();
            Rational plain = d[word[0]];  // untwisted multinomial product
            for (std::size_t i = 1; i < word.size(); ++i) plain *= r[word[i]];
            rec.check(interval_measure(mc, iv) == plain, [&] {
              return cfgs[ci].label + ": multinomial reduction fails at level " +
                     std::to_string(k) + " cell " + std::to_string(n);
            });
          }
      }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// substitution: shift integration, conditional expectation, constancy
// ---------------------------------------------------------------------------
inline SuiteReport run_substitution(const std::vector<ConfigCase>& cfgs,
                                    const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("substitution");
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 37 + ci));
    for (int t = 0; t < scale.substitution_weights; ++t) {
      WeightVec d = random_weight_vec(rng, q);
      WeightVec r = random_weight_vec(rng, q);
      MeasureContext mc(cfg, d, r);
      StepFunction f = random_step_function(rng, q, rng.uniform_int(1, 3));
      for (int i = 1; i <= 3; ++i) {
        StepFunction composed = compose_shift(f, i);
        for (std::int64_t a = 0; a < checked_pow_i64(q, i); ++a) {
          QAdicInterval cell(q, i, a);
          MeasureContext tail_mc(cfg, permuted_weights(cfg, r, a % q), r);
          Rational lhs = expectation(mc, composed, cell);
          Rational rhs = interval_measure(mc, cell) * expectation_total(tail_mc, f);
          rec.check(lhs == rhs, [&] {
            return cfgs[ci].label + ": shift substitution fails at i=" + std::to_string(i) +
                   " cell " + std::to_string(a) + ": " + to_fraction_string(lhs) +
                   " != " + to_fraction_string(rhs);
          });
          // relative form over [0,x] for x inside the cell
          std::int64_t offset = rng.uniform_int(0, static_cast<int>(q * q - 1));
          QAdicPoint x(q, a * q * q + offset, i + 2);
          Rational lhsx = integrate(mc, step_multiply(composed, StepFunction::indicator(cell)), x);
          Rational rhsx = interval_measure(mc, cell) * integrate(tail_mc, f, phi_apply(x, i));
          rec.check(lhsx == rhsx, [&] {
            return cfgs[ci].label + ": relative substitution fails at i=" + std::to_string(i) +
                   " cell " + std::to_string(a) + " x=" + detail::describe(x);
          });
        }
      }
      // conditional expectation: defining adjunction and fixed point
      for (int k = 1; k <= 3; ++k) {
        StepFunction ce = cond_expect(mc, f, k);
        for (std::int64_t n = 0; n < checked_pow_i64(q, k); ++n) {
          QAdicInterval cell(q, k, n);
          rec.check(expectation(mc, ce, cell) == expectation(mc, f, cell), [&] {
            return cfgs[ci].label + ": adjunction fails at level " + std::to_string(k) +
                   " cell " + std::to_string(n);
          });
        }
        if (f.level() <= k)
          rec.check(step_equal(ce, f), [&] {
            return cfgs[ci].label + ": conditional expectation moved a measurable function";
          });
      }
      // constancy: a mean-zero deep factor slides past any coarse factor
      for (int k = 1; k <= 3; ++k) {
        StepFunction g = compose_shift(selector_diff(cfg, r, 0), k - 1);
        StepFunction zero_table = cond_expect(mc, g, k);
        bool all_zero = true;
        for (const Rational& v : zero_table.values())
          if (sgn(v) != 0) all_zero = false;
        rec.check(all_zero, [&] {
          return cfgs[ci].label + ": conditional expectation of shifted difference not 0 at k=" +
                 std::to_string(k);
        });
        StepFunction h = random_step_function(rng, q, k);
        for (int probe = 0; probe < 4; ++probe) {
          QAdicPoint x(q, rng.uniform_int(0, static_cast<int>(checked_pow_i64(q, k + 2))),
                       k + 2);
          Rational lhs = integrate(mc, step_multiply(h, g), x);
          Rational rhs = h.value_at(x) * integrate(mc, g, x);
          rec.check(lhs == rhs, [&] {
            return cfgs[ci].label + ": constancy fails at k=" + std::to_string(k) +
                   " x=" + detail::describe(x);
          });
        }
      }
      // shift composition is a homomorphism for products
      StepFunction f2 = random_step_function(rng, q, 2);
      StepFunction g2 = random_step_function(rng, q, 2);
      for (int i = 1; i <= 2; ++i)
        rec.check(step_equal(compose_shift(step_multiply(f2, g2), i),
                             step_multiply(compose_shift(f2, i), compose_shift(g2, i))),
                  [&] { return cfgs[ci].label + ": shift composition not multiplicative"; });
    }
    // the q selectors partition the interval
    StepFunction sum = StepFunction::constant(q, Rational(0));
    for (int l = 0; l < q; ++l) sum = step_add(sum, digit_selector(cfg, l));
    rec.check(step_equal(sum, StepFunction::constant(q, Rational(1))),
              [&] { return cfgs[ci].label + ": selectors do not partition"; });
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// zero expectation: shifted selector differences and their products have
// vanishing expectation on every coarse cell
// ---------------------------------------------------------------------------
inline SuiteReport run_zero_expectation(const std::vector<ConfigCase>& cfgs,
                                        const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("zero-expectation");
  for (int t = 0; t < scale.zero_weights; ++t) {
    const ConfigCase& cc = cfgs[static_cast<std::size_t>(t) % cfgs.size()];
    const SystemConfig& cfg = cc.cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 53 + static_cast<std::uint64_t>(t)));
    WeightVec d = random_weight_vec(rng, q);
    WeightVec r = random_weight_vec(rng, q);
    MeasureContext mc(cfg, d, r);
    std::vector<StepFunction> diffs = detail::selector_diffs(cfg, r);
    std::vector<std::vector<Rational>> mass_cache(
        static_cast<std::size_t>(scale.zero_beta_max + 3));
    auto masses_at = [&](int level) -> const std::vector<Rational>& {
      auto& slot = mass_cache[static_cast<std::size_t>(level)];
      if (slot.empty()) slot = mass_table(mc, level);
      return slot;
    };
    auto check_blocks_zero = [&](const std::vector<Rational>& table, int level, int k,
                                 const std::string& what) {
      const std::vector<Rational>& masses = masses_at(level);
      std::int64_t block = checked_pow_i64(q, level - k);
      std::int64_t cells = checked_pow_i64(q, k);
      for (std::int64_t n = 0; n < cells; ++n) {
        Rational sum = 0;
        for (std::int64_t j = n * block; j < (n + 1) * block; ++j)
          sum += table[static_cast<std::size_t>(j)] * masses[static_cast<std::size_t>(j)];
        rec.check(sgn(sum) == 0, [&] {
          return cc.label + " d=" + detail::describe(d) + " r=" + detail::describe(r) + ": " +
                 what + " has expectation " + to_fraction_string(sum) + " on level-" +
                 std::to_string(k) + " cell " + std::to_string(n);
        });
      }
    };
    // single shifted difference on every cell with beta + 2 > k
    for (int l = 0; l <= q - 2; ++l)
      for (int beta = 0; beta <= scale.zero_beta_max; ++beta) {
        StepFunction composed = compose_shift(diffs[static_cast<std::size_t>(l)], beta);
        for (int k = 0; k <= std::min(scale.zero_kmax, beta + 1); ++k)
          check_blocks_zero(composed.values(), beta + 2, k,
                            "difference " + std::to_string(l) + " shifted " +
                                std::to_string(beta));
        // one public-api probe per (l, beta)
        QAdicInterval probe(q, std::min(scale.zero_kmax, beta + 1),
                            rng.uniform_int(0, static_cast<int>(checked_pow_i64(
                                                   q, std::min(scale.zero_kmax, beta + 1))) -
                                                   1));
        rec.check(sgn(expectation(mc, composed, probe)) == 0,
                  [&] { return cc.label + ": public expectation probe nonzero"; });
      }
    // products over strictly increasing shift sequences: zero on every cell
    // with beta_1 + 2 > k, and in particular over the whole interval
    for (int total = 2; total <= 3; ++total)
      for (const MultiIndex& u : multi_indices_with_total(q, total)) {
        std::vector<std::vector<int>> psis = slot_assignments(cfg, u);
        detail::for_each_increasing_tuple(total, scale.zero_beta_max,
                                          [&](const std::vector<int>& betas) {
          int level = betas.back() + 2;
          for (const std::vector<int>& psi : psis) {
            std::vector<Rational> table =
                detail::tuple_product_table(cfg, diffs, psi, betas, level);
            for (int k = 0; k <= std::min(scale.zero_kmax, betas[0] + 1); ++k)
              check_blocks_zero(table, level, k,
                                "product u=" + detail::describe(u) + " shifts " +
                                    std::to_string(betas[0]) + "..+" +
                                    std::to_string(betas.back()));
          }
        });
      }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// radon-nikodym: one-step factor identity, product formula, stabilization
// ---------------------------------------------------------------------------
inline SuiteReport run_radon_nikodym(const std::vector<ConfigCase>& cfgs,
                                     const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("radon-nikodym");
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 71 + ci));
    for (int t = 0; t < scale.rn_weights; ++t) {
      WeightVec e = random_weight_vec(rng, q);
      WeightVec s = random_weight_vec(rng, q);
      WeightVec d = random_weight_vec(rng, q);
      WeightVec r = random_weight_vec(rng, q);
      StepFunction w = rn_step(cfg, s, r);
      StepFunction selector_sum = StepFunction::constant(q, Rational(0));
      for (int l = 0; l < q; ++l)
        selector_sum = step_add(selector_sum, step_scale(digit_selector(cfg, l), s[l] / r[l]));
      rec.check(step_equal(selector_sum, w), [&] {
        return cfgs[ci].label + ": selector expansion of the one-step factor fails";
      });
      rec.check(step_equal(rn_step(cfg, r, r), StepFunction::constant(q, Rational(1))),
                [&] { return cfgs[ci].label + ": one-step factor at s=r is not 1"; });
      StepFunction z1 = rn_derivative(cfg, e, s, d, r, 1);
      StepFunction product = StepFunction::constant(q, Rational(1));
      for (int k = 1; k <= scale.rn_kmax; ++k) {
        product = step_multiply(product, compose_shift(w, k - 1));
        rec.check(step_equal(rn_derivative(cfg, e, s, d, r, k + 1),
                             step_multiply(product, z1)),
                  [&] {
                    return cfgs[ci].label + " e=" + detail::describe(e) + " s=" +
                           detail::describe(s) + " d=" + detail::describe(d) + " r=" +
                           detail::describe(r) + ": product formula fails at k=" +
                           std::to_string(k);
                  });
      }
      // once the partition is at least as fine as x, the partial integral of
      // the derivative reproduces the target distribution function exactly
      MeasureContext bottom(cfg, d, r);
      MeasureContext top(cfg, e, s);
      for (int k = 0; k <= scale.rn_kmax + 1; ++k) {
        StepFunction zk = rn_derivative(cfg, e, s, d, r, k);
        for (const QAdicPoint& x : grid_points(q, scale.rn_grid)) {
          if (x.level() > k) continue;
          Rational lhs = integrate(bottom, zk, x);
          Rational rhs = cdf(top, x);
          rec.check(lhs == rhs, [&] {
            return cfgs[ci].label + ": stabilization fails at k=" + std::to_string(k) +
                   " x=" + detail::describe(x) + ": " + to_fraction_string(lhs) +
                   " != " + to_fraction_string(rhs);
          });
        }
      }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// takagi equivalence: direct tuple sum vs order-reduction recursion, plus
// stabilization of truncations beyond the level of the point
// ---------------------------------------------------------------------------
struct EquivalenceResult {
  SuiteReport equality;
  SuiteReport stabilization;
  std::vector<DRecord> records;
};

inline EquivalenceResult run_takagi_equivalence(const std::vector<ConfigCase>& cfgs,
                                                const SuiteScale& scale,
                                                std::uint64_t seed) {
  detail::Recorder eq_rec("takagi-direct-vs-recursive");
  detail::Recorder st_rec("takagi-stabilization");
  std::vector<DRecord> records;
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 97 + ci));
    std::vector<QAdicPoint> grid = grid_points(q, scale.equiv_grid);
    for (int t = 0; t < scale.equiv_weights; ++t) {
      WeightVec d = random_weight_vec(rng, q);
      WeightVec r = random_weight_vec(rng, q);
      MeasureContext mc(cfg, d, r);
      for (const MultiIndex& u : multi_indices_up_to(q, scale.equiv_max_order)) {
        std::vector<std::vector<Rational>> recursive_values(
            static_cast<std::size_t>(scale.equiv_kmax + 1));
        for (int k = 0; k <= scale.equiv_kmax; ++k) {
          std::vector<Rational> direct = takagi_truncated_direct_grid(mc, u, k, scale.equiv_grid);
          auto& row = recursive_values[static_cast<std::size_t>(k)];
          row.reserve(grid.size());
          for (std::size_t m = 0; m < grid.size(); ++m) {
            Rational rv = takagi_truncated(mc, u, k, grid[m]);
            eq_rec.check(direct[m] == rv, [&] {
              return cfgs[ci].label + " d=" + detail::describe(d) + " r=" +
                     detail::describe(r) + " u=" + detail::describe(u) + " k=" +
                     std::to_string(k) + " x=" + detail::describe(grid[m]) + ": direct=" +
                     to_fraction_string(direct[m]) + " recursive=" + to_fraction_string(rv);
            });
            records.push_back(DRecord{static_cast<int>(ci), d, r, u, k, grid[m], rv});
            row.push_back(std::move(rv));
          }
        }
        for (std::size_t m = 0; m < grid.size(); ++m) {
          int lvl = grid[m].level();
          if (lvl > scale.equiv_kmax) continue;
          const Rational& settled = recursive_values[static_cast<std::size_t>(lvl)][m];
          for (int k = lvl; k <= scale.equiv_kmax; ++k)
            st_rec.check(recursive_values[static_cast<std::size_t>(k)][m] == settled, [&] {
              return cfgs[ci].label + " u=" + detail::describe(u) + " x=" +
                     detail::describe(grid[m]) + ": truncation moved between k=" +
                     std::to_string(lvl) + " and k=" + std::to_string(k);
            });
          st_rec.check(takagi_function(mc, u, grid[m]) == settled, [&] {
            return cfgs[ci].label + " u=" + detail::describe(u) + " x=" +
                   detail::describe(grid[m]) + ": full value differs from settled truncation";
          });
        }
      }
    }
  }
  return EquivalenceResult{eq_rec.take(), st_rec.take(), std::move(records)};
}

// ---------------------------------------------------------------------------
// bounds: sup-norm conformance on recorded instances, first-order tail bound
// on fine grids, vanishing at 1
// ---------------------------------------------------------------------------
inline SuiteReport run_bounds(const std::vector<ConfigCase>& cfgs, const SuiteScale& scale,
                              std::uint64_t seed, const std::vector<DRecord>* records) {
  detail::Recorder rec("bounds");
  std::vector<DRecord> own;
  if (records == nullptr) {
    SuiteScale small = scale;
    small.equiv_weights = 1;
    small.equiv_kmax = 3;
    small.equiv_grid = 2;
    EquivalenceResult eq = run_takagi_equivalence(cfgs, small, detail::mix_seed(seed, 131));
    own = std::move(eq.records);
    records = &own;
  }
  for (const DRecord& rd : *records) {
    Rational bound = takagi_sup_bound(cfgs[static_cast<std::size_t>(rd.cfg_index)].cfg,
                                      rd.r, rd.u);
    rec.check(abs(rd.value) <= bound, [&] {
      return cfgs[static_cast<std::size_t>(rd.cfg_index)].label + " r=" +
             detail::describe(rd.r) + " u=" + detail::describe(rd.u) + " k=" +
             std::to_string(rd.k) + " x=" + detail::describe(rd.x) + ": |" +
             to_fraction_string(rd.value) + "| > " + to_fraction_string(bound);
    });
  }
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 139 + ci));
    WeightVec d = random_weight_vec(rng, q);
    WeightVec r = random_weight_vec(rng, q);
    MeasureContext mc(cfg, d, r);
    for (int k = 0; k <= 6; ++k)
      rec.check(takagi_tail_bound(cfg, r, k + 1) ==
                    takagi_tail_bound(cfg, r, k) * r.max_component(),
                [&] { return cfgs[ci].label + ": tail bound not geometric"; });
    for (int l = 0; l <= q - 2; ++l)
      for (const QAdicPoint& x : grid_points(q, scale.bounds_tail_grid)) {
        std::vector<Rational> partials =
            takagi_first_order_partials(mc, l, scale.bounds_tail_grid, x);
        const Rational& full = partials[static_cast<std::size_t>(x.level())];
        for (int k = 0; k < scale.bounds_tail_grid; ++k) {
          Rational gap = abs(full - partials[static_cast<std::size_t>(k)]);
          Rational bound = takagi_tail_bound(cfg, r, k);
          rec.check(gap <= bound, [&] {
            return cfgs[ci].label + " d=" + detail::describe(d) + " r=" +
                   detail::describe(r) + " l=" + std::to_string(l) + " x=" +
                   detail::describe(x) + " k=" + std::to_string(k) + ": tail " +
                   to_fraction_string(gap) + " > " + to_fraction_string(bound);
          });
        }
      }
    QAdicPoint one(q, 1, 0);
    for (const MultiIndex& u : multi_indices_up_to(q, 3))
      rec.check(sgn(takagi_function(mc, u, one)) == 0, [&] {
        return cfgs[ci].label + " u=" + detail::describe(u) + ": value at 1 is nonzero";
      });
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// derivative identity, first order: takagi form vs polynomial mixed partial
// ---------------------------------------------------------------------------
inline SuiteReport run_theorem_case_i(const std::vector<ConfigCase>& cfgs,
                                      const SuiteScale& scale, std::uint64_t seed,
                                      const std::vector<ConfigCase>* rhs_cfgs = nullptr) {
  detail::Recorder rec("derivative-identity-order-1");
  if (rhs_cfgs == nullptr) rhs_cfgs = &cfgs;
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    const SystemConfig& rhs_cfg = (*rhs_cfgs)[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 151 + ci));
    std::vector<WeightVec> weights;
    for (int t = 0; t < scale.theorem_i_weights; ++t)
      weights.push_back(random_weight_vec(rng, q));
    for (const QAdicPoint& x : grid_points(q, scale.theorem_i_grid)) {
      SparsePoly poly = cdf_weight_polynomial(cfg, DerivMode::coupled, x);
      for (int l = 0; l <= q - 2; ++l) {
        MultiIndex u = MultiIndex::unit(q, l);
        SparsePoly dp = poly.derivative(u);
        for (const WeightVec& r : weights) {
          Rational oracle = dp.evaluate(detail::prefix_components(r)) / q;
          Rational takagi_form = derivative_takagi_form(rhs_cfg, r, u, x);
          rec.check(oracle == takagi_form, [&] {
            return cfgs[ci].label + " r=" + detail::describe(r) + " l=" + std::to_string(l) +
                   " x=" + detail::describe(x) + ": oracle/q=" + to_fraction_string(oracle) +
                   " takagi=" + to_fraction_string(takagi_form);
          });
        }
      }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// derivative identity, higher order
// ---------------------------------------------------------------------------
inline SuiteReport run_theorem_case_ii(const std::vector<ConfigCase>& cfgs,
                                       const SuiteScale& scale, std::uint64_t seed,
                                       const std::vector<ConfigCase>* rhs_cfgs = nullptr) {
  detail::Recorder rec("derivative-identity-higher-order");
  if (rhs_cfgs == nullptr) rhs_cfgs = &cfgs;
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    const SystemConfig& rhs_cfg = (*rhs_cfgs)[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 163 + ci));
    std::vector<WeightVec> weights;
    for (int t = 0; t < scale.theorem_ii_weights; ++t)
      weights.push_back(random_weight_vec(rng, q));
    std::vector<MultiIndex> orders;
    for (int total = 2; total <= scale.theorem_ii_max_order; ++total)
      for (MultiIndex& u : multi_indices_with_total(q, total)) orders.push_back(std::move(u));
    for (const QAdicPoint& x : grid_points(q, scale.theorem_ii_grid)) {
      SparsePoly poly = cdf_weight_polynomial(cfg, DerivMode::coupled, x);
      for (const MultiIndex& u : orders) {
        SparsePoly dp = poly.derivative(u);
        Rational norm = Rational(q) * Rational(u.factorial_product());
        for (const WeightVec& r : weights) {
          Rational oracle = dp.evaluate(detail::prefix_components(r)) / norm;
          Rational takagi_form = derivative_takagi_form(rhs_cfg, r, u, x);
          rec.check(oracle == takagi_form, [&] {
            return cfgs[ci].label + " r=" + detail::describe(r) + " u=" +
                   detail::describe(u) + " x=" + detail::describe(x) + ": oracle/(q u!)=" +
                   to_fraction_string(oracle) + " takagi=" + to_fraction_string(takagi_form);
          });
        }
      }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// derivative transfer chain: series truncation stabilizes onto the takagi
// form; polynomial route matches the measure route; partials commute
// ---------------------------------------------------------------------------
inline SuiteReport run_derivative_chain(const std::vector<ConfigCase>& cfgs,
                                        const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("derivative-chain");
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 179 + ci));
    for (int t = 0; t < scale.chain_weights; ++t) {
      WeightVec r = random_weight_vec(rng, q);
      MeasureContext coupled(cfg, r, r);
      MeasureContext uniform_mc(cfg, WeightVec::uniform(q), r);
      for (const QAdicPoint& x : grid_points(q, scale.chain_grid)) {
        for (DerivMode mode : {DerivMode::coupled, DerivMode::uniform_first}) {
          Rational via_poly = cdf_weight_polynomial(cfg, mode, x)
                                  .evaluate(detail::prefix_components(r));
          Rational via_measure =
              cdf(mode == DerivMode::coupled ? coupled : uniform_mc, x);
          rec.check(via_poly == via_measure, [&] {
            return cfgs[ci].label + " r=" + detail::describe(r) + " x=" +
                   detail::describe(x) + ": symbolic and direct cdf disagree";
          });
        }
        for (const MultiIndex& u : multi_indices_up_to(q, 2)) {
          Rational settled = derivative_takagi_form(cfg, r, u, x);
          for (int extra = 2; extra <= 3; ++extra) {
            Rational series = derivative_series_form(cfg, r, u, x, x.level() + extra);
            rec.check(series == settled, [&] {
              return cfgs[ci].label + " r=" + detail::describe(r) + " u=" +
                     detail::describe(u) + " x=" + detail::describe(x) + " k=" +
                     std::to_string(x.level() + extra) + ": series=" +
                     to_fraction_string(series) + " settled=" + to_fraction_string(settled);
            });
          }
        }
      }
      if (q >= 3) {
        // mixed partials commute: differentiate in both orders
        QAdicPoint x(q, rng.uniform_int(1, static_cast<int>(checked_pow_i64(q, 3)) - 1), 3);
        SparsePoly poly = cdf_weight_polynomial(cfg, DerivMode::coupled, x);
        SparsePoly d01 = poly.derivative(0).derivative(1);
        SparsePoly d10 = poly.derivative(1).derivative(0);
        rec.check(d01 == d10,
                  [&] { return cfgs[ci].label + ": mixed partials do not commute"; });
      }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// classical anchor: the dyadic symmetric case reproduces twice the classical
// Takagi function, computed by its independent finite dyadic sum
// ---------------------------------------------------------------------------
inline SuiteReport run_classical_anchor(const SuiteScale& scale) {
  detail::Recorder rec("classical-anchor");
  SystemConfig cfg(2, {0, 1});
  WeightVec half({make_rational(1, 2), make_rational(1, 2)});
  MultiIndex u = MultiIndex::unit(2, 0);
  for (const QAdicPoint& x : grid_points(2, scale.anchor_grid)) {
    // independent route: sum of 2^-n * dist(2^n x, Z), finite at dyadic x
    Rational tau = 0;
    Rational t = x.value();
    for (int n = 0; n < x.level(); ++n) {
      Rational frac = t;
      Rational dist = frac <= 1 - frac ? frac : 1 - frac;
      tau += rational_pow(make_rational(1, 2), n) * dist;
      t = 2 * t;
      if (t >= 1) t -= 1;
    }
    Rational oracle = cdf_mixed_partial(cfg, DerivMode::coupled, x, u, half);
    rec.check(oracle == 2 * tau, [&] {
      return "x=" + detail::describe(x) + ": mixed partial " + to_fraction_string(oracle) +
             " != 2*tau = " + to_fraction_string(2 * tau);
    });
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// base change between the coupled and uniform-leading distribution functions
// ---------------------------------------------------------------------------
inline SuiteReport run_base_change(const std::vector<ConfigCase>& cfgs,
                                   const SuiteScale& scale, std::uint64_t seed) {
  detail::Recorder rec("base-change");
  for (std::size_t ci = 0; ci < cfgs.size(); ++ci) {
    const SystemConfig& cfg = cfgs[ci].cfg;
    int q = cfg.q();
    DeterministicRng rng(detail::mix_seed(seed, 191 + ci));
    for (int t = 0; t < scale.basechange_weights; ++t) {
      WeightVec s = random_weight_vec(rng, q);
      for (const QAdicPoint& x : grid_points(q, scale.basechange_grid)) {
        auto [lhs, rhs] = base_change_sides(cfg, s, x);
        rec.check(lhs == rhs, [&] {
          return cfgs[ci].label + " s=" + detail::describe(s) + " x=" + detail::describe(x) +
                 ": " + to_fraction_string(lhs) + " != " + to_fraction_string(rhs);
        });
      }
    }
  }
  return rec.take();
}

// ---------------------------------------------------------------------------
// named suite dispatch for the command-line runner
// ---------------------------------------------------------------------------
inline std::vector<std::string> verify_suite_names() {
  return {"measure-axioms", "substitution",  "zero-expectation", "radon-nikodym",
          "takagi-equiv",   "theorem",       "bounds"};
}

inline std::vector<SuiteReport> run_named_suite(const std::string& name,
                                                const SuiteScale& scale,
                                                std::uint64_t seed,
                                                bool corrupt_sigma_powers) {
  std::vector<ConfigCase> cfgs = standard_configs(false);
  if (name == "measure-axioms")
    return {run_measure_axioms(cfgs, scale, seed), run_reductions(cfgs, scale, seed)};
  if (name == "substitution") return {run_substitution(cfgs, scale, seed)};
  if (name == "zero-expectation") return {run_zero_expectation(cfgs, scale, seed)};
  if (name == "radon-nikodym") return {run_radon_nikodym(cfgs, scale, seed)};
  if (name == "takagi-equiv") {
    EquivalenceResult eq = run_takagi_equivalence(cfgs, scale, seed);
    return {std::move(eq.equality), std::move(eq.stabilization)};
  }
  if (name == "theorem") {
    // The self-test fixture feeds the Takagi route a config whose sigma-power
    // table was deliberately broken, while the polynomial oracle keeps the
    // pristine one; the suite must then report the mismatch.
    std::vector<ConfigCase> rhs_cfgs = standard_configs(corrupt_sigma_powers);
    return {run_theorem_case_i(cfgs, scale, seed, &rhs_cfgs),
            run_theorem_case_ii(cfgs, scale, seed, &rhs_cfgs),
            run_derivative_chain(cfgs, scale, seed), run_classical_anchor(scale),
            run_base_change(cfgs, scale, seed)};
  }
  if (name == "bounds") return {run_bounds(cfgs, scale, seed, nullptr)};
  throw ConfigError("unknown suite: " + name);
}

}  // namespace qtakagi
