#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qtakagi/core.hpp"
#include "qtakagi/stepfn.hpp"

namespace qtakagi {

// The pair of weight vectors parametrizing a twisted measure: d weights the
// first digit, r weights every later digit transition through sigma.
struct MeasureContext {
  SystemConfig cfg;
  WeightVec d;
  WeightVec r;

  MeasureContext(SystemConfig config, WeightVec first, WeightVec refine)
      : cfg(std::move(config)), d(std::move(first)), r(std::move(refine)) {
    if (d.q() != cfg.q() || r.q() != cfg.q())
      throw ConfigError("weight vectors must have q components");
  }
};

namespace detail {

// Mass factor appended when a cell at `level` with index `parent` is refined
// by digit l. Only the parent's last digit enters, since sigma^q = id.
inline const Rational& transition_weight(const SystemConfig& cfg, const WeightVec& d,
                                         const WeightVec& r, int level,
                                         std::int64_t parent, int l) {
  if (level == 0) return d[l];
  return r[cfg.sigma_apply(parent % cfg.q(), l)];
}

inline Rational cell_mass(const SystemConfig& cfg, const WeightVec& d, const WeightVec& r,
                          const QAdicInterval& iv) {
  if (iv.level() == 0) return Rational(1);
  std::vector<int> word = iv.digits();
  Rational mass = d[word[0]];
  for (std::size_t t = 1; t < word.size(); ++t)
    mass *= r[cfg.sigma_apply(word[t - 1], word[t])];
  return mass;
}

// Adds the integral of f over the part of the level-`level` cell `index`
// (carrying `mass`) lying below cell `bound` of level L. Subtrees on which f
// is constant are closed off with a single product; cost is linear in the
// boundary path plus the cells of f actually split.
inline void accumulate_below(const SystemConfig& cfg, const WeightVec& d,
                             const WeightVec& r, const StepFunction& f, int L,
                             std::int64_t bound, int level, std::int64_t index,
                             const Rational& mass, Rational& acc) {
  std::int64_t width = checked_pow_i64(cfg.q(), L - level);
  std::int64_t lo = index * width;
  if (lo >= bound) return;
  if (lo + width <= bound && level >= f.level()) {
    acc += mass * f[index / checked_pow_i64(cfg.q(), level - f.level())];
    return;
  }
  for (int l = 0; l < cfg.q(); ++l) {
    Rational child = mass * transition_weight(cfg, d, r, level, index, l);
    accumulate_below(cfg, d, r, f, L, bound, level + 1, index * cfg.q() + l, child, acc);
  }
}

inline Rational integrate_impl(const SystemConfig& cfg, const WeightVec& d,
                               const WeightVec& r, const StepFunction& f,
                               const QAdicPoint& x) {
  if (f.q() != cfg.q()) throw ConfigError("step function base mismatch");
  if (x.is_zero()) return Rational(0);
  int L = std::max(f.level(), x.level());
  std::int64_t bound = x.is_one()
                           ? checked_pow_i64(cfg.q(), L)
                           : x.numerator() * checked_pow_i64(cfg.q(), L - x.level());
  Rational acc = 0;
  accumulate_below(cfg, d, r, f, L, bound, 0, 0, Rational(1), acc);
  return acc;
}

}  // namespace detail

// Mass of a single cell: d for the leading digit, then one r factor per
// digit transition twisted by the power of sigma named by the previous digit.
inline Rational interval_measure(const MeasureContext& mc, const QAdicInterval& iv) {
  if (iv.q() != mc.cfg.q()) throw ConfigError("interval base mismatch");
  return detail::cell_mass(mc.cfg, mc.d, mc.r, iv);
}

// All q^level cell masses, built level by level.
inline std::vector<Rational> mass_table(const MeasureContext& mc, int level) {
  table_size(mc.cfg.q(), level);
  std::vector<Rational> cur{Rational(1)};
  for (int k = 1; k <= level; ++k) {
    std::vector<Rational> next(cur.size() * static_cast<std::size_t>(mc.cfg.q()));
    for (std::size_t parent = 0; parent < cur.size(); ++parent)
      for (int l = 0; l < mc.cfg.q(); ++l)
        next[parent * static_cast<std::size_t>(mc.cfg.q()) + static_cast<std::size_t>(l)] =
            cur[parent] * detail::transition_weight(mc.cfg, mc.d, mc.r, k - 1,
                                                    static_cast<std::int64_t>(parent), l);
    cur = std::move(next);
  }
  return cur;
}

// Distribution function: the measure of [0,x]. Points carry no mass, so the
// closed endpoint is immaterial; computed from the greedy decomposition of
// [0,x) into one cell per digit position, O(q * level) work.
inline Rational cdf(const MeasureContext& mc, const QAdicPoint& x) {
  if (x.q() != mc.cfg.q()) throw ConfigError("point base mismatch");
  if (x.is_one()) return Rational(1);
  Rational total = 0;
  Rational prefix = 1;
  int prev = -1;
  for (int i = 1; i <= x.level(); ++i) {
    int a = x.digit(i);
    for (int c = 0; c < a; ++c)
      total += prefix * (i == 1 ? mc.d[c] : mc.r[mc.cfg.sigma_apply(prev, c)]);
    prefix *= (i == 1 ? mc.d[a] : mc.r[mc.cfg.sigma_apply(prev, a)]);
    prev = a;
  }
  return total;
}

// Exact integral of a step function over [0,x].
inline Rational integrate(const MeasureContext& mc, const StepFunction& f,
                          const QAdicPoint& x) {
  return detail::integrate_impl(mc.cfg, mc.d, mc.r, f, x);
}

// Exact integral of a step function over a single cell.
inline Rational expectation(const MeasureContext& mc, const StepFunction& f,
                            const QAdicInterval& iv) {
  if (f.q() != mc.cfg.q() || iv.q() != mc.cfg.q())
    throw ConfigError("base mismatch");
  int L = std::max(f.level(), iv.level());
  std::int64_t bound =
      (iv.index() + 1) * checked_pow_i64(mc.cfg.q(), L - iv.level());
  Rational acc = 0;
  detail::accumulate_below(mc.cfg, mc.d, mc.r, f, L, bound, iv.level(), iv.index(),
                           interval_measure(mc, iv), acc);
  return acc;
}

inline Rational expectation_total(const MeasureContext& mc, const StepFunction& f) {
  return expectation(mc, f, QAdicInterval(mc.cfg.q(), 0, 0));
}

// Conditional expectation onto the level-k cells: the level-k step function
// with value expectation(f; cell)/mass(cell) on each cell. Satisfies the
// defining adjunction against every union of level-k cells.
inline StepFunction cond_expect(const MeasureContext& mc, const StepFunction& f, int k) {
  std::int64_t cells = table_size(mc.cfg.q(), k);
  std::vector<Rational> masses = mass_table(mc, k);
  std::vector<Rational> out(static_cast<std::size_t>(cells));
  for (std::int64_t n = 0; n < cells; ++n) {
    QAdicInterval iv(mc.cfg.q(), k, n);
    out[static_cast<std::size_t>(n)] =
        expectation(mc, f, iv) / masses[static_cast<std::size_t>(n)];
  }
  return StepFunction(mc.cfg.q(), k, std::move(out));
}

// Lebesgue integral of the level-1 cell indicator over [0,x]:
// clamp(x - n/q, 0, 1/q).
inline Rational lebesgue_cell_integral(const SystemConfig& cfg, int n,
                                       const QAdicPoint& x) {
  if (n < 0 || n >= cfg.q()) throw ConfigError("digit out of range");
  Rational v = x.value() - make_rational(n, cfg.q());
  if (sgn(v) <= 0) return Rational(0);
  Rational cap = make_rational(1, cfg.q());
  return v >= cap ? cap : v;
}

// Radon-Nikodym derivative of one twisted measure against another on the
// level-k cells: the ratio of the two mass tables.
inline StepFunction rn_derivative(const SystemConfig& cfg, const WeightVec& e,
                                  const WeightVec& s, const WeightVec& d,
                                  const WeightVec& r, int k) {
  MeasureContext top(cfg, e, s), bottom(cfg, d, r);
  std::vector<Rational> num = mass_table(top, k);
  std::vector<Rational> den = mass_table(bottom, k);
  std::vector<Rational> out(num.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = num[n] / den[n];
  return StepFunction(cfg.q(), k, std::move(out));
}

}  // namespace qtakagi
