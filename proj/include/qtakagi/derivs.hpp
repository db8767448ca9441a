#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qtakagi/core.hpp"
#include "qtakagi/measure.hpp"
#include "qtakagi/takagi.hpp"

namespace qtakagi {

// Which leading weights parametrize the distribution function under study:
// coupled ties them to the refinement weights, uniform_first fixes them to
// (1/q,...,1/q).
enum class DerivMode { coupled, uniform_first };

// Exact multivariate polynomial over the free weight variables v_0..v_{q-2},
// sparse map from exponent vectors to coefficients. The dependent weight is
// always eliminated as 1 - sum v_j before any differentiation, so partial
// derivatives here are the constrained ones.
class SparsePoly {
 public:
  explicit SparsePoly(int nvars) : nvars_(nvars) {}

  static SparsePoly constant(int nvars, const Rational& c) {
    SparsePoly p(nvars);
    if (sgn(c) != 0) p.terms_[std::vector<int>(static_cast<std::size_t>(nvars), 0)] = c;
    return p;
  }

  static SparsePoly variable(int nvars, int idx) {
    SparsePoly p(nvars);
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(idx)] = 1;
    p.terms_[std::move(e)] = 1;
    return p;
  }

  // 1 - v_0 - ... - v_{nvars-1}: the eliminated dependent weight.
  static SparsePoly complement(int nvars) {
    SparsePoly p = constant(nvars, Rational(1));
    for (int j = 0; j < nvars; ++j) {
      std::vector<int> e(static_cast<std::size_t>(nvars), 0);
      e[static_cast<std::size_t>(j)] = 1;
      p.terms_[std::move(e)] = -1;
    }
    return p;
  }

  int nvars() const noexcept { return nvars_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<std::vector<int>, Rational>& terms() const noexcept { return terms_; }

  SparsePoly operator+(const SparsePoly& o) const {
    SparsePoly out = *this;
    for (const auto& [e, c] : o.terms_) {
      Rational& slot = out.terms_[e];
      slot += c;
      if (sgn(slot) == 0) out.terms_.erase(e);
    }
    return out;
  }

  SparsePoly operator*(const SparsePoly& o) const {
    SparsePoly out(nvars_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) {
        std::vector<int> e(static_cast<std::size_t>(nvars_));
        for (int j = 0; j < nvars_; ++j)
          e[static_cast<std::size_t>(j)] = ea[static_cast<std::size_t>(j)] +
                                           eb[static_cast<std::size_t>(j)];
        Rational& slot = out.terms_[std::move(e)];
        slot += ca * cb;
      }
    for (auto it = out.terms_.begin(); it != out.terms_.end();)
      it = sgn(it->second) == 0 ? out.terms_.erase(it) : std::next(it);
    return out;
  }

  SparsePoly derivative(int var) const {
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      int power = e[static_cast<std::size_t>(var)];
      if (power == 0) continue;
      std::vector<int> e2 = e;
      --e2[static_cast<std::size_t>(var)];
      out.terms_[std::move(e2)] = c * power;
    }
    return out;
  }

  SparsePoly derivative(const MultiIndex& u) const {
    SparsePoly out = *this;
    for (int l = 0; l < nvars_; ++l)
      for (int t = 0; t < u.order(l); ++t) out = out.derivative(l);
    return out;
  }

  Rational evaluate(const std::vector<Rational>& point) const {
    Rational total = 0;
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (int j = 0; j < nvars_; ++j)
        if (e[static_cast<std::size_t>(j)] > 0)
          term *= rational_pow(point[static_cast<std::size_t>(j)],
                               e[static_cast<std::size_t>(j)]);
      total += term;
    }
    return total;
  }

  int total_degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) {
      int d = 0;
      for (int v : e) d += v;
      deg = std::max(deg, d);
    }
    return deg;
  }

  bool operator==(const SparsePoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

 private:
  int nvars_;
  std::map<std::vector<int>, Rational> terms_;
};

// The distribution function at a fixed q-adic point as an exact polynomial in
// the free weight variables: each cell of the greedy decomposition of [0,x)
// contributes its mass monomial, with the leading factor chosen by mode and
// every occurrence of the dependent weight expanded as 1 - sum v_j.
inline SparsePoly cdf_weight_polynomial(const SystemConfig& cfg, DerivMode mode,
                                        const QAdicPoint& x) {
  if (x.level() > 10) throw LevelCapExceeded("symbolic cdf capped at level 10");
  int nv = cfg.q() - 1;
  auto weight_poly = [&](int idx) {
    return idx == cfg.q() - 1 ? SparsePoly::complement(nv)
                              : SparsePoly::variable(nv, idx);
  };
  auto leading_poly = [&](int idx) {
    return mode == DerivMode::coupled
               ? weight_poly(idx)
               : SparsePoly::constant(nv, make_rational(1, cfg.q()));
  };
  if (x.is_one()) return SparsePoly::constant(nv, Rational(1));
  SparsePoly total(nv);
  SparsePoly prefix = SparsePoly::constant(nv, Rational(1));
  int prev = -1;
  for (int i = 1; i <= x.level(); ++i) {
    int a = x.digit(i);
    for (int c = 0; c < a; ++c)
      total = total + prefix * (i == 1 ? leading_poly(c)
                                       : weight_poly(cfg.sigma_apply(prev, c)));
    prefix = prefix * (i == 1 ? leading_poly(a)
                              : weight_poly(cfg.sigma_apply(prev, a)));
    prev = a;
  }
  return total;
}

// Ground-truth mixed partial of the distribution function with respect to the
// free weights, by exact polynomial differentiation and evaluation at r.
inline Rational cdf_mixed_partial(const SystemConfig& cfg, DerivMode mode,
                                  const QAdicPoint& x, const MultiIndex& u,
                                  const WeightVec& r) {
  if (u.total() == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  SparsePoly dp = cdf_weight_polynomial(cfg, mode, x).derivative(u);
  std::vector<Rational> point(r.components().begin(), r.components().end() - 1);
  return dp.evaluate(point);
}

// The |u|-th derivative of the coupled distribution function, normalized by
// q u!, expressed through generalized Takagi functions with uniform leading
// weights. Contract: equals cdf_mixed_partial(coupled)/(q u!).
inline Rational derivative_takagi_form(const SystemConfig& cfg, const WeightVec& r,
                                       const MultiIndex& u, const QAdicPoint& x) {
  int s = u.total();
  if (s == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  MeasureContext uniform_mc(cfg, WeightVec::uniform(cfg.q()), r);
  int cell = static_cast<int>(locate(x, 1).index());
  auto indicator_diff = [&](int l) {
    return Rational((cell == l ? 1 : 0) - (cell == cfg.q() - 1 ? 1 : 0));
  };
  if (s == 1) {
    int l = 0;
    while (u.order(l) == 0) ++l;
    return indicator_diff(l) * (cdf(uniform_mc, x) - x.value()) +
           r[cell] * cfg.q() * takagi_function(uniform_mc, u, x) +
           lebesgue_cell_integral(cfg, l, x) -
           lebesgue_cell_integral(cfg, cfg.q() - 1, x);
  }
  Rational out = r[cell] * cfg.q() * takagi_function(uniform_mc, u, x);
  for (int j = 0; j <= cfg.q() - 2; ++j) {
    if (u.order(j) == 0) continue;
    Rational coeff = indicator_diff(j);
    if (sgn(coeff) != 0)
      out += coeff * cfg.q() * takagi_function(uniform_mc, u.minus_unit(j), x);
  }
  return out;
}

// The same derivative through the truncated series form: the inner shift
// sums run through k-2, realized by the direct truncation with uniform
// leading weights. Stabilizes once k-2 reaches the level of x, and then
// agrees with derivative_takagi_form.
inline Rational derivative_series_form(const SystemConfig& cfg, const WeightVec& r,
                                       const MultiIndex& u, const QAdicPoint& x, int k) {
  int s = u.total();
  if (s == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  MeasureContext uniform_mc(cfg, WeightVec::uniform(cfg.q()), r);
  auto truncated = [&](const MultiIndex& v) {
    return k - 2 < 0 ? Rational(0) : takagi_truncated_direct(uniform_mc, v, k - 2, x);
  };
  int cell = static_cast<int>(locate(x, 1).index());
  auto indicator_diff = [&](int l) {
    return Rational((cell == l ? 1 : 0) - (cell == cfg.q() - 1 ? 1 : 0));
  };
  if (s == 1) {
    int l = 0;
    while (u.order(l) == 0) ++l;
    return indicator_diff(l) * (cdf(uniform_mc, x) - x.value()) +
           r[cell] * cfg.q() * truncated(u) +
           lebesgue_cell_integral(cfg, l, x) -
           lebesgue_cell_integral(cfg, cfg.q() - 1, x);
  }
  Rational out = r[cell] * cfg.q() * truncated(u);
  for (int j = 0; j <= cfg.q() - 2; ++j) {
    if (u.order(j) == 0) continue;
    Rational coeff = indicator_diff(j);
    if (sgn(coeff) != 0) out += coeff * cfg.q() * truncated(u.minus_unit(j));
  }
  return out;
}

// Both sides of the identity tying the coupled distribution function to the
// one with uniform leading weights; they agree at every q-adic point.
inline std::pair<Rational, Rational> base_change_sides(const SystemConfig& cfg,
                                                       const WeightVec& s,
                                                       const QAdicPoint& x) {
  MeasureContext coupled(cfg, s, s);
  MeasureContext uniform_mc(cfg, WeightVec::uniform(cfg.q()), s);
  Rational lhs = cdf(coupled, x);
  int cell = static_cast<int>(locate(x, 1).index());
  Rational rhs = cfg.q() * s[cell] * (cdf(uniform_mc, x) - x.value());
  for (int n = 0; n < cfg.q(); ++n)
    rhs += cfg.q() * s[n] * lebesgue_cell_integral(cfg, n, x);
  return {lhs, rhs};
}

}  // namespace qtakagi
