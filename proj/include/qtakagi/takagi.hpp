#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qtakagi/core.hpp"
#include "qtakagi/measure.hpp"
#include "qtakagi/stepfn.hpp"

namespace qtakagi {

// All assignments of |u| ordered slots to variable indices 0..q-2 with the
// multiplicities prescribed by u, in lexicographic order. There are |u|!/u!
// of them.
inline std::vector<std::vector<int>> slot_assignments(const SystemConfig& cfg,
                                                      const MultiIndex& u) {
  if (u.q() != cfg.q()) throw ConfigError("multi-index base mismatch");
  if (u.total() == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  std::vector<int> seq;
  for (int l = 0; l <= cfg.q() - 2; ++l)
    seq.insert(seq.end(), static_cast<std::size_t>(u.order(l)), l);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

namespace detail {

inline std::vector<StepFunction> selector_diffs(const SystemConfig& cfg,
                                                const WeightVec& r) {
  std::vector<StepFunction> diffs;
  diffs.reserve(static_cast<std::size_t>(cfg.q() - 1));
  for (int l = 0; l <= cfg.q() - 2; ++l) diffs.push_back(selector_diff(cfg, r, l));
  return diffs;
}

// Work limit on the tuple enumeration of the direct form.
inline void direct_form_guard(const MultiIndex& u, int k) {
  int s = u.total();
  Integer tuples = 0;
  if (k >= 0 && k + 1 >= s)
    mpz_bin_uiui(tuples.get_mpz_t(), static_cast<unsigned long>(k + 1),
                 static_cast<unsigned long>(s));
  Integer fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(s));
  Integer arrangements = fact / u.factorial_product();
  if (tuples * arrangements > 100000)
    throw CombinatorialGuard("direct form would enumerate " +
                             Integer(tuples * arrangements).get_str() + " integrands");
}

// Value table at level L of the product over m of
// selector_diff(psi[m]) composed with the tuple[m]-fold shift.
inline std::vector<Rational> tuple_product_table(const SystemConfig& cfg,
                                                 const std::vector<StepFunction>& diffs,
                                                 const std::vector<int>& psi,
                                                 const std::vector<int>& tuple, int L) {
  std::int64_t size = table_size(cfg.q(), L);
  std::int64_t q2 = static_cast<std::int64_t>(cfg.q()) * cfg.q();
  std::vector<Rational> out(static_cast<std::size_t>(size));
  std::vector<std::int64_t> div(tuple.size());
  for (std::size_t m = 0; m < tuple.size(); ++m)
    div[m] = checked_pow_i64(cfg.q(), L - 2 - tuple[m]);
  for (std::int64_t n = 0; n < size; ++n) {
    Rational p = diffs[static_cast<std::size_t>(psi[0])][(n / div[0]) % q2];
    for (std::size_t m = 1; m < tuple.size(); ++m) {
      if (sgn(p) == 0) break;
      p *= diffs[static_cast<std::size_t>(psi[m])][(n / div[m]) % q2];
    }
    out[static_cast<std::size_t>(n)] = std::move(p);
  }
  return out;
}

template <typename Fn>
void for_each_increasing_tuple(int count, int max_value, Fn&& fn) {
  if (count == 0 || max_value + 1 < count) return;
  std::vector<int> tuple(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) tuple[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(const_cast<const std::vector<int>&>(tuple));
    int pos = count - 1;
    while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == max_value - (count - 1 - pos))
      --pos;
    if (pos < 0) break;
    ++tuple[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < count; ++i)
      tuple[static_cast<std::size_t>(i)] = tuple[static_cast<std::size_t>(i - 1)] + 1;
  }
}

struct TakagiCtx {
  const SystemConfig& cfg;
  const WeightVec& r;
  std::vector<StepFunction> diffs;
};

// Partial sums of the first-order series. The j-th term integrates against
// the context's own measure for j = 0 and against the measure whose leading
// weights are r permuted by sigma^{(j-th digit of x)} for j >= 1; this is the
// unique reading under which the series reproduces the tuple-sum form for
// every choice of leading weights. out, when given, receives the truncation
// value for each k = 0..kmax.
inline Rational first_order_series(const TakagiCtx& ctx, const WeightVec& d, int l,
                                   int kmax, const QAdicPoint& x,
                                   std::vector<Rational>* out) {
  const SystemConfig& cfg = ctx.cfg;
  Rational acc = 0;
  Rational prefix = 1;
  Rational inv_q = make_rational(1, cfg.q());
  for (int j = 0; j <= kmax; ++j) {
    QAdicPoint y = phi_apply(x, j);
    if (!y.is_zero()) {
      if (j == 0) {
        acc += integrate_impl(cfg, d, ctx.r, ctx.diffs[static_cast<std::size_t>(l)], y);
      } else {
        WeightVec leading = permuted_weights(cfg, ctx.r, x.digit(j));
        acc += prefix *
               integrate_impl(cfg, leading, ctx.r, ctx.diffs[static_cast<std::size_t>(l)], y);
      }
    }
    if (out) out->push_back(acc * inv_q);
    if (j < kmax)
      prefix *= (j == 0 ? d[x.digit(1)]
                        : ctx.r[cfg.sigma_apply(x.digit(j), x.digit(j + 1))]);
  }
  return acc * inv_q;
}

inline Rational takagi_rec(const TakagiCtx& ctx, const WeightVec& d,
                           const std::vector<int>& u, int total, int k,
                           const QAdicPoint& x) {
  if (k < 0 || x.is_zero()) return Rational(0);
  if (total == 1) {
    int l = 0;
    while (u[static_cast<std::size_t>(l)] == 0) ++l;
    return first_order_series(ctx, d, l, k, x, nullptr);
  }
  int jmax = k - total + 1;
  if (jmax < 0) return Rational(0);
  const SystemConfig& cfg = ctx.cfg;
  Rational acc = 0;
  Rational prefix = d[x.digit(1)];  // mass of the level-(j+1) cell containing x
  for (int j = 0; j <= jmax; ++j) {
    QAdicPoint inner_x = phi_apply(x, j + 1);
    if (!inner_x.is_zero()) {
      QAdicPoint y = phi_apply(x, j);
      WeightVec leading = permuted_weights(cfg, ctx.r, x.digit(j + 1));
      for (int alpha = 0; alpha <= cfg.q() - 2; ++alpha) {
        if (u[static_cast<std::size_t>(alpha)] == 0) continue;
        const Rational& factor = ctx.diffs[static_cast<std::size_t>(alpha)].value_at(y);
        if (sgn(factor) == 0) continue;
        std::vector<int> lowered = u;
        --lowered[static_cast<std::size_t>(alpha)];
        acc += factor * prefix *
               takagi_rec(ctx, leading, lowered, total - 1, k - j - 1, inner_x);
      }
    }
    if (j < jmax)
      prefix *= ctx.r[cfg.sigma_apply(x.digit(j + 1), x.digit(j + 2))];
  }
  return acc;
}

}  // namespace detail

// Truncated generalized Takagi function, direct form: the sum over increasing
// shift tuples within 0..k and over all slot assignments of the integral of
// the product of shifted selector differences, divided by q. Serves as the
// cross-check route; cost grows binomially in k.
inline Rational takagi_truncated_direct(const MeasureContext& mc, const MultiIndex& u,
                                        int k, const QAdicPoint& x) {
  if (u.total() == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  detail::direct_form_guard(u, k);
  int s = u.total();
  if (k < 0 || k + 1 < s || x.is_zero()) return Rational(0);
  std::vector<StepFunction> diffs = detail::selector_diffs(mc.cfg, mc.r);
  std::vector<std::vector<int>> psis = slot_assignments(mc.cfg, u);
  Rational acc = 0;
  detail::for_each_increasing_tuple(s, k, [&](const std::vector<int>& tuple) {
    int L = tuple.back() + 2;
    for (const std::vector<int>& psi : psis) {
      StepFunction product(mc.cfg.q(), L,
                           detail::tuple_product_table(mc.cfg, diffs, psi, tuple, L));
      acc += integrate(mc, product, x);
    }
  });
  return acc / mc.cfg.q();
}

// Direct-form values at every grid point m/q^grid_level, m = 0..q^grid_level,
// sharing the integrand tables and one cumulative mass pass across the whole
// grid. Same route as takagi_truncated_direct, amortized.
inline std::vector<Rational> takagi_truncated_direct_grid(const MeasureContext& mc,
                                                          const MultiIndex& u, int k,
                                                          int grid_level) {
  if (u.total() == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  if (grid_level < 0) throw ConfigError("grid level must be >= 0");
  detail::direct_form_guard(u, k);
  int s = u.total();
  std::int64_t points = table_size(mc.cfg.q(), grid_level) + 1;
  if (k < 0 || k + 1 < s)
    return std::vector<Rational>(static_cast<std::size_t>(points), Rational(0));
  int L = std::max(grid_level, k + 2);
  std::int64_t size = table_size(mc.cfg.q(), L);
  std::vector<StepFunction> diffs = detail::selector_diffs(mc.cfg, mc.r);
  std::vector<std::vector<int>> psis = slot_assignments(mc.cfg, u);
  std::vector<Rational> sum(static_cast<std::size_t>(size), Rational(0));
  detail::for_each_increasing_tuple(s, k, [&](const std::vector<int>& tuple) {
    for (const std::vector<int>& psi : psis) {
      std::vector<Rational> table =
          detail::tuple_product_table(mc.cfg, diffs, psi, tuple, L);
      for (std::size_t n = 0; n < table.size(); ++n)
        if (sgn(table[n]) != 0) sum[n] += table[n];
    }
  });
  std::vector<Rational> masses = mass_table(mc, L);
  std::vector<Rational> out(static_cast<std::size_t>(points));
  out[0] = 0;
  Rational running = 0;
  std::int64_t stride = size / (points - 1);
  for (std::int64_t m = 1; m < points; ++m) {
    for (std::int64_t n = (m - 1) * stride; n < m * stride; ++n)
      running += sum[static_cast<std::size_t>(n)] * masses[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(m)] = running / mc.cfg.q();
  }
  return out;
}

// Truncated generalized Takagi function, recursive form: order reduction in
// |u| with a one-dimensional series at the base. Production path, linear in
// k per order.
inline Rational takagi_truncated(const MeasureContext& mc, const MultiIndex& u, int k,
                                 const QAdicPoint& x) {
  if (u.total() == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  detail::TakagiCtx ctx{mc.cfg, mc.r, detail::selector_diffs(mc.cfg, mc.r)};
  return detail::takagi_rec(ctx, mc.d, u.orders(), u.total(), k, x);
}

// Truncations of the first-order function for every k = 0..kmax in one pass.
inline std::vector<Rational> takagi_first_order_partials(const MeasureContext& mc, int l,
                                                         int kmax, const QAdicPoint& x) {
  if (l < 0 || l > mc.cfg.q() - 2) throw ConfigError("selector index out of range");
  detail::TakagiCtx ctx{mc.cfg, mc.r, detail::selector_diffs(mc.cfg, mc.r)};
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(kmax + 1));
  detail::first_order_series(ctx, mc.d, l, kmax, x, &out);
  return out;
}

// Exact value of the generalized Takagi function at a q-adic point. Every
// series term beyond the level of x vanishes: the shifted point reaches 0,
// and the function of order |u| vanishes at 0 (induction over |u|, base case
// an empty integral). Hence the truncation at k = level(x) is already exact.
inline Rational takagi_function(const MeasureContext& mc, const MultiIndex& u,
                                const QAdicPoint& x) {
  if (u.total() == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  return takagi_truncated(mc, u, x.level(), x);
}

// Uniform bound on |T| over the whole interval, any leading weights:
// (q-1)^{|u|-1}/(q max r) * (2/(min r) * 1/(1-max r))^{|u|}.
inline Rational takagi_sup_bound(const SystemConfig& cfg, const WeightVec& r,
                                 const MultiIndex& u) {
  int s = u.total();
  if (s == 0) throw EmptyMultiIndex("derivative order |u| must be >= 1");
  const Rational& rmin = r.min_component();
  const Rational& rmax = r.max_component();
  Rational base = Rational(2) / rmin / (1 - rmax);
  return rational_pow(make_rational(cfg.q() - 1), s - 1) / (cfg.q() * rmax) *
         rational_pow(base, s);
}

// Certified bound on |T - D_k| for first-order indices, uniform in the
// leading weights, the selector index, and x:
// 2/(q min r) * (max r)^k / (1 - max r).
inline Rational takagi_tail_bound(const SystemConfig& cfg, const WeightVec& r, int k) {
  if (k < 0) throw ConfigError("truncation depth must be >= 0");
  const Rational& rmin = r.min_component();
  const Rational& rmax = r.max_component();
  return Rational(2) / (cfg.q() * rmin) * rational_pow(rmax, k) / (1 - rmax);
}

}  // namespace qtakagi
