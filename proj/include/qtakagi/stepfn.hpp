#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qtakagi/core.hpp"

namespace qtakagi {

// A function on [0,1] that is constant on the level-m cells, stored as the
// dense table of its q^m values.
class StepFunction {
 public:
  StepFunction(int q, int level, std::vector<Rational> values)
      : q_(q), level_(level), values_(std::move(values)) {
    std::int64_t expected = table_size(q_, level_);
    if (static_cast<std::int64_t>(values_.size()) != expected)
      throw ConfigError("step function table has wrong size");
  }

  static StepFunction constant(int q, Rational c) {
    return StepFunction(q, 0, std::vector<Rational>{std::move(c)});
  }

  static StepFunction indicator(const QAdicInterval& iv) {
    std::vector<Rational> v(static_cast<std::size_t>(table_size(iv.q(), iv.level())), 0);
    v[static_cast<std::size_t>(iv.index())] = 1;
    return StepFunction(iv.q(), iv.level(), std::move(v));
  }

  int q() const noexcept { return q_; }
  int level() const noexcept { return level_; }
  const std::vector<Rational>& values() const noexcept { return values_; }
  const Rational& operator[](std::int64_t cell) const {
    return values_[static_cast<std::size_t>(cell)];
  }

  const Rational& value_at(const QAdicPoint& x) const {
    return values_[static_cast<std::size_t>(locate(x, level_).index())];
  }

  // Same pointwise function on a finer partition: each entry repeats over the
  // q^{m'-m} descendant cells.
  StepFunction releveled(int new_level) const {
    if (new_level < level_) throw ConfigError("cannot relevel to a coarser partition");
    if (new_level == level_) return *this;
    std::int64_t block = table_size(q_, new_level - level_);
    std::vector<Rational> out(static_cast<std::size_t>(table_size(q_, new_level)));
    for (std::size_t n = 0; n < out.size(); ++n)
      out[n] = values_[n / static_cast<std::size_t>(block)];
    return StepFunction(q_, new_level, std::move(out));
  }

 private:
  int q_;
  int level_;
  std::vector<Rational> values_;
};

inline bool step_equal(const StepFunction& a, const StepFunction& b) {
  if (a.q() != b.q()) return false;
  int level = std::max(a.level(), b.level());
  return a.releveled(level).values() == b.releveled(level).values();
}

namespace detail {
template <typename Op>
StepFunction step_zip(const StepFunction& a, const StepFunction& b, Op op) {
  if (a.q() != b.q()) throw ConfigError("step functions over different bases");
  int level = std::max(a.level(), b.level());
  StepFunction fa = a.releveled(level), fb = b.releveled(level);
  std::vector<Rational> out(fa.values().size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = op(fa[static_cast<std::int64_t>(n)], fb[static_cast<std::int64_t>(n)]);
  return StepFunction(a.q(), level, std::move(out));
}
}  // namespace detail

inline StepFunction step_add(const StepFunction& a, const StepFunction& b) {
  return detail::step_zip(a, b, [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

inline StepFunction step_multiply(const StepFunction& a, const StepFunction& b) {
  return detail::step_zip(a, b, [](const Rational& x, const Rational& y) { return Rational(x * y); });
}

inline StepFunction step_scale(const StepFunction& f, const Rational& c) {
  std::vector<Rational> out(f.values().size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = c * f[static_cast<std::int64_t>(n)];
  return StepFunction(f.q(), f.level(), std::move(out));
}

inline StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  return step_add(a, b);
}
inline StepFunction operator*(const StepFunction& a, const StepFunction& b) {
  return step_multiply(a, b);
}
inline StepFunction operator-(const StepFunction& a, const StepFunction& b) {
  return step_add(a, step_scale(b, make_rational(-1)));
}

// Level-2 selector of the cells whose twisted second digit is l: equal to 1
// on I_2(b1 b0) exactly when sigma^{b1}(b0) = l. The q selectors partition
// the unit interval.
inline StepFunction digit_selector(const SystemConfig& cfg, int l) {
  int q = cfg.q();
  if (l < 0 || l >= q) throw ConfigError("selector digit out of range");
  std::vector<Rational> v(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0);
  for (int b1 = 0; b1 < q; ++b1)
    for (int b0 = 0; b0 < q; ++b0)
      if (cfg.sigma_apply(b1, b0) == l)
        v[static_cast<std::size_t>(b1 * q + b0)] = 1;
  return StepFunction(q, 2, std::move(v));
}

// The mean-zero integrand of every Takagi construction:
// selector(l)/r_l - selector(q-1)/r_{q-1}, for 0 <= l <= q-2.
inline StepFunction selector_diff(const SystemConfig& cfg, const WeightVec& r, int l) {
  int q = cfg.q();
  if (l < 0 || l > q - 2) throw ConfigError("selector_diff index must be <= q-2");
  std::vector<Rational> v(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0);
  for (int b1 = 0; b1 < q; ++b1)
    for (int b0 = 0; b0 < q; ++b0) {
      int twisted = cfg.sigma_apply(b1, b0);
      if (twisted == l)
        v[static_cast<std::size_t>(b1 * q + b0)] = 1 / r[l];
      else if (twisted == q - 1)
        v[static_cast<std::size_t>(b1 * q + b0)] = -1 / r[q - 1];
    }
  return StepFunction(q, 2, std::move(v));
}

// f composed with the i-fold shift: a level-(m+i) function whose value at the
// digit word b_{i-1}..b_0 a_{m-1}..a_0 is the value of f at a_{m-1}..a_0.
// Pure index arithmetic on the low digits, never sampling.
inline StepFunction compose_shift(const StepFunction& f, int i) {
  if (i < 0) throw ConfigError("shift count must be >= 0");
  if (i == 0) return f;
  int q = f.q();
  std::int64_t low = table_size(q, f.level());
  std::vector<Rational> out(static_cast<std::size_t>(table_size(q, f.level() + i)));
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = f[static_cast<std::int64_t>(n) % low];
  return StepFunction(q, f.level() + i, std::move(out));
}

// One-step Radon-Nikodym factor: value s_t/r_t on I_2(b1 b0) where
// t = sigma^{b1}(b0).
inline StepFunction rn_step(const SystemConfig& cfg, const WeightVec& s,
                            const WeightVec& r) {
  int q = cfg.q();
  std::vector<Rational> v(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
  for (int b1 = 0; b1 < q; ++b1)
    for (int b0 = 0; b0 < q; ++b0) {
      int t = cfg.sigma_apply(b1, b0);
      v[static_cast<std::size_t>(b1 * q + b0)] = s[t] / r[t];
    }
  return StepFunction(q, 2, std::move(v));
}

}  // namespace qtakagi
