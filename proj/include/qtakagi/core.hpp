#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtakagi/errors.hpp"
#include "qtakagi/rational.hpp"

namespace qtakagi {

// Dense tables of q^m values are refused beyond this size.
inline constexpr std::int64_t kTableCap = std::int64_t{1} << 20;

// q^k as int64, throwing instead of overflowing.
inline std::int64_t checked_pow_i64(int q, int k) {
  if (k < 0) throw LevelCapExceeded("negative level");
  std::int64_t out = 1;
  for (int i = 0; i < k; ++i) {
    if (out > (std::int64_t{1} << 62) / q)
      throw LevelCapExceeded("level " + std::to_string(k) + " too deep for base " +
                             std::to_string(q));
    out *= q;
  }
  return out;
}

// Size of a level-m table, enforcing the global cap.
inline std::int64_t table_size(int q, int m) {
  std::int64_t size = checked_pow_i64(q, m);
  if (size > kTableCap)
    throw LevelCapExceeded("table of " + std::to_string(q) + "^" + std::to_string(m) +
                           " entries exceeds the cap");
  return size;
}

// Base q >= 2 together with a permutation sigma of {0,...,q-1} satisfying
// sigma^q = id. All q distinct powers of sigma are precomputed.
class SystemConfig {
 public:
  SystemConfig(int q, std::vector<int> sigma) : q_(q), sigma_(std::move(sigma)) {
    if (q_ < 2) throw ConfigError("q must be >= 2");
    if (static_cast<int>(sigma_.size()) != q_)
      throw ConfigError("sigma must list exactly q images");
    std::vector<bool> seen(static_cast<std::size_t>(q_), false);
    for (int img : sigma_) {
      if (img < 0 || img >= q_)
        throw NotABijection("sigma image " + std::to_string(img) + " out of range");
      if (seen[static_cast<std::size_t>(img)])
        throw NotABijection("sigma repeats image " + std::to_string(img));
      seen[static_cast<std::size_t>(img)] = true;
    }
    powers_.resize(static_cast<std::size_t>(q_));
    powers_[0].resize(static_cast<std::size_t>(q_));
    std::iota(powers_[0].begin(), powers_[0].end(), 0);
    for (int t = 1; t < q_; ++t) {
      powers_[static_cast<std::size_t>(t)].resize(static_cast<std::size_t>(q_));
      for (int j = 0; j < q_; ++j)
        powers_[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] =
            sigma_[static_cast<std::size_t>(powers_[static_cast<std::size_t>(t - 1)]
                                                   [static_cast<std::size_t>(j)])];
    }
    for (int j = 0; j < q_; ++j) {
      int once_more = sigma_[static_cast<std::size_t>(
          powers_[static_cast<std::size_t>(q_ - 1)][static_cast<std::size_t>(j)])];
      if (once_more != j)
        throw OrderViolation("sigma^q(" + std::to_string(j) + ") = " +
                                 std::to_string(once_more) + " != " + std::to_string(j),
                             j);
    }
  }

  int q() const noexcept { return q_; }
  const std::vector<int>& sigma() const noexcept { return sigma_; }

  // Image table of sigma^(n mod q); valid for any n >= 0 since sigma^q = id.
  const std::vector<int>& sigma_power(std::int64_t n) const {
    return powers_[static_cast<std::size_t>(n % q_)];
  }

  // sigma^n(j)
  int sigma_apply(std::int64_t n, int j) const {
    return sigma_power(n)[static_cast<std::size_t>(j)];
  }

  // sigma^{-n}(j), computed as sigma^{q - (n mod q)}.
  int sigma_inv_apply(std::int64_t n, int j) const {
    std::int64_t t = n % q_;
    return sigma_power(t == 0 ? 0 : q_ - t)[static_cast<std::size_t>(j)];
  }

  bool is_identity() const {
    for (int j = 0; j < q_; ++j)
      if (sigma_[static_cast<std::size_t>(j)] != j) return false;
    return true;
  }

  // Harness self-test fixture: returns a copy whose first power table is
  // replaced by the identity, silently breaking every twisted computation
  // while leaving sigma = id configurations untouched.
  SystemConfig corrupted_powers_for_testing() const {
    SystemConfig broken = *this;
    std::iota(broken.powers_[1].begin(), broken.powers_[1].end(), 0);
    return broken;
  }

 private:
  int q_;
  std::vector<int> sigma_;
  std::vector<std::vector<int>> powers_;  // powers_[t] = sigma^t, t = 0..q-1
};

inline SystemConfig validate_config(int q, const std::vector<int>& sigma) {
  return SystemConfig(q, sigma);
}

inline std::vector<int> sigma_power(const SystemConfig& cfg, std::int64_t n) {
  return cfg.sigma_power(n);
}

// A strictly positive probability vector of length q, exact.
class WeightVec {
 public:
  explicit WeightVec(std::vector<Rational> components) : w_(std::move(components)) {
    if (w_.size() < 2) throw ConfigError("weight vector needs at least 2 components");
    Rational sum = 0;
    for (const Rational& c : w_) {
      if (sgn(c) <= 0 || c >= 1)
        throw ConfigError("weight component " + to_fraction_string(c) +
                          " not strictly between 0 and 1");
      sum += c;
    }
    if (sum != 1) throw ConfigError("weight components must sum to 1");
  }

  // The last component is determined as 1 minus the rest.
  static WeightVec from_prefix(int q, std::vector<Rational> first) {
    if (static_cast<int>(first.size()) != q - 1)
      throw ConfigError("expected q-1 leading weight components");
    Rational rest = 1;
    for (const Rational& c : first) rest -= c;
    first.push_back(rest);
    return WeightVec(std::move(first));
  }

  static WeightVec uniform(int q) {
    return WeightVec(std::vector<Rational>(static_cast<std::size_t>(q),
                                           make_rational(1, q)));
  }

  int q() const noexcept { return static_cast<int>(w_.size()); }
  const Rational& operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
  const std::vector<Rational>& components() const noexcept { return w_; }

  const Rational& min_component() const {
    return *std::min_element(w_.begin(), w_.end());
  }
  const Rational& max_component() const {
    return *std::max_element(w_.begin(), w_.end());
  }

  bool operator==(const WeightVec& other) const { return w_ == other.w_; }

 private:
  std::vector<Rational> w_;
};

// Component j of the result is r[sigma^n(j)]; a permutation of r, so again a
// valid weight vector.
inline WeightVec permuted_weights(const SystemConfig& cfg, const WeightVec& r,
                                  std::int64_t n) {
  std::vector<Rational> out(static_cast<std::size_t>(r.q()));
  for (int j = 0; j < r.q(); ++j)
    out[static_cast<std::size_t>(j)] = r[cfg.sigma_apply(n, j)];
  return WeightVec(std::move(out));
}

class QAdicPoint;

// I_k(n) = [n/q^k, (n+1)/q^k), the last interval of each level closed.
class QAdicInterval {
 public:
  QAdicInterval(int q, int level, std::int64_t index) : q_(q), level_(level), index_(index) {
    if (q_ < 2) throw ConfigError("q must be >= 2");
    if (level_ < 0) throw ConfigError("interval level must be >= 0");
    std::int64_t cells = checked_pow_i64(q_, level_);
    if (index_ < 0 || index_ >= cells)
      throw ConfigError("interval index out of range at level " + std::to_string(level_));
  }

  static QAdicInterval from_digits(int q, const std::vector<int>& word) {
    std::int64_t index = 0;
    for (int d : word) {
      if (d < 0 || d >= q) throw ConfigError("digit out of range");
      index = index * q + d;
    }
    return QAdicInterval(q, static_cast<int>(word.size()), index);
  }

  int q() const noexcept { return q_; }
  int level() const noexcept { return level_; }
  std::int64_t index() const noexcept { return index_; }

  // Digit word n_{k-1}...n_0, most significant first; round-trips with (k, n).
  std::vector<int> digits() const {
    std::vector<int> word(static_cast<std::size_t>(level_));
    std::int64_t n = index_;
    for (int i = level_ - 1; i >= 0; --i) {
      word[static_cast<std::size_t>(i)] = static_cast<int>(n % q_);
      n /= q_;
    }
    return word;
  }

  Rational lower() const {
    return make_rational(Integer(static_cast<long>(index_)),
                         Integer(static_cast<long>(checked_pow_i64(q_, level_))));
  }
  Rational upper() const {
    return make_rational(Integer(static_cast<long>(index_ + 1)),
                         Integer(static_cast<long>(checked_pow_i64(q_, level_))));
  }

  bool operator==(const QAdicInterval& o) const {
    return q_ == o.q_ && level_ == o.level_ && index_ == o.index_;
  }

 private:
  int q_;
  int level_;
  std::int64_t index_;
};

// x = m/q^K in [0,1], kept canonical: trailing zero digits stripped, so K is
// minimal. x = 1 canonicalizes to (m, K) = (1, 0).
class QAdicPoint {
 public:
  QAdicPoint(int q, std::int64_t numerator, int level)
      : q_(q), num_(numerator), level_(level) {
    if (q_ < 2) throw ConfigError("q must be >= 2");
    if (level_ < 0) throw ConfigError("point level must be >= 0");
    std::int64_t scale = checked_pow_i64(q_, level_);
    if (num_ < 0 || num_ > scale) throw ConfigError("x out of [0,1]");
    while (level_ > 0 && num_ % q_ == 0) {
      num_ /= q_;
      --level_;
    }
  }

  // Exact conversion from a general rational; nullopt when the value is not
  // of the form m/q^K or lies outside [0,1]. Throws only for absurd depths.
  static std::optional<QAdicPoint> from_rational(int q, const Rational& x) {
    if (sgn(x) < 0 || x > 1) return std::nullopt;
    Integer den = x.get_den();
    int level = 0;
    Integer qz(q);
    while (den != 1) {
      Integer g;
      mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), qz.get_mpz_t());
      if (g == 1) return std::nullopt;
      mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
      ++level;
      if (level > 62) throw LevelCapExceeded("q-adic level too deep");
    }
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(q),
                  static_cast<unsigned long>(level));
    Integer num = x.get_num() * (scale / x.get_den());
    if (!num.fits_slong_p()) throw LevelCapExceeded("q-adic numerator too large");
    return QAdicPoint(q, num.get_si(), level);
  }

  int q() const noexcept { return q_; }
  int level() const noexcept { return level_; }
  std::int64_t numerator() const noexcept { return num_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_one() const noexcept { return level_ == 0 && num_ == 1; }

  Rational value() const {
    return make_rational(Integer(static_cast<long>(num_)),
                         Integer(static_cast<long>(checked_pow_i64(q_, level_))));
  }

  // i-th base-q digit, 1-indexed from the most significant. Digits beyond the
  // level are 0; the digits of x = 1 are all q-1, matching the convention
  // that 1 lies in the last interval of every level.
  int digit(int i) const {
    if (is_one()) return q_ - 1;
    if (i > level_) return 0;
    return static_cast<int>((num_ / checked_pow_i64(q_, level_ - i)) % q_);
  }

  bool operator==(const QAdicPoint& o) const {
    return q_ == o.q_ && num_ == o.num_ && level_ == o.level_;
  }

 private:
  int q_;
  std::int64_t num_;
  int level_;
};

// Drops the i most significant digits: x -> q^i x (mod 1), except that 1 is a
// fixed point of the shift.
inline QAdicPoint phi_apply(const QAdicPoint& x, int i) {
  if (i < 0) throw ConfigError("shift count must be >= 0");
  if (x.is_one() || i == 0) return x;
  if (i >= x.level()) return QAdicPoint(x.q(), 0, 0);
  std::int64_t scale = checked_pow_i64(x.q(), x.level() - i);
  return QAdicPoint(x.q(), x.numerator() % scale, x.level() - i);
}

// The unique level-k interval containing x under the half-open convention;
// x = 1 falls in the closed last interval.
inline QAdicInterval locate(const QAdicPoint& x, int k) {
  if (k < 0) throw ConfigError("interval level must be >= 0");
  if (x.is_one()) return QAdicInterval(x.q(), k, checked_pow_i64(x.q(), k) - 1);
  std::int64_t index =
      k >= x.level() ? x.numerator() * checked_pow_i64(x.q(), k - x.level())
                     : x.numerator() / checked_pow_i64(x.q(), x.level() - k);
  return QAdicInterval(x.q(), k, index);
}

// Derivative orders over the free weight variables r_0..r_{q-2}; the last
// weight is dependent and is never differentiated.
class MultiIndex {
 public:
  MultiIndex(int q, std::vector<int> orders) : q_(q), u_(std::move(orders)) {
    if (q_ < 2) throw ConfigError("q must be >= 2");
    if (static_cast<int>(u_.size()) != q_ - 1)
      throw ConfigError("multi-index must have exactly q-1 entries");
    for (int v : u_)
      if (v < 0) throw ConfigError("multi-index entries must be >= 0");
  }

  static MultiIndex unit(int q, int l) {
    std::vector<int> u(static_cast<std::size_t>(q - 1), 0);
    if (l < 0 || l > q - 2) throw ConfigError("unit index out of range");
    u[static_cast<std::size_t>(l)] = 1;
    return MultiIndex(q, std::move(u));
  }

  int q() const noexcept { return q_; }
  const std::vector<int>& orders() const noexcept { return u_; }
  int order(int l) const { return u_[static_cast<std::size_t>(l)]; }

  int total() const { return std::accumulate(u_.begin(), u_.end(), 0); }

  // u! = product of the factorials of the entries.
  Integer factorial_product() const {
    Integer out = 1;
    for (int v : u_) {
      Integer f;
      mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(v));
      out *= f;
    }
    return out;
  }

  MultiIndex minus_unit(int l) const {
    if (l < 0 || l > q_ - 2 || u_[static_cast<std::size_t>(l)] == 0)
      throw ConfigError("cannot lower multi-index entry " + std::to_string(l));
    std::vector<int> u = u_;
    --u[static_cast<std::size_t>(l)];
    return MultiIndex(q_, std::move(u));
  }

  bool operator==(const MultiIndex& o) const { return q_ == o.q_ && u_ == o.u_; }

 private:
  int q_;
  std::vector<int> u_;
};

}  // namespace qtakagi
