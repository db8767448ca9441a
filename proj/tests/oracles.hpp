#pragma once

// Independent reference routes used only by tests. These deliberately avoid
// the library's closed forms: permutation powers are composed literally, and
// masses follow the level-by-level recursion digit pair by digit pair.

#include <vector>

#include "qtakagi/qtakagi.hpp"

namespace oracles {

using qtakagi::Rational;

inline std::vector<int> compose(const std::vector<int>& outer,
                                const std::vector<int>& inner) {
  std::vector<int> out(inner.size());
  for (std::size_t j = 0; j < inner.size(); ++j)
    out[j] = outer[static_cast<std::size_t>(inner[j])];
  return out;
}

// sigma^n by n literal compositions, no modular reduction.
inline std::vector<int> literal_power(const std::vector<int>& sigma, long long n) {
  std::vector<int> out(sigma.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<int>(j);
  for (long long i = 0; i < n; ++i) out = compose(sigma, out);
  return out;
}

// Level-by-level mass recursion: mass(level k, cell n) with n = q*j + l is
// mass(k-1, j) times r[sigma^j(l)], sigma^j composed literally.
inline Rational recursive_mass(int q, const std::vector<int>& sigma,
                               const std::vector<Rational>& d,
                               const std::vector<Rational>& r, int level,
                               long long index) {
  if (level == 0) return Rational(1);
  if (level == 1) return d[static_cast<std::size_t>(index)];
  long long j = index / q;
  int l = static_cast<int>(index % q);
  std::vector<int> power = literal_power(sigma, j);
  return recursive_mass(q, sigma, d, r, level - 1, j) *
         r[static_cast<std::size_t>(power[static_cast<std::size_t>(l)])];
}

// Distribution function by brute enumeration of every level-K cell below x.
inline Rational brute_cdf(int q, const std::vector<int>& sigma,
                          const std::vector<Rational>& d,
                          const std::vector<Rational>& r,
                          const qtakagi::QAdicPoint& x) {
  if (x.is_one()) return Rational(1);
  Rational total = 0;
  for (long long n = 0; n < x.numerator(); ++n)
    total += recursive_mass(q, sigma, d, r, x.level(), n);
  return total;
}

// Classical Takagi function via its dyadic distance series, finite at dyadic
// points.
inline Rational classical_tau(const qtakagi::QAdicPoint& x) {
  Rational tau = 0;
  Rational t = x.value();
  for (int n = 0; n < x.level(); ++n) {
    Rational dist = t <= 1 - t ? t : 1 - t;
    tau += qtakagi::rational_pow(qtakagi::make_rational(1, 2), n) * dist;
    t = 2 * t;
    if (t >= 1) t -= 1;
  }
  return tau;
}

}  // namespace oracles
