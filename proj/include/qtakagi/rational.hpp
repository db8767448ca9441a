#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qtakagi/errors.hpp"

namespace qtakagi {

// All arithmetic in the library is exact; decimals appear only in rendering.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw ConfigError("rational with zero denominator");
  Rational r(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
  r.canonicalize();
  return r;
}

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw ConfigError("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// b^e for e >= 0, exact.
inline Rational rational_pow(const Rational& base, int exp) {
  if (exp < 0) throw ConfigError("rational_pow: negative exponent");
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num().get_mpz_t(), static_cast<unsigned long>(exp));
  mpz_pow_ui(d.get_mpz_t(), base.get_den().get_mpz_t(), static_cast<unsigned long>(exp));
  return Rational(n, d);  // coprime num/den stay coprime under powers
}

// Accepts "p", "-p", "p/q" with decimal digits only; rejects everything else.
inline std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') i = 1;
  std::size_t num_begin = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  if (i == num_begin) return std::nullopt;
  std::string num(text.substr(0, i));
  std::string den = "1";
  if (i < text.size()) {
    if (text[i] != '/') return std::nullopt;
    std::size_t den_begin = ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == den_begin || i != text.size()) return std::nullopt;
    den.assign(text.substr(den_begin));
  }
  Integer n(num), d(den);
  if (d == 0) return std::nullopt;
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// "p/q" (or "p" when the denominator is 1); exact, reparseable.
inline std::string to_fraction_string(const Rational& value) {
  return value.get_str();
}

namespace detail {
inline Integer pow10(long k) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k));
  return p;
}
// true iff |num/den| >= 10^k
inline bool magnitude_at_least(const Integer& num, const Integer& den, long k) {
  if (k >= 0) return num >= den * pow10(k);
  return num * pow10(-k) >= den;
}
}  // namespace detail

// Correctly rounded decimal rendering with `significant` significant digits
// (round half away from zero). Plain notation, trailing fractional zeros
// stripped. Deterministic across platforms.
inline std::string to_decimal_string(const Rational& value, int significant = 15) {
  if (sgn(value) == 0) return "0";
  Integer num = abs(value.get_num());
  Integer den = value.get_den();
  std::string ns = num.get_str(), ds = den.get_str();
  long e = static_cast<long>(ns.size()) - static_cast<long>(ds.size()) + 1;
  while (detail::magnitude_at_least(num, den, e)) ++e;
  while (!detail::magnitude_at_least(num, den, e - 1)) --e;
  // now 10^{e-1} <= |v| < 10^e; round |v|*10^{significant-e} to an integer
  long shift = significant - e;
  Integer scaled_num = num, scaled_den = den;
  if (shift >= 0)
    scaled_num *= detail::pow10(shift);
  else
    scaled_den *= detail::pow10(-shift);
  Integer digits_int, rem;
  mpz_fdiv_qr(digits_int.get_mpz_t(), rem.get_mpz_t(), scaled_num.get_mpz_t(),
              scaled_den.get_mpz_t());
  if (2 * rem >= scaled_den) ++digits_int;
  if (digits_int == detail::pow10(significant)) {  // rounding carried over
    digits_int = detail::pow10(significant - 1);
    ++e;
  }
  std::string digits = digits_int.get_str();
  std::string out;
  if (sgn(value) < 0) out += '-';
  if (e <= 0) {
    out += "0.";
    out.append(static_cast<std::size_t>(-e), '0');
    out += digits;
  } else if (e >= static_cast<long>(digits.size())) {
    out += digits;
    out.append(static_cast<std::size_t>(e) - digits.size(), '0');
    return out;  // integral rendering, nothing to strip
  } else {
    out += digits.substr(0, static_cast<std::size_t>(e));
    out += '.';
    out += digits.substr(static_cast<std::size_t>(e));
  }
  while (!out.empty() && out.back() == '0') out.pop_back();
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace qtakagi
