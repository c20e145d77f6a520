#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include "motifauto/errors.hpp"

namespace motifauto {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "a/b" (or a bare integer when `allow_integer`) into a canonical rational.
inline Rational parse_rational(std::string_view text, bool allow_integer = true) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  auto slash = s.find('/');
  if (slash == std::string::npos && !allow_integer)
    throw InvalidArgumentError("expected a rational of the form a/b, got '" + s + "'");
  auto valid_int = [](std::string_view part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false))
    throw InvalidArgumentError("malformed rational '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  Integer d(den);
  if (d == 0) throw InvalidArgumentError("zero denominator in '" + s + "'");
  Rational r(Integer(num), d);
  r.canonicalize();
  return r;
}

/// Exact "num/den" rendering ("num" when the denominator is 1).
inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Decimal rendering with 15 significant digits; derived from the exact value.
inline std::string to_decimal(const Rational& r) {
  if (r == 0) return "0";
  mpf_class f(r, 256);
  char buf[128];
  gmp_snprintf(buf, sizeof buf, "%.15Fg", f.get_mpf_t());
  return buf;
}

/// Natural logarithm of |r|, finite for any non-zero rational regardless of magnitude.
inline long double log_abs(const Rational& r) {
  auto log_z = [](const mpz_class& z) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(static_cast<long double>(m))) +
           static_cast<long double>(e) * std::log(2.0L);
  };
  return log_z(r.get_num()) - log_z(r.get_den());
}

inline Rational pow(const Rational& base, unsigned long exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  out.canonicalize();
  return out;
}

}  // namespace motifauto
