#pragma once

// Shared helpers for the test suites and the acceptance runner.

#include <string>
#include <vector>

#include "motifauto/alphabet.hpp"
#include "motifauto/polynomial.hpp"
#include "motifauto/rational.hpp"

namespace testsupport {

using motifauto::Rational;
using motifauto::RationalPoly;

inline Rational R(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// p as a polynomial in itself, and q = 1 - p.
inline RationalPoly P() { return RationalPoly::x(); }
inline RationalPoly Q() { return RationalPoly::constant(1) - RationalPoly::x(); }

inline RationalPoly C(const Rational& c) { return RationalPoly::constant(c); }

/// Lagrange interpolation through (xs[i], ys[i]).
inline RationalPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  RationalPoly out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    RationalPoly basis = RationalPoly::constant(1);
    Rational scale = 1;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      basis = basis * RationalPoly({Rational(-xs[j]), Rational(1)});
      scale *= xs[i] - xs[j];
    }
    out = out + basis * Rational(ys[i] / scale);
  }
  return out;
}

/// Rational probabilities of 'a' used for interpolation in p.
inline std::vector<Rational> sample_ps(std::size_t count) {
  static const std::vector<Rational> ps = {R(1, 2), R(1, 3), R(2, 3), R(1, 5), R(3, 7),  R(5, 11), R(2, 9),
                                           R(7, 10), R(4, 13), R(9, 14), R(3, 17), R(11, 19), R(13, 23), R(6, 29)};
  return {ps.begin(), ps.begin() + static_cast<long>(count)};
}

/// Fits a polynomial in p through f at `count` sample points.
template <typename F>
RationalPoly interpolate_in_p(F&& f, std::size_t count) {
  std::vector<Rational> xs = sample_ps(count), ys;
  for (const auto& p : xs) ys.push_back(f(p));
  return interpolate(xs, ys);
}

}  // namespace testsupport
