#pragma once

// Generating functions of embedded chains and what can be read off them.
//
// Both resolvents are rank-one updates: for a square M and vectors u, v,
//   v M^{-1} u = (det M - det(M - u v)) / det M,
// so only fraction-free determinants over the polynomial ring are needed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "motifauto/distributions.hpp"
#include "motifauto/embedding.hpp"
#include "motifauto/errors.hpp"
#include "motifauto/matrix.hpp"
#include "motifauto/polynomial.hpp"
#include "motifauto/ratfunc.hpp"

namespace motifauto {

inline constexpr std::size_t kDefaultGfStateCap = 64;

namespace detail {

inline std::vector<std::string> gf_names(std::size_t marks) {
  std::vector<std::string> names{"x"};
  for (std::size_t j = 1; j <= marks; ++j) names.push_back("y" + std::to_string(j));
  return names;
}

inline void check_gf_cap(std::size_t states, std::size_t cap) {
  if (states > cap)
    throw CapExceededError("cap-states", "generating function needs " + std::to_string(states) +
                                             " chain states, cap is " + std::to_string(cap));
}

/// x * v (I - x A)^{-1} u for polynomial-valued A, u, v.
inline RationalFunction rank_one_resolvent(const Matrix<Polynomial>& a, const std::vector<Polynomial>& u,
                                           const std::vector<Polynomial>& v, std::size_t nvars,
                                           std::vector<std::string> names) {
  const std::size_t n = a.rows();
  const Polynomial x = Polynomial::variable(nvars, 0);
  Matrix<Polynomial> m(n, n, Polynomial(nvars));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = -(x * a(i, j));
      if (i == j) m(i, j) += Polynomial::constant(nvars, 1);
    }
  Matrix<Polynomial> updated = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!u[i].is_zero() && !v[j].is_zero()) updated(i, j) -= u[i] * v[j];
  const Polynomial det = determinant(m);
  return {x * (det - determinant(updated)), det, std::move(names)};
}

}  // namespace detail

/// Resolvent x * mu_y (I - x P_y)^{-1} 1 in the variables x, y1..yk: the coefficient of
/// x^n y^m is the probability that n steps visit the marked classes m times. Entries
/// into a state (including the first step, through mu) carry the marks of its classes.
inline RationalFunction resolvent_gf(const MarkovEmbedding& emb, const std::vector<std::string>& marked,
                                     std::size_t cap = kDefaultGfStateCap) {
  detail::check_gf_cap(emb.size(), cap);
  const std::size_t nvars = marked.size() + 1;
  const std::size_t n = emb.size();
  std::vector<Polynomial> mark(n);
  {
    const auto ex = detail::mark_exponents(emb, marked);
    for (std::size_t i = 0; i < n; ++i) {
      Exponents e(nvars, 0);
      std::copy(ex[i].begin(), ex[i].end(), e.begin() + 1);
      mark[i] = Polynomial::monomial(e, 1);
    }
  }
  Matrix<Polynomial> a(n, n, Polynomial(nvars));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (emb.P(i, j) != 0) a(i, j) = mark[j] * emb.P(i, j);
  std::vector<Polynomial> ones(n, Polynomial::constant(nvars, 1));
  std::vector<Polynomial> mu(n, Polynomial(nvars));
  for (std::size_t i = 0; i < n; ++i) mu[i] = mark[i] * emb.mu[i];
  return detail::rank_one_resolvent(a, ones, mu, nvars, detail::gf_names(marked.size()));
}

/// Sum over n of Prob[T = n] x^n for the first entrance T into the stop classes.
inline RationalFunction sooner_gf(const MarkovEmbedding& emb, const std::vector<std::string>& stop_classes,
                                  std::size_t cap = kDefaultGfStateCap) {
  detail::check_gf_cap(emb.size(), cap);
  const auto stop = detail::class_union(emb, stop_classes);
  std::vector<std::size_t> free;
  Rational first = 0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    if (stop[i])
      first += emb.mu[i];
    else
      free.push_back(i);
  }
  const Polynomial x = Polynomial::variable(1, 0);
  const RationalFunction head(x * first, Polynomial::constant(1, 1), {"x"});
  const std::size_t m = free.size();
  if (m == 0) return head;
  Matrix<Polynomial> q(m, m, Polynomial(1));
  std::vector<Polynomial> nu(m, Polynomial(1)), exit(m, Polynomial(1));
  for (std::size_t r = 0; r < m; ++r) {
    nu[r] = Polynomial::constant(1, emb.mu[free[r]]);
    Rational out = 0;
    for (std::size_t j = 0; j < emb.size(); ++j)
      if (stop[j]) out += emb.P(free[r], j);
    exit[r] = Polynomial::constant(1, out);
    for (std::size_t c = 0; c < m; ++c) q(r, c) = Polynomial::constant(1, emb.P(free[r], free[c]));
  }
  const RationalFunction tail = detail::rank_one_resolvent(q, exit, nu, 1, {"x"});
  return head + RationalFunction(tail.num() * x, tail.den(), {"x"});
}

/// Taylor coefficients in x (variable 0) up to x^n_max; each is a polynomial in the
/// remaining variables. Requires den to be a non-zero constant at x = 0.
inline std::vector<Polynomial> series_coeffs(const RationalFunction& rf, unsigned n_max) {
  const Polynomial d0 = rf.den().coefficient_of(0, 0);
  if (d0.is_zero() || !d0.is_constant()) throw InvalidArgumentError("series_coeffs: den(0) must be a non-zero constant");
  const Rational inv = 1 / d0.constant_term();
  const unsigned dd = rf.den().degree(0);
  std::vector<Polynomial> d(dd + 1);
  for (unsigned k = 0; k <= dd; ++k) d[k] = rf.den().coefficient_of(0, k);
  std::vector<Polynomial> out;
  for (unsigned n = 0; n <= n_max; ++n) {
    Polynomial a = rf.num().coefficient_of(0, n);
    for (unsigned k = 1; k <= std::min(n, dd); ++k)
      if (!d[k].is_zero()) a -= d[k] * out[n - k];
    out.push_back(a * inv);
  }
  return out;
}

/// Rational Taylor coefficients of a function of x alone.
inline std::vector<Rational> series_rational(const RationalFunction& rf, unsigned n_max) {
  std::vector<Rational> out;
  for (const auto& c : series_coeffs(rf, n_max)) {
    if (!c.is_constant()) throw InvalidArgumentError("series_rational: coefficients depend on marks");
    out.push_back(c.constant_term());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poles and partial fractions.

using Complex = std::complex<double>;

inline Complex to_complex(const Rational& r) { return {r.get_d(), 0.0}; }

/// Pole location: exact when rational, otherwise a double-precision approximation.
struct Pole {
  bool exact = true;
  Rational value;
  Complex approx;
  unsigned multiplicity = 1;

  Complex numeric() const { return exact ? to_complex(value) : approx; }
  std::string to_string() const {
    if (exact) return motifauto::to_string(value);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.15g%+.15gi", approx.real(), approx.imag());
    return buf;
  }
};

/// coefficient / (1 - z/location)^order
struct PoleTerm {
  Pole location;
  unsigned order = 1;
  Rational coefficient;     // exact poles
  Complex coefficient_num;  // numeric poles

  Complex numeric_coefficient() const { return location.exact ? to_complex(coefficient) : coefficient_num; }
};

struct PartialFractions {
  RationalPoly polynomial_part;
  std::vector<PoleTerm> terms;
  bool exact = true;
  double residual = 0;  // max |rf - sum| at sample points (numeric case)
};

namespace detail {

template <typename T>
UPoly<T> compose_linear(const UPoly<T>& p, const T& a, const T& b) {
  const UPoly<T> lin(std::vector<T>{a, b});
  UPoly<T> acc;
  for (std::size_t i = p.coeffs().size(); i-- > 0;) acc = acc * lin + UPoly<T>::constant(p.coeffs()[i]);
  return acc;
}

template <typename T>
std::vector<T> series_divide(const UPoly<T>& num, const UPoly<T>& den, std::size_t count) {
  std::vector<T> out;
  const T d0 = den[0];
  for (std::size_t n = 0; n < count; ++n) {
    T a = num[n];
    for (std::size_t k = 1; k <= n; ++k) a -= den[k] * out[n - k];
    out.push_back(a / d0);
  }
  return out;
}

inline UPoly<Complex> to_complex(const RationalPoly& p) {
  std::vector<Complex> c;
  for (const auto& v : p.coeffs()) c.push_back(motifauto::to_complex(v));
  return UPoly<Complex>(std::move(c));
}

/// Principal-part coefficients at a pole of order m of num/den: c_j for j = 1..m in
/// sum_j c_j / (1 - z/rho)^j, read from the Taylor expansion of
/// (1 - z/rho)^m num/den at z = rho (1 - w).
template <typename T>
std::vector<T> principal_part(const UPoly<T>& num, const UPoly<T>& den_without_pole, const T& rho, unsigned m) {
  const auto n = compose_linear(num, rho, T(-rho));
  const auto d = compose_linear(den_without_pole, rho, T(-rho));
  const auto h = series_divide(n, d, m);
  std::vector<T> c(m + 1, T(0));
  for (unsigned j = 1; j <= m; ++j) c[j] = h[m - j];
  return c;
}

inline std::vector<Integer> divisors(Integer v) {
  v = abs(v);
  std::vector<Integer> small, large;
  for (Integer d = 1; d * d <= v; ++d) {
    if (v % d != 0) continue;
    small.push_back(d);
    if (d * d != v) large.push_back(v / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

inline constexpr long kMaxDivisorSearch = 1000000000000L;

/// Rational roots of a square-free polynomial (empty when the integer-normalized
/// end coefficients are too large to enumerate divisors).
inline std::vector<Rational> rational_roots(const RationalPoly& f) {
  std::vector<Rational> roots;
  if (f.degree() < 1) return roots;
  Integer l = 1;
  for (const auto& c : f.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> ic;
  for (const auto& c : f.coeffs()) ic.push_back(c.get_num() * (l / c.get_den()));
  std::size_t low = 0;
  while (ic[low] == 0) ++low;
  if (low > 0) roots.push_back(0);
  const Integer a0 = ic[low], an = ic.back();
  if (abs(a0) > kMaxDivisorSearch || abs(an) > kMaxDivisorSearch) return roots;
  for (const auto& p : divisors(a0))
    for (const auto& q : divisors(an))
      for (int sign : {1, -1}) {
        Rational r(p * sign, q);
        r.canonicalize();
        if (f(r) == 0 && std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
      }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// All complex roots of a square-free polynomial (Aberth iteration).
inline std::vector<Complex> numeric_roots(const RationalPoly& f) {
  const int n = f.degree();
  if (n < 1) return {};
  const auto p = to_complex(f.monic());
  const auto dp = p.derivative();
  double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(p[static_cast<std::size_t>(i)]));
  bound += 1;
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = std::polar(0.5 * bound, 2 * M_PI * (k + 0.25) / n);
  for (int iter = 0; iter < 2000; ++iter) {
    double worst = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const Complex ratio = p(z[k]) / dp(z[k]);
      Complex sum = 0;
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const Complex step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-16) break;
  }
  double scale = 0;
  for (const auto& c : p.coeffs()) scale = std::max(scale, std::abs(c));
  for (std::size_t k = 0; k < z.size(); ++k) {
    double mag = 0;
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) mag += std::abs(p.coeffs()[i]) * std::pow(std::abs(z[k]), i);
    if (std::abs(p(z[k])) > 1e-12 * std::max(1.0, mag))
      throw InvalidArgumentError("numeric root finding did not converge");
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(z[k] - z[j]) < 1e-7 * std::max(1.0, std::abs(z[k])))
        throw InvalidArgumentError("unresolvable root cluster at working precision");
  }
  std::sort(z.begin(), z.end(), [](const Complex& a, const Complex& b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
  });
  return z;
}

}  // namespace detail

/// Distinct poles of num/den (den square-free decomposed), exact rational poles first.
inline std::vector<Pole> find_poles(const RationalPoly& den) {
  std::vector<Pole> out;
  for (const auto& [factor, mult] : square_free(den)) {
    RationalPoly rest = factor;
    for (const auto& r : detail::rational_roots(factor)) {
      out.push_back({true, r, {}, mult});
      rest = divmod(rest, RationalPoly({-r, Rational(1)})).first;
    }
    for (const auto& z : detail::numeric_roots(rest)) out.push_back({false, 0, z, mult});
  }
  return out;
}

/// Polynomial part plus one term per (pole, order) with a non-zero coefficient.
inline PartialFractions partial_fractions(const RationalFunction& rf) {
  if (!rf.univariate()) throw InvalidArgumentError("partial_fractions needs a function of one variable");
  const RationalPoly num = to_upoly(rf.num()), den = to_upoly(rf.den());
  auto [quot, rem] = divmod(num, den);
  PartialFractions out;
  out.polynomial_part = quot;
  if (rem.is_zero()) return out;
  if (den[0] == 0) throw InvalidArgumentError("partial_fractions: pole at the origin");
  for (const auto& pole : find_poles(den)) {
    const unsigned m = pole.multiplicity;
    if (pole.exact) {
      // den = (1 - z/rho)^m * rest
      const RationalPoly lin({Rational(1), -1 / pole.value});
      const RationalPoly rest = divmod(den, lin.pow(m)).first;
      const auto c = detail::principal_part(rem, rest, pole.value, m);
      for (unsigned j = 1; j <= m; ++j)
        if (c[j] != 0) out.terms.push_back({pole, j, c[j], {}});
    } else {
      out.exact = false;
      const auto dc = detail::to_complex(den);
      const UPoly<Complex> lin(std::vector<Complex>{1.0, -1.0 / pole.approx});
      const UPoly<Complex> rest = divmod(dc, lin.pow(m)).first;
      const auto c = detail::principal_part(detail::to_complex(rem), rest, pole.approx, m);
      for (unsigned j = 1; j <= m; ++j) out.terms.push_back({pole, j, 0, c[j]});
    }
  }
  if (!out.exact) {
    double smallest = 1e300;
    for (const auto& t : out.terms) smallest = std::min(smallest, std::abs(t.location.numeric()));
    for (const Complex z : {Complex(0, 0), Complex(0.5 * smallest, 0), Complex(0, 0.5 * smallest)}) {
      Complex sum = detail::to_complex(quot)(z);
      for (const auto& t : out.terms)
        sum += t.numeric_coefficient() / std::pow(1.0 - z / t.location.numeric(), static_cast<int>(t.order));
      const Complex value = detail::to_complex(num)(z) / detail::to_complex(den)(z);
      out.residual = std::max(out.residual, std::abs(sum - value) / std::max(1.0, std::abs(value)));
    }
    if (out.residual > 1e-9) throw InvalidArgumentError("partial fraction residual above tolerance");
  }
  return out;
}

/// Rebuilds num/den from exact terms (used to check decompositions).
inline RationalFunction recombine(const PartialFractions& pf) {
  if (!pf.exact) throw InvalidArgumentError("recombine needs an exact decomposition");
  RationalFunction acc(from_upoly(pf.polynomial_part), Polynomial::constant(1, 1), {"x"});
  for (const auto& t : pf.terms) {
    const RationalPoly lin({Rational(1), -1 / t.location.value});
    acc = acc + RationalFunction(Polynomial::constant(1, t.coefficient), from_upoly(lin.pow(t.order)), {"x"});
  }
  return acc;
}

inline Rational binomial(unsigned long n, unsigned long k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Rational(r);
}

struct Asymptotics {
  bool unique = true;            // false when several poles share the smallest modulus
  std::vector<Pole> dominant;    // all poles of smallest modulus
  unsigned order = 0;            // m: [x^n] ~ c n^{m-1} rho^{-n}
  bool exact = true;
  Rational constant;             // c (exact pole)
  Complex constant_num;          // c (numeric pole)
  std::vector<PoleTerm> expansion;  // every term at the dominant pole
  std::vector<std::pair<unsigned, double>> relative_error;  // (n, |a_n - lead(n)| / |a_n|)
};

/// Leading term c n^{m-1} rho^{-n} at an exact pole.
inline Rational leading_term(const Asymptotics& a, unsigned n) {
  const Rational& rho = a.dominant.front().value;
  return a.constant * pow(Rational(n), a.order - 1) / pow(rho, n);
}

/// Dominant-pole asymptotics of [x^n] rf, with relative errors of the leading
/// term against the exact coefficients at each n in `check_at`.
inline Asymptotics coeff_asymptotics(const RationalFunction& rf, const std::vector<unsigned>& check_at = {}) {
  const auto pf = partial_fractions(rf);
  Asymptotics out;
  if (pf.terms.empty()) {
    out.unique = false;
    return out;
  }
  double smallest = 1e300;
  for (const auto& t : pf.terms) smallest = std::min(smallest, std::abs(t.location.numeric()));
  auto same = [](const Pole& a, const Pole& b) {
    if (a.exact && b.exact) return a.value == b.value;
    return std::abs(a.numeric() - b.numeric()) < 1e-9 * std::max(1.0, std::abs(a.numeric()));
  };
  for (const auto& t : pf.terms) {
    if (std::abs(t.location.numeric()) > smallest * (1 + 1e-12)) continue;
    if (std::none_of(out.dominant.begin(), out.dominant.end(), [&](const Pole& p) { return same(p, t.location); }))
      out.dominant.push_back(t.location);
  }
  if (out.dominant.size() != 1) {
    out.unique = false;
    return out;
  }
  const Pole& rho = out.dominant.front();
  out.exact = rho.exact;
  for (const auto& t : pf.terms) {
    if (!same(t.location, rho)) continue;
    out.expansion.push_back(t);
    if (t.order > out.order) {
      out.order = t.order;
      Integer f;
      mpz_fac_ui(f.get_mpz_t(), t.order - 1);
      out.constant = t.coefficient / Rational(f);
      out.constant_num = t.numeric_coefficient() / std::tgamma(static_cast<double>(t.order));
    }
  }
  if (check_at.empty()) return out;
  const unsigned top = *std::max_element(check_at.begin(), check_at.end());
  const auto coeffs = series_rational(rf, top);
  for (unsigned n : check_at) {
    const Rational& an = coeffs[n];
    double err;
    if (an == 0) {
      err = std::numeric_limits<double>::infinity();
    } else if (out.exact) {
      err = Rational(abs((an - leading_term(out, n)) / an)).get_d();
    } else {
      // log-domain ratio lead(n) / a_n
      const double log_ratio = std::log(std::abs(out.constant_num)) + (out.order - 1.0) * std::log(double(n)) -
                               n * std::log(std::abs(rho.approx)) - static_cast<double>(log_abs(an));
      const double phase = std::arg(out.constant_num) - n * std::arg(rho.approx) - (an < 0 ? M_PI : 0.0);
      err = std::abs(1.0 - std::polar(std::exp(log_ratio), phase));
    }
    out.relative_error.emplace_back(n, err);
  }
  return out;
}

/// Least-squares fit of a_n rho^n by a polynomial of degree m-1 in n over
/// n_lo..n_hi; returns the fitted coefficient of n^{m-1}.
inline Rational fit_leading_constant(const std::vector<Rational>& coeffs, const Rational& rho, unsigned m,
                                     unsigned n_lo, unsigned n_hi) {
  if (m == 0 || n_hi >= coeffs.size() || n_lo > n_hi || n_hi - n_lo + 1 < m)
    throw InvalidArgumentError("fit_leading_constant: bad range");
  RationalMatrix normal(m, m, Rational(0));
  RationalVector rhs(m, Rational(0));
  for (unsigned n = n_lo; n <= n_hi; ++n) {
    const Rational y = coeffs[n] * pow(rho, n);
    std::vector<Rational> basis(m);
    for (unsigned i = 0; i < m; ++i) basis[i] = pow(Rational(n), m - 1 - i);
    for (unsigned i = 0; i < m; ++i) {
      rhs[i] += basis[i] * y;
      for (unsigned j = 0; j < m; ++j) normal(i, j) += basis[i] * basis[j];
    }
  }
  return solve(normal, rhs).front();
}

// ---------------------------------------------------------------------------
// Central limit parameters.

struct CltParams {
  RationalVector mean_rate;
  RationalMatrix cov_rate;
  Rational det_sigma;
  bool positive_semidefinite = true;
};

namespace detail {

/// Coefficients of t^{-1}, t^{-2}, ... of g(1 - t) for a function of x alone;
/// entry j holds the coefficient of t^{-j} (entry 0 unused).
inline std::vector<Rational> laurent_at_one(const RationalFunction& g, unsigned max_order) {
  const RationalPoly n = compose_linear(to_upoly(g.num()), Rational(1), Rational(-1));
  const RationalPoly d = compose_linear(to_upoly(g.den()), Rational(1), Rational(-1));
  std::size_t s = 0;
  while (d[s] == 0) ++s;
  if (s > max_order) throw InvalidArgumentError("pole at x = 1 has unexpected order");
  std::vector<Rational> shifted(d.coeffs().begin() + static_cast<std::ptrdiff_t>(s), d.coeffs().end());
  const auto b = series_divide(n, RationalPoly(shifted), s);
  std::vector<Rational> out(max_order + 1, Rational(0));
  for (std::size_t j = 1; j <= s; ++j) out[j] = b[s - j];
  return out;
}

inline RationalFunction at_unit_marks(const RationalFunction& f) {
  RationalFunction g = f;
  for (std::size_t v = 1; v < f.nvars(); ++v) g = g.substitute(v, 1);
  return g;
}

}  // namespace detail

/// Per-step mean vector and covariance matrix of the mark counts, read from the
/// expansion of the resolvent's first and second mark derivatives at x = 1.
inline CltParams clt_params(const RationalFunction& rf) {
  const std::size_t k = rf.nvars() - 1;
  if (k == 0) throw InvalidArgumentError("clt_params needs at least one mark");
  std::vector<RationalFunction> d1;
  std::vector<std::vector<Rational>> e1;
  for (std::size_t i = 0; i < k; ++i) {
    d1.push_back(rf.derivative(i + 1));
    e1.push_back(detail::laurent_at_one(detail::at_unit_marks(d1.back()), 2));
  }
  CltParams out;
  out.mean_rate.resize(k);
  out.cov_rate = RationalMatrix(k, k, Rational(0));
  for (std::size_t i = 0; i < k; ++i) out.mean_rate[i] = e1[i][2];
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const auto e2 = detail::laurent_at_one(detail::at_unit_marks(d1[i].derivative(j + 1)), 3);
      const Rational &a2 = e1[i][2], &a1 = e1[i][1], &b2 = e1[j][2], &b1 = e1[j][1];
      if (e2[3] != 2 * a2 * b2) throw InvalidArgumentError("second moment does not grow quadratically");
      Rational rate = Rational(3, 2) * e2[3] + e2[2] - a2 * (b2 + b1) - b2 * (a2 + a1);
      if (i == j) rate += a2;  // E[X(X-1)] + E[X] = E[X^2]
      out.cov_rate(i, j) = out.cov_rate(j, i) = rate;
    }
  }
  out.det_sigma = determinant(out.cov_rate);
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    RationalMatrix minor(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c) minor(r, c) = out.cov_rate(idx[r], idx[c]);
    if (determinant(minor) < 0) out.positive_semidefinite = false;
  }
  return out;
}

struct ChainStructure {
  std::size_t closed_classes = 0;
  unsigned period = 0;  // of the closed class when unique
};

/// Closed communicating classes of the chain and the period of the first one.
inline ChainStructure chain_structure(const MarkovEmbedding& emb) {
  const std::size_t n = emb.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (emb.P(i, j) != 0) reach[i][j] = true;
  }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][m])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[m][j]) reach[i][j] = true;
  ChainStructure out;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> first_class;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> cls;
    bool closed = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) {
        cls.push_back(j);
        seen[j] = true;
      }
      if (reach[i][j] && !reach[j][i]) closed = false;
    }
    if (!closed) continue;
    if (++out.closed_classes == 1) first_class = cls;
  }
  if (first_class.empty()) return out;
  // Period: gcd over in-class edges of level(u) + 1 - level(v) for BFS levels.
  std::vector<long> level(n, -1);
  std::vector<std::size_t> queue{first_class.front()};
  level[first_class.front()] = 0;
  long g = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::size_t u = queue[h];
    for (std::size_t v = 0; v < n; ++v) {
      if (emb.P(u, v) == 0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  out.period = static_cast<unsigned>(g);
  return out;
}

/// CLT parameters with the structural precondition checked first.
inline CltParams clt_params(const MarkovEmbedding& emb, const std::vector<std::string>& marked,
                            std::size_t cap = kDefaultGfStateCap) {
  const auto s = chain_structure(emb);
  if (s.closed_classes != 1)
    throw InvalidArgumentError("chain has " + std::to_string(s.closed_classes) +
                               " closed classes; CLT parameters need exactly one");
  if (s.period != 1) throw InvalidArgumentError("recurrent class is periodic (period " + std::to_string(s.period) + ")");
  return clt_params(resolvent_gf(emb, marked, cap));
}

// ---------------------------------------------------------------------------
// Autocorrelation and avoidance counting.

struct Autocorrelation {
  std::string bits;
  RationalPoly poly;  // sum of z^{n-1} over set bits n
};

inline Autocorrelation autocorrelation(std::string_view word) {
  if (word.empty()) throw InvalidArgumentError("autocorrelation of the empty word");
  Autocorrelation out;
  std::vector<Rational> c(word.size(), Rational(0));
  for (std::size_t n = 1; n <= word.size(); ++n) {
    const bool hit = word.substr(0, n) == word.substr(word.size() - n);
    out.bits += hit ? '1' : '0';
    if (hit) c[n - 1] = 1;
  }
  out.poly = RationalPoly(std::move(c));
  return out;
}

struct AvoidanceGf {
  RationalFunction gf;          // in z: sum f(n) z^{-n}
  std::vector<Integer> counts;  // f(0..n_max)
};

/// Generating function and counts of length-n words over s letters that avoid `word`.
inline AvoidanceGf avoidance_gf(std::string_view word, unsigned s, unsigned n_max) {
  if (s < 2) throw InvalidArgumentError("alphabet size must be at least 2");
  const RationalPoly a = autocorrelation(word).poly;
  const RationalPoly z = RationalPoly::x();
  const RationalPoly num = z * a;
  const RationalPoly den = RationalPoly::constant(1) + (z - RationalPoly::constant(Rational(s))) * a;
  AvoidanceGf out{RationalFunction(from_upoly(num), from_upoly(den), {"z"}), {}};
  // Expand in w = 1/z: both sides have degree |word|, so reverse the coefficient lists.
  const std::size_t len = word.size();
  std::vector<Rational> rn(len + 1, Rational(0)), rd(len + 1, Rational(0));
  for (std::size_t i = 0; i <= len; ++i) {
    rn[len - i] = num[i];
    rd[len - i] = den[i];
  }
  for (const auto& v : detail::series_divide(RationalPoly(rn), RationalPoly(rd), n_max + 1)) {
    if (v.get_den() != 1) throw InvalidArgumentError("avoidance count is not an integer");
    out.counts.push_back(v.get_num());
  }
  return out;
}

}  // namespace motifauto
