#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "motifauto/errors.hpp"
#include "motifauto/matrix.hpp"
#include "motifauto/rational.hpp"

namespace motifauto {

using Exponents = std::vector<unsigned>;

/// Sparse multivariate polynomial with exact rational coefficients. Terms are kept
/// in lexicographic exponent order (variable 0 most significant); zero coefficients
/// are never stored.
class Polynomial {
 public:
  explicit Polynomial(std::size_t nvars = 1) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_.emplace(Exponents(nvars, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t var, unsigned power = 1) {
    Exponents e(nvars, 0);
    e.at(var) = power;
    return monomial(std::move(e), Rational(1));
  }

  static Polynomial monomial(Exponents e, const Rational& c) {
    Polynomial p(e.size());
    if (c != 0) p.terms_.emplace(std::move(e), c);
    return p;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Exponents, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                                               [](unsigned e) { return e == 0; }));
  }

  Rational coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coeff(Exponents(nvars_, 0)); }

  /// Leading term in lexicographic order.
  const std::pair<const Exponents, Rational>& leading() const {
    if (terms_.empty()) throw InvalidArgumentError("leading term of the zero polynomial");
    return *terms_.rbegin();
  }

  unsigned degree(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  /// True when no variable other than `var` appears.
  bool uses_only(std::size_t var) const {
    for (const auto& [e, c] : terms_)
      for (std::size_t v = 0; v < nvars_; ++v)
        if (v != var && e[v] != 0) return false;
    return true;
  }

  void add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  Polynomial operator-() const { return *this * Rational(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    Polynomial out(a.nvars_);
    if (a.is_zero() || b.is_zero()) return out;
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t v = 0; v < a.nvars_; ++v) e[v] = ea[v] + eb[v];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  Polynomial pow(unsigned k) const {
    Polynomial out = constant(nvars_, 1);
    for (unsigned i = 0; i < k; ++i) out *= *this;
    return out;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d = e;
      --d[var];
      out.add_term(d, c * e[var]);
    }
    return out;
  }

  /// Replaces variable `var` by the value `v` (the variable count is unchanged).
  Polynomial substitute(std::size_t var, const Rational& v) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponents d = e;
      d[var] = 0;
      out.add_term(d, c * motifauto::pow(v, e[var]));
    }
    return out;
  }

  Rational evaluate(std::span<const Rational> point) const {
    if (point.size() != nvars_) throw InvalidArgumentError("evaluate: wrong number of values");
    Rational out = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t v = 0; v < nvars_; ++v)
        if (e[v]) t *= motifauto::pow(point[v], e[v]);
      out += t;
    }
    return out;
  }

  /// Coefficient of var^power as a polynomial in the remaining variables.
  Polynomial coefficient_of(std::size_t var, unsigned power) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] != power) continue;
      Exponents d = e;
      d[var] = 0;
      out.add_term(d, c);
    }
    return out;
  }

  /// Human-readable rendering, e.g. "3/4*x^2*y1 - 1".
  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      Rational mag = abs(c);
      std::string mono;
      for (std::size_t v = 0; v < nvars_; ++v) {
        if (!e[v]) continue;
        if (!mono.empty()) mono += '*';
        mono += v < names.size() ? names[v] : "v" + std::to_string(v);
        if (e[v] > 1) mono += "^" + std::to_string(e[v]);
      }
      std::string term = mono.empty() ? motifauto::to_string(mag)
                         : mag == 1   ? mono
                                      : motifauto::to_string(mag) + "*" + mono;
      if (first)
        out += (c < 0 ? "-" : "") + term;
      else
        out += (c < 0 ? " - " : " + ") + term;
      first = false;
    }
    return out;
  }

 private:
  void check(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw InvalidArgumentError("polynomials over different variable sets");
  }

  std::size_t nvars_;
  std::map<Exponents, Rational> terms_;
};

/// a / b when b divides a exactly; throws otherwise.
inline Polynomial exact_divide(Polynomial a, const Polynomial& b) {
  if (b.is_zero()) throw InvalidArgumentError("division by the zero polynomial");
  const std::size_t n = a.nvars();
  Polynomial q(n);
  const auto& [lb_e, lb_c] = b.leading();
  Exponents e(n);
  while (!a.is_zero()) {
    const auto& [la_e, la_c] = a.leading();
    for (std::size_t v = 0; v < n; ++v) {
      if (la_e[v] < lb_e[v]) throw InvalidArgumentError("exact_divide: divisor does not divide dividend");
      e[v] = la_e[v] - lb_e[v];
    }
    const Polynomial t = Polynomial::monomial(e, la_c / lb_c);
    q += t;
    a -= t * b;
  }
  return q;
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting; every
/// intermediate division is exact.
inline Polynomial determinant(Matrix<Polynomial> m) {
  const std::size_t n = m.rows();
  if (n == 0) return Polynomial::constant(1, 1);
  const std::size_t nvars = m(0, 0).nvars();
  Polynomial prev = Polynomial::constant(nvars, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pivot = n;
    for (std::size_t r = k; r < n; ++r) {
      if (m(r, k).is_zero()) continue;
      if (pivot == n || m(r, k).term_count() < m(pivot, k).term_count()) pivot = r;
    }
    if (pivot == n) return Polynomial(nvars);
    if (pivot != k) {
      m.swap_rows(k, pivot);
      negate = !negate;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      for (std::size_t c = k + 1; c < n; ++c) {
        Polynomial v = m(k, k) * m(r, c);
        if (!m(r, k).is_zero() && !m(k, c).is_zero()) v -= m(r, k) * m(k, c);
        m(r, c) = exact_divide(std::move(v), prev);
      }
      m(r, k) = Polynomial(nvars);
    }
    prev = m(k, k);
  }
  Polynomial det = m(n - 1, n - 1);
  return negate ? -det : det;
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials over a field.

template <typename T>
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  static UPoly constant(const T& v) { return UPoly(std::vector<T>{v}); }
  static UPoly x() { return UPoly(std::vector<T>{T(0), T(1)}); }

  /// Degree; -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<T>& coeffs() const noexcept { return c_; }
  T operator[](std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
  T leading() const { return c_.empty() ? T(0) : c_.back(); }

  T operator()(const T& v) const {
    T out(0);
    for (std::size_t i = c_.size(); i-- > 0;) out = out * v + c_[i];
    return out;
  }

  UPoly derivative() const {
    std::vector<T> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * T(static_cast<long>(i)));
    return UPoly(std::move(d));
  }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<T> out(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] += b.c_[i];
    return UPoly(std::move(out));
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + b * T(-1); }
  friend UPoly operator*(const UPoly& a, const T& s) {
    std::vector<T> out = a.c_;
    for (auto& v : out) v *= s;
    return UPoly(std::move(out));
  }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return UPoly();
    std::vector<T> out(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(out));
  }
  bool operator==(const UPoly& o) const { return c_ == o.c_; }

  UPoly pow(unsigned k) const {
    UPoly out = constant(T(1));
    for (unsigned i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  /// Quotient and remainder of Euclidean division.
  friend std::pair<UPoly, UPoly> divmod(UPoly a, const UPoly& b) {
    if (b.is_zero()) throw InvalidArgumentError("division by the zero polynomial");
    if (a.degree() < b.degree()) return {UPoly(), a};
    std::vector<T> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), T(0));
    std::vector<T> r = a.c_;
    const T lead = b.leading();
    for (int i = a.degree() - b.degree(); i >= 0; --i) {
      const T f = r[static_cast<std::size_t>(i + b.degree())] / lead;
      q[static_cast<std::size_t>(i)] = f;
      for (int j = 0; j <= b.degree(); ++j) r[static_cast<std::size_t>(i + j)] -= f * b.c_[static_cast<std::size_t>(j)];
      r[static_cast<std::size_t>(i + b.degree())] = T(0);
    }
    return {UPoly(std::move(q)), UPoly(std::move(r))};
  }

  UPoly monic() const { return is_zero() ? *this : *this * (T(1) / leading()); }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }
  std::vector<T> c_;
};

using RationalPoly = UPoly<Rational>;

/// Monic greatest common divisor over the rationals.
inline RationalPoly gcd(RationalPoly a, RationalPoly b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Yun's square-free decomposition: returns (factor, multiplicity) pairs with
/// monic square-free, pairwise coprime factors whose product (with multiplicities)
/// is the monic input.
inline std::vector<std::pair<RationalPoly, unsigned>> square_free(const RationalPoly& f) {
  std::vector<std::pair<RationalPoly, unsigned>> out;
  if (f.degree() < 1) return out;
  RationalPoly a = f.monic();
  RationalPoly b = gcd(a, a.derivative());
  RationalPoly c = divmod(a, b).first;
  RationalPoly d = divmod(a.derivative(), b).first - c.derivative();
  unsigned i = 1;
  while (c.degree() >= 1) {
    RationalPoly g = gcd(c, d);
    if (g.degree() >= 1) out.emplace_back(g, i);
    c = divmod(c, g).first;
    d = divmod(d, g).first - c.derivative();
    ++i;
  }
  return out;
}

/// Univariate view of a polynomial in which only `var` appears.
inline RationalPoly to_upoly(const Polynomial& p, std::size_t var = 0) {
  if (!p.uses_only(var)) throw InvalidArgumentError("polynomial is not univariate");
  std::vector<Rational> c(p.degree(var) + 1, Rational(0));
  for (const auto& [e, v] : p.terms()) c[e[var]] = v;
  return RationalPoly(std::move(c));
}

inline Polynomial from_upoly(const RationalPoly& p, std::size_t nvars = 1, std::size_t var = 0) {
  Polynomial out(nvars);
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    Exponents e(nvars, 0);
    e[var] = static_cast<unsigned>(i);
    out.add_term(e, p.coeffs()[i]);
  }
  return out;
}

}  // namespace motifauto
