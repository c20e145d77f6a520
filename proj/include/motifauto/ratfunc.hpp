#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "motifauto/errors.hpp"
#include "motifauto/polynomial.hpp"

namespace motifauto {

/// Quotient of two polynomials over the same variables. Univariate functions are
/// kept in lowest terms; multivariate ones are compared by cross-multiplication.
/// The denominator always has integer coefficients with gcd 1 and a positive
/// leading coefficient.
class RationalFunction {
 public:
  RationalFunction() : num_(1), den_(Polynomial::constant(1, 1)) {}
  explicit RationalFunction(Polynomial num) : RationalFunction(num, Polynomial::constant(num.nvars(), 1)) {}

  RationalFunction(Polynomial num, Polynomial den, std::vector<std::string> names = {})
      : num_(std::move(num)), den_(std::move(den)), names_(std::move(names)) {
    if (den_.is_zero()) throw InvalidArgumentError("rational function with zero denominator");
    if (num_.nvars() != den_.nvars()) throw InvalidArgumentError("numerator and denominator variable counts differ");
    normalize();
  }

  const Polynomial& num() const noexcept { return num_; }
  const Polynomial& den() const noexcept { return den_; }
  std::size_t nvars() const noexcept { return num_.nvars(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  void set_names(std::vector<std::string> names) { names_ = std::move(names); }

  bool univariate() const { return num_.uses_only(0) && den_.uses_only(0); }

  bool operator==(const RationalFunction& o) const {
    return nvars() == o.nvars() && num_ * o.den_ == o.num_ * den_;
  }

  /// Equality with num/den given separately.
  bool equals(const Polynomial& num, const Polynomial& den) const { return num_ * den == num * den_; }

  RationalFunction derivative(std::size_t var) const {
    return {num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_, names_};
  }

  RationalFunction substitute(std::size_t var, const Rational& v) const {
    Polynomial d = den_.substitute(var, v);
    if (d.is_zero()) throw SingularSystemError("substitution makes the denominator vanish");
    return {num_.substitute(var, v), std::move(d), names_};
  }

  Rational evaluate(std::span<const Rational> point) const {
    const Rational d = den_.evaluate(point);
    if (d == 0) throw SingularSystemError("evaluation at a pole");
    return num_.evaluate(point) / d;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, a.names_};
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_, a.names_};
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_, a.names_};
  }

  std::string to_string() const { return "(" + num_.to_string(names_) + ") / (" + den_.to_string(names_) + ")"; }

 private:
  void normalize() {
    if (univariate()) {
      RationalPoly n = to_upoly(num_), d = to_upoly(den_);
      if (n.is_zero()) {
        den_ = Polynomial::constant(nvars(), 1);
        return;
      }
      RationalPoly g = gcd(n, d);
      if (g.degree() > 0) {
        num_ = from_upoly(divmod(n, g).first, nvars());
        den_ = from_upoly(divmod(d, g).first, nvars());
      }
    }
    if (num_.is_zero()) {
      den_ = Polynomial::constant(nvars(), 1);
      return;
    }
    // Scale so that den has coprime integer coefficients and a positive leading term.
    Integer l = 1, g = 0;
    for (const auto& [e, c] : den_.terms()) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
    for (const auto& [e, c] : den_.terms()) {
      Integer v = c.get_num() * (l / c.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
    Rational scale(l, g);
    scale.canonicalize();
    if (den_.leading().second < 0) scale = -scale;
    num_ *= scale;
    den_ *= scale;
  }

  Polynomial num_;
  Polynomial den_;
  std::vector<std::string> names_;
};

}  // namespace motifauto
