#pragma once

#include <map>
#include <vector>

#include "polyskel/rational.hpp"

namespace polyskel {

// Sparse multivariate polynomial with rational coefficients.
class Polynomial {
 public:
  using Monomial = std::vector<int>;

  explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}
  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t k);

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& s) const;
  Polynomial& operator+=(const Polynomial& o);

  // Replace x_k by q everywhere.
  Polynomial substitute(std::size_t k, const Polynomial& q) const;
  // Coefficient of x_k^power, as a polynomial in the remaining variables.
  Polynomial coefficient(std::size_t k, int power) const;
  int degree_in(std::size_t k) const;
  Rational evaluate(const RationalVector& x) const;

 private:
  void add_term(const Monomial& m, const Rational& c);

  std::size_t nvars_;
  std::map<Monomial, Rational> terms_;
};

}  // namespace polyskel
