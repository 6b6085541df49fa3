#include "polyskel/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace polyskel {

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t k) {
  Polynomial p(nvars);
  Monomial m(nvars, 0);
  m.at(k) = 1;
  p.add_term(m, 1);
  return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r(*this);
  r += o;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw std::invalid_argument("polynomial: variable count mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * Rational(-1); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.nvars_ != nvars_) throw std::invalid_argument("polynomial: variable count mismatch");
  Polynomial r(nvars_);
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m(nvars_);
      for (std::size_t i = 0; i < nvars_; ++i) m[i] = m1[i] + m2[i];
      r.add_term(m, c1 * c2);
    }
  return r;
}

Polynomial Polynomial::operator*(const Rational& s) const {
  Polynomial r(nvars_);
  if (s == 0) return r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
  return r;
}

Polynomial Polynomial::substitute(std::size_t k, const Polynomial& q) const {
  if (q.nvars_ != nvars_) throw std::invalid_argument("polynomial: variable count mismatch");
  Polynomial r(nvars_);
  std::vector<Polynomial> powers{constant(nvars_, 1)};
  for (const auto& [m, c] : terms_) {
    int e = m[k];
    while (static_cast<int>(powers.size()) <= e) powers.push_back(powers.back() * q);
    Monomial rest = m;
    rest[k] = 0;
    Polynomial term(nvars_);
    term.add_term(rest, c);
    r += term * powers[static_cast<std::size_t>(e)];
  }
  return r;
}

Polynomial Polynomial::coefficient(std::size_t k, int power) const {
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_)
    if (m[k] == power) {
      Monomial rest = m;
      rest[k] = 0;
      r.add_term(rest, c);
    }
  return r;
}

int Polynomial::degree_in(std::size_t k) const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m[k]);
  return d;
}

Rational Polynomial::evaluate(const RationalVector& x) const {
  if (x.size() != nvars_) throw std::invalid_argument("polynomial: point dimension mismatch");
  Rational s = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < nvars_ && t != 0; ++i)
      for (int e = 0; e < m[i]; ++e) t *= x[i];
    s += t;
  }
  return s;
}

}  // namespace polyskel
