#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyskel {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

// Accepts "p", "p/q", "-p/q" and finite decimals such as "0.25" or "1e-3".
Rational parse_rational(std::string_view text);

// Exact value of a finite double.
Rational from_double(double x);

int sign(const Rational& q);

RationalVector zeros(std::size_t n);

// Positive rescaling of a nonzero vector to a primitive integer vector.
// Sign is preserved, so half-spaces a.u > 0 keep their meaning.
RationalVector primitive(const RationalVector& v);

bool is_zero(const RationalVector& v);

Rational dot(const RationalVector& a, const RationalVector& b);

std::vector<double> to_doubles(const RationalVector& v);

// Compact formatting for diagnostics: "(a, b, c)".
std::string to_string(const RationalVector& v);

}  // namespace polyskel
