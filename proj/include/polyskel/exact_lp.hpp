#pragma once

#include <optional>
#include <vector>

#include "polyskel/rational.hpp"

namespace polyskel {

enum class Relation { le, ge, eq };

struct LinearConstraint {
  RationalVector a;
  Relation rel;
  Rational b;
};

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Rational value;
  RationalVector x;
};

// maximize c.x subject to the constraints and x >= 0, in exact arithmetic.
// Two-phase tableau simplex with Bland's rule, so it cannot cycle.
LpResult lp_maximize(const RationalVector& c, const std::vector<LinearConstraint>& constraints);

// Open cone {u in R^m : u > 0, a.u > 0 for every row a}.
bool open_cone_nonempty(const std::vector<RationalVector>& rows, std::size_t m);

// A point strictly inside the open cone, normalized to sum 1, if any.
std::optional<RationalVector> open_cone_point(const std::vector<RationalVector>& rows,
                                              std::size_t m);

// Drops rows implied by the others together with u >= 0. The cone must have
// nonempty interior. Surviving rows keep their relative order.
std::vector<RationalVector> remove_redundant_rows(const std::vector<RationalVector>& rows,
                                                  std::size_t m);

}  // namespace polyskel
