#include <doctest.h>

#include <cmath>

#include "example.hpp"
#include "polyskel/exact_lp.hpp"
#include "polyskel/linalg.hpp"
#include "polyskel/polynomial.hpp"

using namespace testing;

TEST_CASE("rational formatting and parsing") {
  CHECK(to_string(q(6, 4)) == "3/2");
  CHECK(to_string(q(-10, 5)) == "-2");
  CHECK(to_string(q(0)) == "0");
  CHECK(parse_rational("-1343/3626") == q(-1343, 3626));
  CHECK(parse_rational("0.25") == q(1, 4));
  CHECK(parse_rational("1e-3") == q(1, 1000));
  CHECK(parse_rational("-2.5E1") == q(-25));
  CHECK(parse_rational(" 7 ") == q(7));
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational("abc"), ValidationError);
  CHECK(from_double(0.375) == q(3, 8));
}

TEST_CASE("primitive vectors keep sign and direction") {
  auto p = primitive({q(-27, 2), q(0), q(7)});
  CHECK(p == RationalVector{q(-27), q(0), q(14)});
  CHECK(primitive({q(0), q(-3, 7)}) == RationalVector{q(0), q(-1)});
  CHECK(is_zero(primitive({q(0), q(0)})));
}

TEST_CASE("matrix arithmetic") {
  auto a = int_matrix({{2, 1}, {1, 3}});
  auto inv = a.inverse();
  REQUIRE(inv);
  CHECK(a * *inv == RationalMatrix::identity(2));
  CHECK(a.determinant() == q(5));
  CHECK(a.rank() == 2);
  CHECK(int_matrix({{1, 2}, {2, 4}}).rank() == 1);
  CHECK(!int_matrix({{1, 2}, {2, 4}}).inverse());
  auto x = a.solve({q(3), q(4)});
  REQUIRE(x);
  CHECK(a * *x == RationalVector{q(3), q(4)});
  CHECK(a.transpose()(0, 1) == q(1));
  CHECK(left_multiply({q(1), q(1)}, a) == RationalVector{q(3), q(4)});
}

TEST_CASE("characteristic polynomial and eigenvalues") {
  auto a = int_matrix({{2, 0, 0}, {0, 3, 4}, {0, 4, 9}});
  auto c = characteristic_polynomial(a);
  // det(tI - A) = (t - 2)(t^2 - 12 t + 11)
  CHECK(c == RationalVector{q(-22), q(35), q(-14), q(1)});
  auto ev = eigenvalues(a);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].real() == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(ev[1].real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ev[2].real() == doctest::Approx(1.0).epsilon(1e-12));
  auto rot = eigenvalues(int_matrix({{0, -1}, {1, 0}}));
  CHECK(std::abs(rot[0].imag()) == doctest::Approx(1.0));
  CHECK(rot[0].real() == doctest::Approx(0.0));
  // 5x5 goes through Eigen.
  auto d = RationalMatrix::identity(5);
  for (std::size_t i = 0; i < 5; ++i) d(i, i) = Rational(static_cast<long>(i + 1));
  auto e5 = eigenvalues(d);
  CHECK(e5.front().real() == doctest::Approx(5.0));
  CHECK(e5.back().real() == doctest::Approx(1.0));
}

TEST_CASE("exact simplex") {
  // max x + y, x + 2y <= 4, 3x + y <= 6
  auto r = lp_maximize({q(1), q(1)}, {{{q(1), q(2)}, Relation::le, q(4)}, {{q(3), q(1)}, Relation::le, q(6)}});
  REQUIRE(r.status == LpResult::Status::optimal);
  CHECK(r.value == q(14, 5));
  CHECK(r.x == RationalVector{q(8, 5), q(6, 5)});
  auto inf = lp_maximize({q(1)}, {{{q(1)}, Relation::ge, q(2)}, {{q(1)}, Relation::le, q(1)}});
  CHECK(inf.status == LpResult::Status::infeasible);
  auto unb = lp_maximize({q(1)}, {{{q(1)}, Relation::ge, q(1)}});
  CHECK(unb.status == LpResult::Status::unbounded);
  auto eq = lp_maximize({q(-1), q(0)}, {{{q(1), q(1)}, Relation::eq, q(1)}});
  REQUIRE(eq.status == LpResult::Status::optimal);
  CHECK(eq.value == q(0));
}

TEST_CASE("open cones") {
  // u2 > 2 u1 and u1 > u2 / 3 on the positive quadrant.
  std::vector<RationalVector> rows{{q(-2), q(1)}, {q(3), q(-1)}};
  CHECK(open_cone_nonempty(rows, 2));
  auto p = open_cone_point(rows, 2);
  REQUIRE(p);
  CHECK((*p)[0] + (*p)[1] == q(1));
  for (const auto& r : rows) CHECK(dot(r, *p) > 0);
  CHECK(!open_cone_nonempty({{q(-1), q(1)}, {q(1), q(-1)}}, 2));
  // The second row is implied by the first.
  auto kept = remove_redundant_rows({{q(-2), q(1)}, {q(-1), q(1)}}, 2);
  CHECK(kept == std::vector<RationalVector>{{q(-2), q(1)}});
}

TEST_CASE("polynomial elimination") {
  auto x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  auto p = x * x * y + x * q(3) - Polynomial::constant(2, q(1));
  CHECK(p.degree_in(0) == 2);
  CHECK(p.evaluate({q(2), q(1, 2)}) == q(7));
  auto s = p.substitute(1, Polynomial::constant(2, q(1)) - x);  // y = 1 - x
  CHECK(s.evaluate({q(2), q(0)}) == q(1));
  CHECK(p.coefficient(0, 1).evaluate({q(0), q(0)}) == q(3));
  CHECK((p - p).is_zero());
}
