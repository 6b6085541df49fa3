#include <doctest.h>

#include <cmath>
#include <random>

#include "example.hpp"

using namespace testing;

namespace {

// Order of contact of the field with facet s, estimated from the slope of
// log|dx_s/dt| against log x_s along a ray leaving a generic facet point.
double numeric_order(const GameModel& g, FacetId s, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  const std::size_t n = g.strategies();
  std::vector<double> p(n), q(n);
  for (const auto& [b, e] : g.ranges()) {
    double sp = 0, sq = 0;
    for (std::size_t k = b; k < e; ++k) {
      p[k] = k == s ? 0.0 : u(rng);
      q[k] = u(rng);
      sp += p[k];
      sq += q[k];
    }
    for (std::size_t k = b; k < e; ++k) {
      p[k] /= sp;
      q[k] /= sq;
    }
  }
  auto xdot = [&](double t) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = (1 - t) * p[k] + t * q[k];
    return std::abs(eval_field(g, x)[s]);
  };
  const double t1 = 1e-4, t2 = 1e-5;
  const double a = xdot(t1), b = xdot(t2);
  if (a == 0 && b == 0) return INFINITY;
  return std::log(a / b) / std::log(t1 / t2);
}

std::vector<double> vertex_point(const Polytope& p, VertexId v) {
  std::vector<double> x(p.facet_count(), 0.0);
  for (std::size_t j : p.vertex_tuple(v)) x[j] = 1.0;
  return x;
}

}  // namespace

TEST_CASE("example skeleton character table") {
  Example ex;
  const long table[8][6] = {{0, -84, 0, 60, 0, -162},  {0, -93, 0, 33, 144, 0},   {0, 74, -60, 0, 0, 75},
                            {0, 65, -33, 0, -93, 0},   {84, 0, 0, -42, 0, -111},  {93, 0, 0, -69, 93, 0},
                            {-74, 0, 42, 0, 0, 126},   {-65, 0, 69, 0, -144, 0}};
  for (VertexId v = 0; v < 8; ++v)
    for (FacetId s = 0; s < 6; ++s) CHECK(ex.chi.at(v, s) == q(table[v][s]));
  for (int n : ex.chi.orders) CHECK(n == 1);
}

TEST_CASE("orders agree with the numeric contact oracle") {
  std::mt19937 rng(3);
  Example ex;
  for (FacetId s = 0; s < 6; ++s) CHECK(numeric_order(ex.game, s, rng) == doctest::Approx(1.0).epsilon(1e-2));
  auto lv = compactify_lv(int_matrix({{0, -1}, {1, 0}}), {q(1), q(-1)});
  auto chi = skeleton_replicator(lv.payoff());
  CHECK(chi.orders[2] == 2);
  CHECK(numeric_order(lv, 2, rng) == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(chi.orders[0] == 1);
  CHECK(numeric_order(lv, 0, rng) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("characters equal minus the transverse Jacobian eigenvalue at vertices") {
  Example ex;
  for (VertexId v = 0; v < 8; ++v) {
    auto j = jacobian(ex.game, vertex_point(ex.poly, v));
    for (FacetId s : ex.poly.facets_of(v))
      CHECK(ex.chi.at(v, s).get_d() == doctest::Approx(-j(s, s)).epsilon(1e-8));
  }
}

TEST_CASE("replicator case analysis") {
  auto zero = skeleton_replicator(RationalMatrix(3, 3));
  for (int n : zero.orders) CHECK(n == kInfiniteOrder);
  for (const auto& c : zero.chi) CHECK(c == 0);
  auto rps = int_matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
  auto chi = skeleton_replicator(rps);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(chi.orders[i] == 1);
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) CHECK(chi.at(j, i) == -rps(i, j));
  }
  // Compactified LV with skew A: the added facet has order 2 and chi = r.
  auto lv = compactify_lv(int_matrix({{0, -1}, {1, 0}}), {q(1), q(-1)});
  CHECK(lv.payoff() == int_matrix({{0, -1, 1}, {1, 0, -1}, {0, 0, 0}}));
  auto c2 = skeleton_replicator(lv.payoff());
  CHECK(c2.at(0, 2) == q(1));
  CHECK(c2.at(1, 2) == q(-1));
  auto lv0 = compactify_lv(RationalMatrix(2, 2), {q(0), q(0)});
  for (const auto& c : skeleton_replicator(lv0.payoff()).chi) CHECK(c == 0);
}

TEST_CASE("replicator and one-group polymatrix characters coincide") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> d(-4, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + trial % 2;
    RationalMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = Rational(d(rng));
    auto r = skeleton_replicator(a);
    auto p = skeleton_polymatrix(GameModel::polymatrix(PrismType{{static_cast<int>(n)}}, a));
    CHECK(r == p);
  }
  auto lv = compactify_lv(int_matrix({{0, -2}, {2, 0}}), {q(3), q(-1)});
  CHECK(skeleton_replicator(lv.payoff()) == skeleton_polymatrix(GameModel::polymatrix(PrismType{{3}}, lv.payoff())));
}

TEST_CASE("zero polymatrix game has infinite orders") {
  auto chi = skeleton_polymatrix(GameModel::polymatrix(PrismType{{2, 3}}, RationalMatrix(5, 5)));
  for (int n : chi.orders) CHECK(n == kInfiniteOrder);
  for (const auto& c : chi.chi) CHECK(c == 0);
  CHECK(order_to_string(kInfiniteOrder) == "inf");
}

TEST_CASE("field evaluation") {
  Example ex;
  for (VertexId v = 0; v < 8; ++v)
    for (double c : eval_field(ex.game, vertex_point(ex.poly, v))) CHECK(c == 0.0);
  RationalVector qv{q(1, 2), q(1, 2), q(71, 158), q(87, 158), q(2, 3), q(1, 3)};
  for (const auto& c : eval_field_exact(ex.game, qv)) CHECK(c == 0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(6);
    for (int a = 0; a < 3; ++a) {
      x[2 * a] = u(rng);
      x[2 * a + 1] = 1 - x[2 * a];
    }
    if (t % 3 == 0) {
      x[2] = 0;
      x[3] = 1;
    }
    auto f = eval_field(ex.game, x);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(f[2 * a] + f[2 * a + 1]) <= 1e-12);
    if (t % 3 == 0) CHECK(f[2] == 0.0);
  }
  CHECK_THROWS_AS(eval_field(ex.game, {0.5, 0.6, 0.5, 0.5, 0.5, 0.5}), ValidationError);
}

TEST_CASE("equilibria of the example") {
  Example ex;
  auto eqs = equilibria(ex.game);
  auto find = [&](const RationalVector& p) {
    for (const auto& e : eqs)
      if (e.status == FaceEquilibrium::Status::isolated && e.point == p) return &e;
    return static_cast<const FaceEquilibrium*>(nullptr);
  };
  const auto* in = find({q(1, 2), q(1, 2), q(71, 158), q(87, 158), q(2, 3), q(1, 3)});
  REQUIRE(in);
  CHECK(in->interior);
  REQUIRE(in->spectrum.size() == 3);
  int pairs = 0;
  for (const auto& z : in->spectrum) {
    if (std::abs(z.imag()) > 1) {
      CHECK(z.real() == doctest::Approx(-0.545809).epsilon(1e-5));
      CHECK(std::abs(z.imag()) == doctest::Approx(37.0244).epsilon(1e-5));
      ++pairs;
    } else {
      CHECK(z.real() == doctest::Approx(-2.90838).epsilon(1e-5));
    }
  }
  CHECK(pairs == 2);
  CHECK(find({q(7, 17), q(10, 17), q(37, 79), q(42, 79), q(1), q(0)}));
  CHECK(find({q(23, 34), q(11, 34), q(65, 158), q(93, 158), q(0), q(1)}));
  std::size_t interior = 0;
  for (const auto& e : eqs) interior += e.interior && e.status == FaceEquilibrium::Status::isolated;
  CHECK(interior == 1);
}
