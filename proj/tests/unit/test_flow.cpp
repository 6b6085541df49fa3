#include <doctest.h>

#include <cmath>
#include <random>

#include "example.hpp"
#include "polyskel/flow.hpp"
#include "polyskel/verify.hpp"

using namespace testing;

namespace {

std::vector<double> vertex_point(const Polytope& p, VertexId v) {
  std::vector<double> x(p.facet_count(), 0.0);
  for (std::size_t j : p.vertex_tuple(v)) x[j] = 1.0;
  return x;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("h and its inverse") {
  CHECK(h(1, 1.0) == 0.0);
  CHECK(h(2, 0.5) == doctest::Approx(1.0));
  CHECK(h_inv(3, 0.0) == 1.0);
  CHECK(h_inv(1, 2.0) == doctest::Approx(std::exp(-2.0)));
  for (int n = 1; n <= 4; ++n)
    for (double x : {1e-6, 0.01, 0.3, 0.9, 1.0}) CHECK(h_inv(n, h(n, x)) == doctest::Approx(x).epsilon(1e-12));
  CHECK(h(2, 0.3) > h(2, 0.6));
  CHECK_THROWS_AS(h(1, 0.0), ValidationError);
  CHECK_THROWS_AS(h(0, 0.5), ValidationError);
}

TEST_CASE("rescaling round trip") {
  Example ex;
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.01, 0.25);
  for (int t = 0; t < 100; ++t) {
    const VertexId v = static_cast<VertexId>(t % 8);
    auto c = make_chart(ex.poly, ex.chi, v, 0.3, 0.25);
    std::vector<double> x = vertex_point(ex.poly, v);
    for (FacetId s : ex.poly.facets_of(v)) x[s] = u(rng);
    for (std::size_t j : ex.poly.vertex_tuple(v)) {
      const std::size_t other = j % 2 == 0 ? j + 1 : j - 1;
      x[j] = 1 - x[other];
    }
    auto y = c.rescale(x);
    CHECK(max_diff(c.unrescale(y), x) <= 1e-12);
    CHECK(max_diff(c.rescale_log(to_log(x)), y) <= 1e-12);
  }
  // On the sections y vanishes; with eps = 1, order one, y = -log(x/c).
  auto c1 = make_chart(ex.poly, ex.chi, 0, 1.0, 1.0);
  auto y = c1.rescale({1, 0.2, 1, 0.3, 1, 0.4});
  CHECK(y[1] == doctest::Approx(-std::log(0.2)));
  CHECK(y[0] == 0.0);
  CHECK_THROWS_AS(c1.rescale({1, 0, 0.5, 0.5, 1, 0}), ValidationError);
}

TEST_CASE("singular starts stay put") {
  Example ex;
  auto tr = integrate(ex.game, vertex_point(ex.poly, 3), 5.0);
  CHECK(max_diff(tr.states.back(), vertex_point(ex.poly, 3)) == 0.0);
  std::vector<double> qv{0.5, 0.5, 71.0 / 158, 87.0 / 158, 2.0 / 3, 1.0 / 3};
  // q is unstable; only the rounding of 71/158 grows.
  auto tq = integrate(ex.game, qv, 5.0);
  CHECK(max_diff(tq.states.back(), qv) < 1e-8);
}

TEST_CASE("trajectories stay on the prism and are deterministic") {
  Example ex;
  std::vector<double> x0{0.3, 0.7, 0.6, 0.4, 0.2, 0.8};
  auto a = integrate(ex.game, x0, 3.0, {}, {}, 0.1);
  auto b = integrate(ex.game, x0, 3.0, {}, {}, 0.1);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k] == b.states[k]);
    for (int g = 0; g < 3; ++g) CHECK(std::abs(a.states[k][2 * g] + a.states[k][2 * g + 1] - 1) < 1e-12);
  }
  CHECK(a.times.back() == doctest::Approx(3.0));
}

TEST_CASE("edge orbit reaches the target-end section") {
  Example ex;
  const VertexId from = ex.graph.source(kG5), to = ex.graph.target(kG5);
  const FacetId s = ex.poly.corner_facet(to, kG5);
  std::vector<double> x0 = vertex_point(ex.poly, from);
  x0[s] = 0.9;
  x0[s % 2 == 0 ? s + 1 : s - 1] = 0.1;
  auto tr = integrate(ex.game, x0, 100.0, {{s, 0.25, -1}});
  CHECK(tr.stop == Trajectory::Stop::event);
  REQUIRE(tr.events.size() == 1);
  CHECK(std::exp(tr.events[0].w[s]) == doctest::Approx(0.25).epsilon(1e-10));
  for (FacetId f : ex.poly.facets_of(to))
    if (f != s) CHECK(tr.states.back()[f] == 0.0);
}

TEST_CASE("numeric Poincare map along xi3") {
  Example ex;
  const auto& b = ex.plm.branches()[2];
  SamplingOptions so;
  auto smp = draw_sample(b.domain, 6, so, 0);
  REQUIRE(smp.valid);
  const double eps = 0.2;
  auto y = sample_point(smp, b.domain, eps, 0.5);
  auto c0 = make_chart(ex.poly, ex.chi, ex.graph.source(kG5), eps, 0.25);
  PoincareOptions po;
  po.eps = eps;
  auto r = numeric_poincare(ex.game, ex.graph, b.itinerary, c0.unrescale_log(y), po);
  REQUIRE(r.status == NumericPoincareResult::Status::ok);
  CHECK(r.sections.size() == 2 * b.itinerary.size() - 2);
  CHECK(r.sections.back().edge == kG8);
  auto x = from_log(ex.game, r.w);
  for (FacetId s : ex.poly.dual_support_edge(kG8).coords) {
    CHECK(x[s] > 0);
    CHECK(x[s] < 1);
  }
  // The same start does not follow xi1.
  auto wrong = numeric_poincare(ex.game, ex.graph, ex.plm.branches()[0].itinerary, c0.unrescale_log(y), po);
  CHECK(wrong.status == NumericPoincareResult::Status::mismatch);
  REQUIRE(wrong.actual);
  CHECK(wrong.actual->edge == 2);  // leaves v5 along g3 instead of g7
}

TEST_CASE("time reversal inverts the section map") {
  Example ex;
  RationalMatrix neg_a = ex.game.payoff() * RationalMatrix::identity(6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) neg_a(i, j) = -neg_a(i, j);
  auto back_game = GameModel::polymatrix(PrismType{{2, 2, 2}}, neg_a);
  auto back_chi = skeleton_polymatrix(back_game);
  CHECK(back_chi == ex.chi.negated());
  auto back_graph = build_flow_graph(back_chi, ex.poly, true);
  for (std::size_t k : {2u, 3u}) {
    const auto& b = ex.plm.branches()[k];
    auto smp = draw_sample(b.domain, 6, SamplingOptions{}, 1);
    REQUIRE(smp.valid);
    auto y = sample_point(smp, b.domain, 0.3, 0.5);
    auto c0 = make_chart(ex.poly, ex.chi, ex.graph.source(b.itinerary.front()), 0.3, 0.25);
    PoincareOptions po;
    po.eps = 0.3;
    const auto w0 = c0.unrescale_log(y);
    auto fwd = numeric_poincare(ex.game, ex.graph, b.itinerary, w0, po);
    REQUIRE(fwd.status == NumericPoincareResult::Status::ok);
    Itinerary rev(b.itinerary.rbegin(), b.itinerary.rend());
    po.source_end = false;
    auto bwd = numeric_poincare(back_game, back_graph, rev, fwd.w, po);
    REQUIRE(bwd.status == NumericPoincareResult::Status::ok);
    CHECK(max_diff(from_log(ex.game, bwd.w), from_log(ex.game, w0)) <= 1e-6);
  }
}

TEST_CASE("rescaled field tends to the skeleton character") {
  Example ex;
  FlowIntegrator integ(ex.game);
  const VertexId v = 0;
  double prev = INFINITY;
  for (double eps : {0.5, 0.4, 0.3, 0.2, 0.1, 0.05}) {
    auto c = make_chart(ex.poly, ex.chi, v, eps, 0.25);
    std::vector<double> y(6, 0.0);
    const double base = std::sqrt(eps);
    y[1] = 2 * base;
    y[3] = 3 * base;
    y[5] = 2.5 * base;
    auto w = c.unrescale_log(y);
    std::vector<double> dw;
    integ.rhs(w, dw);
    const double dt = 1e-2;
    std::vector<double> w1(w);
    for (std::size_t i = 0; i < 6; ++i) w1[i] += dt * dw[i];
    auto y1 = c.rescale_log(w1);
    double err = 0;
    for (FacetId s : ex.poly.facets_of(v))
      err = std::max(err, std::abs((y1[s] - y[s]) / (dt * eps * eps) - ex.chi.at(v, s).get_d()));
    // Below 0.2 the gap is at rounding level.
    if (eps >= 0.2) CHECK(err < prev);
    if (eps <= 0.1) CHECK(err < 1e-9);
    prev = err;
  }
}
