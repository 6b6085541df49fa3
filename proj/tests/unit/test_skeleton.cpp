#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "example.hpp"

using namespace testing;

namespace {

Itinerary path(std::initializer_list<int> one_based) {
  Itinerary out;
  for (int k : one_based) out.push_back(static_cast<EdgeId>(k - 1));
  return out;
}

RationalMatrix rm(const std::vector<std::vector<Rational>>& rows) { return RationalMatrix::from_rows(rows); }

RationalVector full(std::size_t n, std::initializer_list<std::pair<int, Rational>> entries) {
  RationalVector v(n, Rational(0));
  for (const auto& [k, x] : entries) v[static_cast<std::size_t>(k - 1)] = x;
  return v;
}

}  // namespace

TEST_CASE("vertex classification") {
  Example ex;
  for (VertexId v = 0; v < 8; ++v) CHECK(classify_vertex(ex.chi, ex.poly, v) == VertexType::saddle);
  SkeletonField c(8, 6);
  for (FacetId s : ex.poly.facets_of(0)) c.at(0, s) = 1;
  for (FacetId s : ex.poly.facets_of(1)) c.at(1, s) = -1;
  CHECK(classify_vertex(c, ex.poly, 0) == VertexType::attractive);
  CHECK(classify_vertex(c, ex.poly, 1) == VertexType::repelling);
}

TEST_CASE("edge classification and graph") {
  Example ex;
  auto c5 = classify_edge(ex.chi, ex.poly, kG5);
  CHECK(c5.kind == EdgeClass::Kind::flowing);
  CHECK(c5.source == 2);
  CHECK(c5.target == 0);
  auto c8 = classify_edge(ex.chi, ex.poly, kG8);
  CHECK(c8.source == 5);
  CHECK(c8.target == 7);
  // All twelve edges flow; orientations as source/target vertex numbers.
  const int arcs[12][2] = {{1, 2}, {4, 3}, {5, 6}, {8, 7}, {3, 1}, {4, 2},
                           {5, 7}, {6, 8}, {1, 5}, {2, 6}, {7, 3}, {8, 4}};
  CHECK(ex.graph.arcs().size() == 12);
  CHECK(ex.graph.regular());
  for (EdgeId e = 0; e < 12; ++e) {
    CHECK(ex.graph.source(e) + 1 == static_cast<std::size_t>(arcs[e][0]));
    CHECK(ex.graph.target(e) + 1 == static_cast<std::size_t>(arcs[e][1]));
  }
  // Zero character: all neutral, regular, no arcs.
  SkeletonField zero(8, 6);
  auto gz = build_flow_graph(zero, ex.poly);
  CHECK(gz.arcs().empty());
  CHECK(gz.regular());
  CHECK(classify_edge(zero, ex.poly, 0).kind == EdgeClass::Kind::neutral);
  // -chi reverses every arc.
  auto neg = ex.chi.negated();
  auto gn = build_flow_graph(neg, ex.poly);
  for (EdgeId e = 0; e < 12; ++e) {
    CHECK(gn.source(e) == ex.graph.target(e));
    CHECK(gn.target(e) == ex.graph.source(e));
  }
  // One zero end makes the edge undefined.
  SkeletonField u = ex.chi;
  u.at(0, ex.poly.corner_facet(0, kG5)) = 0;
  CHECK(classify_edge(u, ex.poly, kG5).kind == EdgeClass::Kind::undefined);
  CHECK(!build_flow_graph(u, ex.poly).regular());
  CHECK_THROWS_AS(build_flow_graph(u, ex.poly, true), HypothesisError);
}

TEST_CASE("transition map (g5, g9) at v1") {
  Example ex;
  auto t = transition_map(ex.chi, ex.graph, kG5, 8);
  CHECK(t.map.pivot == 1);
  CHECK(t.map.vertex == 0);
  const auto& m = t.map.matrix;
  CHECK(m(3, 1) == q(5, 7));
  CHECK(m(5, 1) == q(1) - q(1) - q(27, 14));
  CHECK(m(5, 5) == q(1));
  CHECK(m(1, 1) == q(0));
  REQUIRE(t.domain.rows.size() == 1);
  CHECK(t.domain.rows[0] == full(6, {{2, q(-27)}, {6, q(14)}}));
  CHECK_THROWS_AS(transition_map(ex.chi, ex.graph, kG5, kG8), ValidationError);
}

TEST_CASE("structural sets") {
  Example ex;
  auto search = find_structural_sets(ex.graph);
  CHECK(!search.acyclic);
  CHECK(std::find(search.sets.begin(), search.sets.end(), std::vector<EdgeId>{kG5, kG8}) != search.sets.end());
  for (const auto& s : search.sets) CHECK(certify_structural_set(ex.graph, s).valid());
  for (std::size_t k = 1; k < search.sets.size(); ++k) CHECK(search.sets[k - 1].size() <= search.sets[k].size());
  auto bad = certify_structural_set(ex.graph, {kG5});
  CHECK(!bad.acyclic_after_removal);
  CHECK(bad.witness_cycle);

  // Rock-paper-scissors: one 3-cycle, every single arc is structural.
  auto rps = skeleton_replicator(int_matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}));
  auto tri = Polytope::simplex(3);
  auto g = build_flow_graph(rps, tri);
  CHECK(g.arcs().size() == 3);
  auto ss = find_structural_sets(g);
  CHECK(ss.sets.size() == 3);
  for (const auto& s : ss.sets) CHECK(s.size() == 1);
  auto br = enumerate_branches(g, ss.sets[0]);
  REQUIRE(br.size() == 1);
  CHECK(br[0].size() == 4);

  // A segment has no cycles.
  auto seg = Polytope::prism(PrismType{{2}});
  SkeletonField c(2, 2);
  c.at(0, 1) = -1;
  c.at(1, 0) = 1;
  auto gs = build_flow_graph(c, seg);
  auto none = find_structural_sets(gs);
  CHECK(none.acyclic);
  REQUIRE(none.sets.size() == 1);
  CHECK(none.sets[0].empty());
}

TEST_CASE("branches of S = {g5, g8}") {
  Example ex;
  auto its = enumerate_branches(ex.graph, {kG5, kG8});
  std::vector<Itinerary> want{path({5, 9, 7, 11, 5}), path({5, 1, 10, 8}),  path({5, 9, 3, 8}),
                              path({8, 4, 11, 5}),    path({8, 12, 2, 5}), path({8, 12, 6, 10, 8})};
  CHECK(its == want);
  CHECK_THROWS_AS(enumerate_branches(ex.graph, {kG5}), HypothesisError);
  // With every arc in S the branches are the composable arc pairs.
  auto all = ex.graph.arcs();
  std::size_t pairs = 0;
  for (EdgeId a : all)
    for (EdgeId b : all) pairs += ex.graph.target(a) == ex.graph.source(b);
  CHECK(enumerate_branches(ex.graph, all).size() == pairs);
}

TEST_CASE("branch matrices and domains") {
  Example ex;
  const auto& br = ex.plm.branches();
  REQUIRE(br.size() == 6);
  std::vector<RationalMatrix> want{
      rm({{q(1), q(0)}, {q(-1343, 3626), q(1)}}),
      rm({{q(11, 23), q(52, 207)}, {q(1445, 713), q(-1180, 2139)}}),
      rm({{q(2900, 5957), q(210, 851)}, {q(11594, 5957), q(-434, 851)}}),
      rm({{q(7, 10), q(11, 40)}, {q(357, 148), q(-145, 296)}}),
      rm({{q(14717, 20150), q(81, 310)}, {q(3723, 1612), q(-55, 124)}}),
      rm({{q(1), q(0)}, {q(-21488, 22165), q(1)}}),
  };
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(br[k].name == "xi" + std::to_string(k + 1));
    CHECK(br[k].restricted_matrix(ex.poly) == want[k]);
  }
  // Domain rows as primitive vectors on (u2,u6) resp. (u1,u5).
  auto rows = [&](std::size_t k) {
    std::set<RationalVector> s;
    for (std::size_t r = 0; r < br[k].domain.rows.size(); ++r) s.insert(br[k].domain.restricted_row(r));
    return s;
  };
  using S = std::set<RationalVector>;
  CHECK(rows(0) == S{{q(-187), q(49)}});
  CHECK(rows(1) == S{{q(27), q(-14)}});
  CHECK(rows(2) == S{{q(-27), q(14)}, {q(187), q(-49)}});
  CHECK(rows(3) == S{{q(144), q(-65)}});
  CHECK(rows(4) == S{{q(-144), q(65)}, {q(3723), q(-715)}});
  CHECK(rows(5) == S{{q(-3723), q(715)}});
}

TEST_CASE("branch map equals the product of transitions") {
  Example ex;
  for (const auto& b : ex.plm.branches()) {
    RationalMatrix prod = RationalMatrix::identity(6);
    for (std::size_t j = 0; j + 1 < b.itinerary.size(); ++j)
      prod = transition_map(ex.chi, ex.graph, b.itinerary[j], b.itinerary[j + 1]).map.matrix * prod;
    CHECK(prod == b.matrix);
    // A prefix domain contains the whole branch domain.
    Itinerary pre(b.itinerary.begin(), b.itinerary.begin() + 2);
    auto first = transition_map(ex.chi, ex.graph, pre[0], pre[1]);
    std::mt19937 rng(9);
    for (int t = 0; t < 20; ++t) {
      auto u = random_point(b.domain, 6, rng);
      if (u) CHECK(first.domain.contains(*u));
    }
  }
}

TEST_CASE("skeleton Poincare map") {
  Example ex;
  auto a = ex.plm.apply(kG5, full(6, {{6, q(1)}}));
  REQUIRE(a.status == PoincareStep::Status::ok);
  CHECK(ex.plm.branches()[a.branch].name == "xi1");
  CHECK(a.image == full(6, {{6, q(1)}}));
  auto b = ex.plm.apply(kG8, full(6, {{1, q(1)}}));
  REQUIRE(b.status == PoincareStep::Status::ok);
  CHECK(ex.plm.branches()[b.branch].name == "xi4");
  CHECK(b.image == full(6, {{2, q(7, 10)}, {6, q(357, 148)}}));
  auto c = ex.plm.apply(kG5, full(6, {{2, q(49)}, {6, q(187)}}));
  CHECK(c.status == PoincareStep::Status::boundary);
  // Images of domain points lie in the target sector.
  std::mt19937 rng(21);
  for (const auto& br : ex.plm.branches()) {
    for (int t = 0; t < 20; ++t) {
      auto u = random_point(br.domain, 6, rng);
      REQUIRE(u);
      auto st = ex.plm.apply(br.source, *u);
      REQUIRE(st.status == PoincareStep::Status::ok);
      const auto sup = ex.poly.dual_support_edge(br.target).coords;
      for (FacetId s = 0; s < 6; ++s) {
        if (std::find(sup.begin(), sup.end(), s) != sup.end())
          CHECK(st.image[s] > 0);
        else
          CHECK(st.image[s] == 0);
      }
    }
  }
}

TEST_CASE("forward and backward iteration") {
  Example ex;
  auto neg = ex.chi.negated();
  auto gneg = build_flow_graph(neg, ex.poly, true);
  auto back = PiecewiseLinearMap::build(neg, gneg, {kG5, kG8});
  // The boundary ray of xi1 is invariant.
  auto ray = iterate(ex.plm, back, kG5, full(6, {{6, q(1)}}), 50, Direction::forward);
  CHECK(ray.completed);
  for (const auto& [e, u] : ray.points) {
    CHECK(e == kG5);
    CHECK(u == full(6, {{6, q(1)}}));
  }
  std::mt19937 rng(4);
  int checked = 0;
  for (int t = 0; t < 20; ++t) {
    RationalVector u(6, Rational(0));
    std::uniform_int_distribution<long> d(1, 1000);
    u[1] = Rational(d(rng));
    u[5] = Rational(d(rng));
    auto f = iterate(ex.plm, back, kG5, u, 5, Direction::forward);
    if (!f.completed) continue;
    auto [e, w] = f.points.back();
    auto b = iterate(ex.plm, back, e, w, 5, Direction::backward);
    REQUIRE(b.completed);
    CHECK(b.points.back().first == kG5);
    CHECK(b.points.back().second == u);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("random transition maps") {
  std::mt19937 rng(2024);
  auto poly = Polytope::prism(PrismType{{2, 2, 2}});
  int maps = 0;
  while (maps < 100) {
    auto chi = random_character(poly, rng);
    auto g = build_flow_graph(chi, poly, true);
    auto gneg = build_flow_graph(chi.negated(), poly, true);
    for (EdgeId a : g.arcs())
      for (EdgeId b : g.out_arcs(g.target(a))) {
        auto t = transition_map(chi, g, a, b);
        auto inv = transition_map(chi.negated(), gneg, b, a);
        const auto sup = poly.dual_support_edge(a).coords;
        auto prod = inv.map.matrix * t.map.matrix;
        for (FacetId s : sup) CHECK(prod.col(s) == RationalMatrix::identity(6).col(s));
        if (t.domain.empty) continue;
        auto u = random_point(t.domain, 6, rng);
        if (!u) continue;
        auto img = t.map.matrix * *u;
        CHECK(img[t.map.pivot] == 0);
        const auto tsup = poly.dual_support_edge(b).coords;
        for (FacetId s = 0; s < 6; ++s) {
          if (std::find(tsup.begin(), tsup.end(), s) != tsup.end())
            CHECK(img[s] > 0);
          else
            CHECK(img[s] == 0);
        }
        ++maps;
      }
  }
}

TEST_CASE("partition hypotheses of the example") {
  Example ex;
  auto h = check_partition_hypotheses(ex.chi, ex.graph);
  CHECK(h.holds());
  // Monte-Carlo: almost every section point has a first step.
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (EdgeId e : {kG5, kG8}) {
    const auto sup = ex.poly.dual_support_edge(e).coords;
    int ok = 0;
    for (int t = 0; t < 2000; ++t) {
      std::vector<double> x(6, 0.0);
      x[sup[0]] = u(rng);
      x[sup[1]] = 1 - x[sup[0]];
      ok += ex.plm.apply(e, x, 1e-9).status == PoincareStep::Status::ok;
    }
    CHECK(ok >= 1998);
  }
}
