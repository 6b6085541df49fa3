#include "polyskel/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "polyskel/exact_lp.hpp"

namespace polyskel {

std::string to_string(VertexType t) {
  switch (t) {
    case VertexType::repelling: return "repelling";
    case VertexType::attractive: return "attractive";
    case VertexType::saddle: return "saddle";
  }
  return "?";
}

std::string to_string(EdgeClass::Kind k) {
  switch (k) {
    case EdgeClass::Kind::flowing: return "flowing";
    case EdgeClass::Kind::neutral: return "neutral";
    case EdgeClass::Kind::attracting: return "attracting";
    case EdgeClass::Kind::repelling: return "repelling";
    case EdgeClass::Kind::undefined: return "undefined";
  }
  return "?";
}

VertexType classify_vertex(const SkeletonField& chi, const Polytope& poly, VertexId v) {
  bool nonpos = true, nonneg = true;
  for (FacetId s : poly.facets_of(v)) {
    if (chi.at(v, s) > 0) nonpos = false;
    if (chi.at(v, s) < 0) nonneg = false;
  }
  if (nonpos) return VertexType::repelling;
  if (nonneg) return VertexType::attractive;
  return VertexType::saddle;
}

EdgeClass classify_edge(const SkeletonField& chi, const Polytope& poly, EdgeId e) {
  const Edge& g = poly.edge(e);
  const int sa = sign(chi.at(g.a, poly.corner_facet(g.a, e)));
  const int sb = sign(chi.at(g.b, poly.corner_facet(g.b, e)));
  EdgeClass c;
  if (sa == 0 && sb == 0) {
    c.kind = EdgeClass::Kind::neutral;
  } else if (sa == 0 || sb == 0) {
    c.kind = EdgeClass::Kind::undefined;
  } else if (sa * sb < 0) {
    c.kind = EdgeClass::Kind::flowing;
    c.source = sa < 0 ? g.a : g.b;
    c.target = sa < 0 ? g.b : g.a;
  } else {
    c.kind = sa < 0 ? EdgeClass::Kind::attracting : EdgeClass::Kind::repelling;
  }
  return c;
}

FlowGraph::FlowGraph(const Polytope& poly, std::vector<EdgeClass> classes)
    : poly_(&poly), classes_(std::move(classes)), out_(poly.vertex_count()), in_(poly.vertex_count()) {
  for (EdgeId e = 0; e < classes_.size(); ++e) {
    if (classes_[e].kind == EdgeClass::Kind::flowing) {
      arcs_.push_back(e);
      out_[classes_[e].source].push_back(e);
      in_[classes_[e].target].push_back(e);
    } else if (classes_[e].kind == EdgeClass::Kind::undefined) {
      undefined_.push_back(e);
    }
  }
}

std::optional<std::vector<EdgeId>> FlowGraph::find_cycle(const std::vector<EdgeId>& removed) const {
  const std::size_t nv = poly_->vertex_count();
  std::vector<char> skip(classes_.size(), 0);
  for (EdgeId e : removed) skip.at(e) = 1;
  std::vector<int> color(nv, 0);
  std::vector<EdgeId> via(nv, 0);
  std::optional<std::vector<EdgeId>> found;
  std::function<bool(VertexId)> dfs = [&](VertexId v) {
    color[v] = 1;
    for (EdgeId e : out_[v]) {
      if (skip[e]) continue;
      VertexId w = classes_[e].target;
      if (color[w] == 1) {
        std::vector<EdgeId> cyc{e};
        VertexId u = v;
        while (u != w) {
          cyc.push_back(via[u]);
          u = classes_[via[u]].source;
        }
        std::reverse(cyc.begin(), cyc.end());
        found = cyc;
        return true;
      }
      if (color[w] == 0) {
        via[w] = e;
        if (dfs(w)) return true;
      }
    }
    color[v] = 2;
    return false;
  };
  for (VertexId v = 0; v < nv; ++v)
    if (color[v] == 0 && dfs(v)) return found;
  return std::nullopt;
}

FlowGraph build_flow_graph(const SkeletonField& chi, const Polytope& poly, bool strict) {
  if (chi.vertices != poly.vertex_count() || chi.facets != poly.facet_count())
    throw ValidationError("skeleton field does not match the polytope");
  std::vector<EdgeClass> classes;
  for (EdgeId e = 0; e < poly.edge_count(); ++e) classes.push_back(classify_edge(chi, poly, e));
  FlowGraph g(poly, std::move(classes));
  if (strict && !g.regular()) {
    std::string names;
    for (EdgeId e : g.undefined_edges()) names += (names.empty() ? "" : ", ") + Polytope::edge_name(e);
    throw HypothesisError("skeleton is not regular; undefined edges: " + names);
  }
  return g;
}

RationalVector ConeDomain::restricted_row(std::size_t k) const {
  RationalVector r;
  for (FacetId s : support.coords) r.push_back(rows.at(k)[s]);
  return r;
}

bool ConeDomain::contains(const RationalVector& u) const {
  if (empty) return false;
  bool nonzero = false;
  for (FacetId s : support.coords) {
    if (u.at(s) < 0) return false;
    nonzero = nonzero || u[s] > 0;
  }
  if (!nonzero) return false;
  for (const auto& r : rows)
    if (dot(r, u) <= 0) return false;
  return true;
}

double ConeDomain::row_slack(const std::vector<double>& u) const {
  double total = 0;
  for (FacetId s : support.coords) total += std::abs(u.at(s));
  if (total == 0) return -1;
  double m = std::numeric_limits<double>::infinity();
  for (FacetId s : support.coords)
    if (u[s] < 0) m = std::min(m, u[s] / total);
  for (const auto& r : rows) {
    double v = 0, scale = 0;
    for (FacetId s : support.coords) {
      double a = r[s].get_d();
      v += a * u[s];
      scale = std::max(scale, std::abs(a));
    }
    m = std::min(m, v / (scale * total));
  }
  return m;
}

double ConeDomain::slack(const std::vector<double>& u) const {
  double total = 0;
  for (FacetId s : support.coords) total += std::abs(u.at(s));
  if (total == 0) return -1;
  double m = std::numeric_limits<double>::infinity();
  for (FacetId s : support.coords) m = std::min(m, u[s] / total);
  for (const auto& r : rows) {
    double v = 0, scale = 0;
    for (FacetId s : support.coords) {
      double a = r[s].get_d();
      v += a * u[s];
      scale = std::max(scale, std::abs(a));
    }
    m = std::min(m, v / (scale * total));
  }
  return m;
}

bool ConeDomain::contains(const std::vector<double>& u, double tol) const {
  return !empty && row_slack(u) > tol;
}

namespace {

// Raw domain rows of L_{in,out} at v: e_s - (chi_s / chi_pivot) e_pivot.
std::vector<RationalVector> raw_transition_rows(const SkeletonField& chi, const Polytope& poly,
                                                VertexId v, FacetId pivot) {
  std::vector<RationalVector> rows;
  const Rational cp = chi.at(v, pivot);
  for (FacetId s : poly.facets_of(v)) {
    if (s == pivot) continue;
    RationalVector r(poly.facet_count(), Rational(0));
    r[s] = 1;
    r[pivot] -= chi.at(v, s) / cp;
    rows.push_back(std::move(r));
  }
  return rows;
}

RationalMatrix transition_matrix(const SkeletonField& chi, const Polytope& poly, VertexId v,
                                 FacetId pivot) {
  const std::size_t nf = poly.facet_count();
  RationalMatrix m = RationalMatrix::identity(nf);
  const Rational cp = chi.at(v, pivot);
  for (FacetId s = 0; s < nf; ++s) m(s, pivot) -= chi.at(v, s) / cp;
  return m;
}

ConeDomain make_domain(const SectorSupport& support, const std::vector<RationalVector>& raw,
                       std::size_t nf) {
  ConeDomain d;
  d.support = support;
  std::vector<RationalVector> rows;
  for (const auto& r : raw) {
    RationalVector x(nf, Rational(0));
    bool pos = false, neg = false;
    for (FacetId s : support.coords) {
      x[s] = r[s];
      if (r[s] > 0) pos = true;
      if (r[s] < 0) neg = true;
    }
    if (!pos) {  // zero or nonpositive on the open orthant: never satisfied
      d.empty = true;
      continue;
    }
    if (!neg) continue;  // implied by u > 0
    x = primitive(x);
    if (std::find(rows.begin(), rows.end(), x) == rows.end()) rows.push_back(std::move(x));
  }
  if (d.empty) return d;
  const std::size_t m = support.coords.size();
  auto restrict = [&](const RationalVector& r) {
    RationalVector out;
    for (FacetId s : support.coords) out.push_back(r[s]);
    return out;
  };
  std::vector<RationalVector> small;
  for (const auto& r : rows) small.push_back(restrict(r));
  if (!open_cone_nonempty(small, m)) {
    d.empty = true;
    return d;
  }
  std::vector<RationalVector> kept = remove_redundant_rows(small, m);
  for (const auto& r : rows)
    if (std::find(kept.begin(), kept.end(), restrict(r)) != kept.end()) d.rows.push_back(r);
  return d;
}

}  // namespace

Transition transition_map(const SkeletonField& chi, const FlowGraph& graph, EdgeId in, EdgeId out) {
  const Polytope& poly = graph.polytope();
  if (!graph.is_arc(in) || !graph.is_arc(out))
    throw ValidationError("transition needs two flowing edges");
  if (graph.target(in) != graph.source(out))
    throw ValidationError(Polytope::edge_name(in) + " and " + Polytope::edge_name(out) +
                          " are not composable");
  const VertexId v = graph.target(in);
  const FacetId pivot = poly.corner_facet(v, out);
  if (chi.at(v, pivot) == 0) throw HypothesisError("pivot character is zero");
  Transition t;
  t.map.matrix = transition_matrix(chi, poly, v, pivot);
  t.map.pivot = pivot;
  t.map.from = in;
  t.map.to = out;
  t.map.vertex = v;
  t.domain = make_domain(poly.dual_support_edge(in), raw_transition_rows(chi, poly, v, pivot),
                         poly.facet_count());
  return t;
}

StructuralCertificate certify_structural_set(const FlowGraph& graph, const std::vector<EdgeId>& s) {
  StructuralCertificate c;
  c.witness_cycle = graph.find_cycle(s);
  c.acyclic_after_removal = !c.witness_cycle.has_value();
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::vector<EdgeId> rest;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != k) rest.push_back(s[j]);
    c.member_needed.push_back(graph.find_cycle(rest).has_value());
  }
  return c;
}

bool StructuralCertificate::valid() const {
  return acyclic_after_removal &&
         std::all_of(member_needed.begin(), member_needed.end(), [](bool b) { return b; });
}

StructuralSetSearch find_structural_sets(const FlowGraph& graph, std::size_t limit) {
  StructuralSetSearch res;
  if (!graph.regular())
    throw HypothesisError("structural sets need a regular skeleton");
  if (!graph.find_cycle()) {
    res.acyclic = true;
    res.sets.push_back({});
    return res;
  }
  std::set<std::vector<EdgeId>> visited, found;
  // Each minimal hitting set is reached by always branching on an arc of a
  // cycle that the partial set misses.
  std::function<void(std::vector<EdgeId>)> search = [&](std::vector<EdgeId> s) {
    if (found.size() >= limit) {
      res.truncated = true;
      return;
    }
    std::sort(s.begin(), s.end());
    if (!visited.insert(s).second) return;
    auto cyc = graph.find_cycle(s);
    if (!cyc) {
      if (certify_structural_set(graph, s).valid()) found.insert(s);
      return;
    }
    for (EdgeId e : *cyc) {
      std::vector<EdgeId> t = s;
      t.push_back(e);
      search(t);
    }
  };
  search({});
  res.sets.assign(found.begin(), found.end());
  std::stable_sort(res.sets.begin(), res.sets.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return res;
}

std::vector<Itinerary> enumerate_branches(const FlowGraph& graph, const std::vector<EdgeId>& s) {
  for (EdgeId e : s)
    if (!graph.is_arc(e)) throw ValidationError(Polytope::edge_name(e) + " is not a flowing edge");
  if (auto cyc = graph.find_cycle(s)) {
    std::string names;
    for (EdgeId e : *cyc) names += (names.empty() ? "" : ",") + Polytope::edge_name(e);
    throw HypothesisError("edge set is not structural; cycle avoiding it: " + names);
  }
  std::vector<char> in_s(graph.classes().size(), 0);
  for (EdgeId e : s) in_s[e] = 1;
  std::vector<Itinerary> out;
  std::function<void(Itinerary&)> walk = [&](Itinerary& path) {
    for (EdgeId e : graph.out_arcs(graph.target(path.back()))) {
      path.push_back(e);
      if (in_s[e])
        out.push_back(path);
      else
        walk(path);
      path.pop_back();
    }
  };
  std::vector<EdgeId> sorted_s = s;
  std::sort(sorted_s.begin(), sorted_s.end());
  for (EdgeId e : sorted_s) {
    Itinerary path{e};
    walk(path);
  }
  std::stable_sort(out.begin(), out.end(), [](const Itinerary& a, const Itinerary& b) {
    if (a.front() != b.front()) return a.front() < b.front();
    if (a.back() != b.back()) return a.back() < b.back();
    return a < b;
  });
  return out;
}

RationalMatrix Branch::restricted_matrix(const Polytope& poly) const {
  return matrix.submatrix(poly.dual_support_edge(target).coords, poly.dual_support_edge(source).coords);
}

Branch branch_map(const SkeletonField& chi, const FlowGraph& graph, const Itinerary& xi) {
  if (xi.size() < 2) throw ValidationError("an itinerary needs at least two edges");
  const Polytope& poly = graph.polytope();
  const std::size_t nf = poly.facet_count();
  RationalMatrix m = RationalMatrix::identity(nf);
  std::vector<RationalVector> raw;
  for (std::size_t j = 1; j < xi.size(); ++j) {
    const EdgeId in = xi[j - 1], out = xi[j];
    if (!graph.is_arc(in) || !graph.is_arc(out) || graph.target(in) != graph.source(out))
      throw ValidationError("itinerary is not a flowing path at step " + std::to_string(j));
    const VertexId v = graph.target(in);
    const FacetId pivot = poly.corner_facet(v, out);
    if (chi.at(v, pivot) == 0) throw HypothesisError("pivot character is zero");
    for (const auto& r : raw_transition_rows(chi, poly, v, pivot)) raw.push_back(left_multiply(r, m));
    m = transition_matrix(chi, poly, v, pivot) * m;
  }
  Branch b;
  b.itinerary = xi;
  b.source = xi.front();
  b.target = xi.back();
  b.matrix = m;
  b.domain = make_domain(poly.dual_support_edge(b.source), raw, nf);
  return b;
}

PiecewiseLinearMap PiecewiseLinearMap::build(const SkeletonField& chi, const FlowGraph& graph,
                                             const std::vector<EdgeId>& s) {
  PiecewiseLinearMap p;
  p.poly_ = &graph.polytope();
  p.s_ = s;
  std::sort(p.s_.begin(), p.s_.end());
  const auto its = enumerate_branches(graph, p.s_);
  for (std::size_t k = 0; k < its.size(); ++k) {
    Branch b = branch_map(chi, graph, its[k]);
    b.name = "xi" + std::to_string(k + 1);
    if (b.domain.empty)
      p.empty_.push_back(its[k]);
    else
      p.branches_.push_back(std::move(b));
  }
  return p;
}

std::optional<std::size_t> PiecewiseLinearMap::find_branch(const std::string& name) const {
  for (std::size_t k = 0; k < branches_.size(); ++k)
    if (branches_[k].name == name) return k;
  return std::nullopt;
}

PoincareStep PiecewiseLinearMap::apply(EdgeId edge, const RationalVector& u) const {
  PoincareStep st;
  st.status = PoincareStep::Status::outside;
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const Branch& b = branches_[k];
    if (b.source != edge) continue;
    if (b.domain.contains(u)) {
      st.status = PoincareStep::Status::ok;
      st.branch = k;
      st.edge = b.target;
      st.image = b.matrix * u;
      return st;
    }
    bool closure = true;
    for (FacetId s : b.domain.support.coords)
      if (u.at(s) < 0) closure = false;
    for (const auto& r : b.domain.rows)
      if (dot(r, u) < 0) closure = false;
    if (closure) st.status = PoincareStep::Status::boundary;
  }
  return st;
}

PoincareStepD PiecewiseLinearMap::apply(EdgeId edge, const std::vector<double>& u, double tol) const {
  PoincareStepD st;
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const Branch& b = branches_[k];
    if (b.source != edge) continue;
    if (b.domain.empty) continue;
    const double sl = b.domain.row_slack(u);
    if (sl > tol) {
      st.status = PoincareStep::Status::ok;
      st.branch = k;
      st.edge = b.target;
      const std::size_t nf = u.size();
      st.image.assign(nf, 0.0);
      for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < nf; ++j)
          if (u[j] != 0.0 && b.matrix(i, j) != 0) st.image[i] += b.matrix(i, j).get_d() * u[j];
      return st;
    }
    if (sl >= -tol) st.status = PoincareStep::Status::boundary;
  }
  return st;
}

PoincareStep s_poincare(const PiecewiseLinearMap& plm, EdgeId edge, const RationalVector& u) {
  return plm.apply(edge, u);
}

IterateResult iterate(const PiecewiseLinearMap& forward, const PiecewiseLinearMap& backward,
                      EdgeId edge, const RationalVector& u, std::size_t steps, Direction dir) {
  const PiecewiseLinearMap& map = dir == Direction::forward ? forward : backward;
  IterateResult r;
  r.points.emplace_back(edge, u);
  for (std::size_t k = 0; k < steps; ++k) {
    PoincareStep st = map.apply(r.points.back().first, r.points.back().second);
    if (st.status != PoincareStep::Status::ok) {
      r.stop_step = k;
      r.stop_reason = st.status;
      return r;
    }
    r.branches.push_back(st.branch);
    r.points.emplace_back(st.edge, std::move(st.image));
  }
  r.completed = true;
  r.stop_step = steps;
  return r;
}

PartitionHypotheses check_partition_hypotheses(const SkeletonField& chi, const FlowGraph& graph) {
  PartitionHypotheses h;
  const Polytope& poly = graph.polytope();
  for (VertexId v = 0; v < poly.vertex_count(); ++v)
    if (classify_vertex(chi, poly, v) != VertexType::saddle) h.all_saddles = false;
  for (const auto& c : graph.classes())
    if (c.kind == EdgeClass::Kind::attracting || c.kind == EdgeClass::Kind::repelling)
      h.no_attracting_or_repelling_edges = false;
  return h;
}

}  // namespace polyskel
