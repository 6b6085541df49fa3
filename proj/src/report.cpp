#include "polyskel/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace polyskel {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json rational_json(const Rational& q) { return to_string(q); }

json rational_json(const RationalVector& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

json matrix_json(const RationalMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(rational_json(m.row(i)));
  return a;
}

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return from_double(j.get<double>());
  throw ValidationError("expected a rational, got " + j.dump());
}

namespace {

json edge_names(const std::vector<EdgeId>& es) {
  json a = json::array();
  for (EdgeId e : es) a.push_back(Polytope::edge_name(e));
  return a;
}

json doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json spectrum_json(const std::vector<std::complex<double>>& s) {
  json a = json::array();
  for (const auto& z : s) a.push_back(complex_json(z));
  return a;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string complex_text(const std::complex<double>& z) {
  std::ostringstream os;
  os << std::setprecision(6) << z.real();
  if (z.imag() != 0) os << (z.imag() > 0 ? " + " : " - ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string piece_text(const ChartPiece& p) {
  auto lin = [](const Rational& a, const Rational& b) {
    std::string s;
    if (b != 0) s = to_string(b) + "x";
    if (a != 0) s += (s.empty() ? to_string(a) : (a > 0 ? " + " + to_string(a) : " - " + to_string(Rational(-a))));
    return s.empty() ? std::string("0") : s;
  };
  return "(" + lin(p.num[0], p.num[1]) + ")/(" + lin(p.den[0], p.den[1]) + ")";
}

}  // namespace

json skeleton_json(const SkeletonField& chi, const Polytope& poly) {
  json j;
  json orders = json::array();
  for (int n : chi.orders) orders.push_back(order_to_string(n));
  j["orders"] = orders;
  json rows = json::array();
  for (VertexId v = 0; v < chi.vertices; ++v) {
    json r;
    r["vertex"] = Polytope::vertex_name(v);
    r["type"] = to_string(classify_vertex(chi, poly, v));
    r["chi"] = rational_json(chi.character(v));
    rows.push_back(r);
  }
  j["vertices"] = rows;
  return j;
}

json graph_json(const FlowGraph& graph, const SkeletonField& chi) {
  (void)chi;
  const Polytope& poly = graph.polytope();
  json edges = json::array();
  for (EdgeId e = 0; e < poly.edge_count(); ++e) {
    const auto& c = graph.edge_class(e);
    json r;
    r["edge"] = Polytope::edge_name(e);
    r["ends"] = json::array({Polytope::vertex_name(poly.edge(e).a), Polytope::vertex_name(poly.edge(e).b)});
    r["kind"] = to_string(c.kind);
    if (c.kind == EdgeClass::Kind::flowing) {
      r["source"] = Polytope::vertex_name(c.source);
      r["target"] = Polytope::vertex_name(c.target);
    }
    edges.push_back(r);
  }
  json j;
  j["edges"] = edges;
  j["regular"] = graph.regular();
  j["undefined"] = edge_names(graph.undefined_edges());
  return j;
}

json structural_sets_json(const FlowGraph& graph, const StructuralSetSearch& search) {
  json sets = json::array();
  for (const auto& s : search.sets) {
    auto cert = certify_structural_set(graph, s);
    json r;
    r["edges"] = edge_names(s);
    r["acyclic_after_removal"] = cert.acyclic_after_removal;
    bool minimal = true;
    for (bool b : cert.member_needed) minimal = minimal && b;
    r["minimal"] = minimal;
    sets.push_back(r);
  }
  json j;
  j["sets"] = sets;
  j["truncated"] = search.truncated;
  j["acyclic"] = search.acyclic;
  return j;
}

json branches_json(const PiecewiseLinearMap& plm) {
  const Polytope& poly = plm.polytope();
  json arr = json::array();
  for (const auto& b : plm.branches()) {
    json r;
    r["name"] = b.name;
    r["itinerary"] = edge_names(b.itinerary);
    r["source"] = Polytope::edge_name(b.source);
    r["target"] = Polytope::edge_name(b.target);
    json coords = json::array();
    for (FacetId s : poly.dual_support_edge(b.source).coords) coords.push_back(Polytope::facet_name(s));
    r["coords"] = coords;
    r["matrix"] = matrix_json(b.restricted_matrix(poly));
    r["full_matrix"] = matrix_json(b.matrix);
    json dom = json::array();
    for (std::size_t k = 0; k < b.domain.rows.size(); ++k) dom.push_back(rational_json(b.domain.restricted_row(k)));
    r["domain"] = dom;
    arr.push_back(r);
  }
  json j;
  j["structural_set"] = edge_names(plm.structural_set());
  j["branches"] = arr;
  json empty = json::array();
  for (const auto& it : plm.empty_branches()) empty.push_back(edge_names(it));
  j["empty_branches"] = empty;
  return j;
}

json chart_json(const ProjectiveMap& pm) {
  json j;
  if (!pm.chart()) {
    j["chart"] = nullptr;
    return j;
  }
  const Chart& c = *pm.chart();
  j["edges"] = edge_names(c.edges);
  j["interval"] = json::array({rational_json(c.lo), rational_json(c.hi)});
  j["breakpoints"] = rational_json(c.breakpoints);
  json pieces = json::array();
  for (const auto& p : c.pieces) {
    json r;
    r["branch"] = pm.plm().branches()[p.branch].name;
    r["lo"] = rational_json(p.lo);
    r["hi"] = rational_json(p.hi);
    r["num"] = json::array({rational_json(p.num[0]), rational_json(p.num[1])});
    r["den"] = json::array({rational_json(p.den[0]), rational_json(p.den[1])});
    r["text"] = piece_text(p);
    pieces.push_back(r);
  }
  j["pieces"] = pieces;
  return j;
}

json cycles_json(const std::vector<CycleReport>& cycles, const Polytope& poly) {
  json arr = json::array();
  for (const auto& c : cycles) {
    json r;
    r["word"] = c.word_names;
    r["edges"] = edge_names(c.edges);
    r["edge"] = Polytope::edge_name(c.edge);
    json coords = json::array();
    for (FacetId s : poly.dual_support_edge(c.edge).coords) coords.push_back(Polytope::facet_name(s));
    r["coords"] = coords;
    r["matrix"] = matrix_json(c.matrix);
    r["determinant"] = rational_json(c.determinant);
    r["eigenvalue"] = c.eigenvalue;
    r["eigenvector"] = doubles(c.eigenvector);
    r["spectrum"] = spectrum_json(c.spectrum);
    r["sigma_max"] = c.ratios.sigma_max;
    r["sigma_min"] = c.ratios.sigma_min;
    r["eigenspace_dim"] = c.eigenspace_dim;
    r["defective"] = c.defective;
    r["boundary"] = c.boundary;
    if (!c.orbit_chart.empty()) r["orbit_chart"] = doubles(c.orbit_chart);
    r["verdict"] = c.verdict.text();
    arr.push_back(r);
  }
  return arr;
}

json equilibria_json(const std::vector<FaceEquilibrium>& eqs) {
  json arr = json::array();
  for (const auto& e : eqs) {
    json r;
    json sup = json::array();
    for (std::size_t s : e.support) sup.push_back(Polytope::facet_name(s));
    r["support"] = sup;
    switch (e.status) {
      case FaceEquilibrium::Status::isolated: r["status"] = "isolated"; break;
      case FaceEquilibrium::Status::degenerate: r["status"] = "degenerate"; break;
      case FaceEquilibrium::Status::none: r["status"] = "none"; break;
    }
    if (e.status == FaceEquilibrium::Status::isolated) {
      r["point"] = rational_json(e.point);
      r["face_spectrum"] = spectrum_json(e.face_spectrum);
      r["spectrum"] = spectrum_json(e.spectrum);
    }
    r["interior"] = e.interior;
    arr.push_back(r);
  }
  return arr;
}

json error_table_json(const ErrorTable& t) {
  json j;
  j["branch"] = t.branch;
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o;
    o["eps"] = r.eps;
    o["max_error"] = r.max_error;
    o["mean_error"] = r.mean_error;
    o["used"] = r.used;
    o["skipped"] = r.skipped;
    rows.push_back(o);
  }
  j["rows"] = rows;
  json samples = json::array();
  for (const auto& s : t.samples) {
    json o;
    o["sample"] = s.sample;
    o["eps"] = s.eps;
    if (s.skipped)
      o["skipped"] = s.reason;
    else
      o["error"] = s.error;
    samples.push_back(o);
  }
  j["samples"] = samples;
  j["monotone"] = t.monotone;
  return j;
}

json agreement_json(const AgreementReport& r, const PiecewiseLinearMap& plm) {
  auto name = [&](const std::optional<std::size_t>& k) -> json {
    if (!k) return nullptr;
    return plm.branches()[*k].name;
  };
  json j;
  j["edge"] = Polytope::edge_name(r.edge);
  j["agree"] = r.agree;
  j["total"] = r.cases.size();
  j["excluded"] = r.excluded;
  json cases = json::array();
  for (const auto& c : r.cases) {
    json o;
    o["predicted"] = name(c.predicted);
    o["observed"] = name(c.observed);
    o["itinerary"] = edge_names(c.itinerary);
    o["status"] = c.status;
    cases.push_back(o);
  }
  j["cases"] = cases;
  return j;
}

void write_skeleton_table(std::ostream& os, const SkeletonField& chi, const Polytope& poly) {
  const std::size_t w = 8;
  os << pad("", 4) << pad("type", 11);
  for (FacetId s = 0; s < chi.facets; ++s) os << pad(Polytope::facet_name(s), w);
  os << "\n";
  for (VertexId v = 0; v < chi.vertices; ++v) {
    os << pad(Polytope::vertex_name(v), 4) << pad(to_string(classify_vertex(chi, poly, v)), 11);
    for (FacetId s = 0; s < chi.facets; ++s) os << pad(to_string(chi.at(v, s)), w);
    os << "\n";
  }
  os << pad("order", 15);
  for (int n : chi.orders) os << pad(order_to_string(n), w);
  os << "\n";
}

void write_branch_table(std::ostream& os, const PiecewiseLinearMap& plm) {
  const Polytope& poly = plm.polytope();
  os << "S = {";
  for (std::size_t k = 0; k < plm.structural_set().size(); ++k)
    os << (k ? ", " : "") << Polytope::edge_name(plm.structural_set()[k]);
  os << "}\n";
  for (const auto& b : plm.branches()) {
    os << b.name << ":";
    for (EdgeId e : b.itinerary) os << " " << Polytope::edge_name(e);
    os << "\n  coords (";
    const auto sup = poly.dual_support_edge(b.source).coords;
    for (std::size_t k = 0; k < sup.size(); ++k) os << (k ? ", " : "") << "u" << sup[k] + 1;
    os << ")\n  M = [";
    const auto m = b.restricted_matrix(poly);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      os << (i ? "; " : "");
      for (std::size_t jj = 0; jj < m.cols(); ++jj) os << (jj ? ", " : "") << to_string(m(i, jj));
    }
    os << "]\n  domain:";
    if (b.domain.rows.empty()) os << " whole sector";
    for (std::size_t k = 0; k < b.domain.rows.size(); ++k) {
      os << " ";
      bool first = true;
      for (FacetId s : sup) {
        const Rational& a = b.domain.rows[k][s];
        if (a == 0) continue;
        if (!first) os << (a > 0 ? " + " : " - ");
        else if (a < 0) os << "-";
        const Rational aa = abs(a);
        if (aa != 1) os << to_string(aa);
        os << "u" << s + 1;
        first = false;
      }
      os << " > 0" << (k + 1 < b.domain.rows.size() ? "," : "");
    }
    os << "\n";
  }
  if (!plm.empty_branches().empty()) os << plm.empty_branches().size() << " itineraries with empty domain\n";
}

void write_chart_table(std::ostream& os, const ProjectiveMap& pm) {
  if (!pm.chart()) {
    os << "no one-dimensional chart (polytope dimension is not 3)\n";
    return;
  }
  const Chart& c = *pm.chart();
  for (std::size_t k = 0; k < c.edges.size(); ++k)
    os << "[" << k << ", " << k + 1 << "] <-> " << Polytope::edge_name(c.edges[k]) << "\n";
  for (const auto& p : c.pieces)
    os << pad(pm.plm().branches()[p.branch].name, 5) << "  [" << to_string(p.lo) << ", " << to_string(p.hi)
       << ")  " << piece_text(p) << "\n";
  os << "breakpoints:";
  for (const auto& b : c.breakpoints) os << " " << to_string(b);
  os << "\n";
}

void write_cycles_table(std::ostream& os, const std::vector<CycleReport>& cycles) {
  for (const auto& c : cycles) {
    for (std::size_t k = 0; k < c.word_names.size(); ++k) os << (k ? " " : "") << c.word_names[k];
    os << ": lambda = " << format_double(c.eigenvalue) << ", det = " << to_string(c.determinant) << "\n  spectrum:";
    for (const auto& z : c.spectrum) os << " " << complex_text(z);
    os << "\n  sigma_max = " << format_double(c.ratios.sigma_max);
    if (c.boundary) os << " (boundary-invariant ray)";
    os << "\n  " << c.verdict.text() << "\n";
  }
}

void write_equilibria_table(std::ostream& os, const std::vector<FaceEquilibrium>& eqs) {
  for (const auto& e : eqs) {
    os << "{";
    for (std::size_t k = 0; k < e.support.size(); ++k) os << (k ? "," : "") << Polytope::facet_name(e.support[k]);
    os << "}";
    if (e.status == FaceEquilibrium::Status::isolated) {
      os << " " << to_string(e.point) << "\n  spectrum:";
      for (const auto& z : e.spectrum) os << " " << complex_text(z);
    } else {
      os << (e.status == FaceEquilibrium::Status::degenerate ? " degenerate" : " none");
    }
    os << "\n";
  }
}

void write_error_table(std::ostream& os, const ErrorTable& t) {
  os << t.branch << "\n" << pad("eps", 8) << pad("max", 26) << pad("mean", 26) << pad("used", 6)
     << pad("skipped", 9) << "\n";
  for (const auto& r : t.rows)
    os << pad(format_double(r.eps), 8) << pad(format_double(r.max_error), 26) << pad(format_double(r.mean_error), 26)
       << pad(std::to_string(r.used), 6) << pad(std::to_string(r.skipped), 9) << "\n";
  os << (t.monotone ? "max error strictly decreasing" : "max error NOT strictly decreasing") << "\n";
}

void write_dot(std::ostream& os, const FlowGraph& graph, const std::vector<EdgeId>& highlight) {
  const Polytope& poly = graph.polytope();
  os << "digraph skeleton {\n";
  for (VertexId v = 0; v < poly.vertex_count(); ++v) os << "  " << Polytope::vertex_name(v) << ";\n";
  for (EdgeId e = 0; e < poly.edge_count(); ++e) {
    const auto& c = graph.edge_class(e);
    const bool hl = std::find(highlight.begin(), highlight.end(), e) != highlight.end();
    if (c.kind == EdgeClass::Kind::flowing) {
      os << "  " << Polytope::vertex_name(c.source) << " -> " << Polytope::vertex_name(c.target) << " [label=\""
         << Polytope::edge_name(e) << "\"" << (hl ? ", color=red, penwidth=2" : "") << "];\n";
    } else {
      os << "  " << Polytope::vertex_name(poly.edge(e).a) << " -> " << Polytope::vertex_name(poly.edge(e).b)
         << " [label=\"" << Polytope::edge_name(e) << " " << to_string(c.kind) << "\", dir=none, style=dashed];\n";
    }
  }
  os << "}\n";
}

void write_error_csv(std::ostream& os, const ErrorTable& t) {
  os << "eps,sample,error,status\n";
  for (const auto& s : t.samples)
    os << format_double(s.eps) << "," << s.sample << "," << (s.skipped ? "" : format_double(s.error)) << ","
       << (s.skipped ? s.reason : "ok") << "\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const std::vector<EventSpec>& events) {
  const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
  os << "t";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
  os << ",event\n";
  std::size_t ev = 0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << format_double(tr.times[k]);
    for (double x : tr.states[k]) os << "," << format_double(x);
    os << ",";
    if (ev < tr.events.size() && tr.events[ev].t == tr.times[k] && k + 1 == tr.times.size()) {
      const auto& spec = events.at(tr.events[ev].index);
      os << Polytope::facet_name(spec.facet) << (spec.direction > 0 ? "+" : spec.direction < 0 ? "-" : "");
      ++ev;
    }
    os << "\n";
  }
}

void write_orbit_csv(std::ostream& os, const ChartOrbit& orbit, const ProjectiveMap& pm) {
  os << "step,x,branch\n";
  for (std::size_t k = 0; k < orbit.xs.size(); ++k) {
    os << k << "," << format_double(orbit.xs[k]) << ",";
    if (k < orbit.pieces.size()) os << pm.plm().branches()[pm.chart()->pieces[orbit.pieces[k]].branch].name;
    os << "\n";
  }
}

}  // namespace polyskel
