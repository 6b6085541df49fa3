#include "polyskel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polyskel/batch.hpp"

namespace polyskel {

namespace {

std::mt19937_64 sample_rng(std::uint64_t seed, std::size_t j) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j >> 32)};
  return std::mt19937_64(seq);
}

// Uniform point of the simplex on `coords` via normalized exponentials.
std::vector<double> uniform_simplex(std::mt19937_64& rng, const std::vector<FacetId>& coords,
                                    std::size_t facets) {
  std::vector<double> t(facets, 0.0);
  double sum = 0;
  for (FacetId s : coords) {
    double u = std::generate_canonical<double, 53>(rng);
    t[s] = -std::log1p(-u);
    sum += t[s];
  }
  for (FacetId s : coords) t[s] /= sum;
  return t;
}

double min_on(const std::vector<double>& v, const std::vector<FacetId>& coords) {
  double m = std::numeric_limits<double>::infinity();
  for (FacetId s : coords) m = std::min(m, v[s]);
  return m;
}

std::vector<double> apply_matrix(const RationalMatrix& m, const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (y[j] != 0.0 && m(i, j) != 0) out[i] += m(i, j).get_d() * y[j];
  return out;
}

}  // namespace

SectorSample draw_sample(const ConeDomain& domain, std::size_t facets, const SamplingOptions& opts,
                         std::size_t j, std::size_t max_tries) {
  auto rng = sample_rng(opts.seed, j);
  SectorSample s;
  for (std::size_t k = 0; k < max_tries; ++k) {
    auto t = uniform_simplex(rng, domain.support.coords, facets);
    if (min_on(t, domain.support.coords) < opts.delta) continue;
    if (domain.empty || !(domain.slack(t) > opts.margin)) continue;
    s.theta = std::move(t);
    s.valid = true;
    break;
  }
  std::uniform_real_distribution<double> scale(opts.s_lo, opts.s_hi);
  s.scale = scale(rng);
  return s;
}

std::vector<double> sample_point(const SectorSample& s, const ConeDomain& domain, double eps, double r) {
  const double m = min_on(s.theta, domain.support.coords);
  std::vector<double> y(s.theta.size(), 0.0);
  const double f = s.scale * std::pow(eps, r) / m;
  for (FacetId k : domain.support.coords) y[k] = f * s.theta[k];
  return y;
}

ErrorTable verify_asymptotics(const GameModel& game, const SkeletonField& chi, const FlowGraph& graph,
                              const PiecewiseLinearMap& plm, std::size_t branch,
                              const AsymptoticsOptions& opts) {
  if (branch >= plm.branches().size()) throw ValidationError("branch index out of range");
  if (opts.eps.empty()) throw ValidationError("empty epsilon schedule");
  for (std::size_t k = 0; k < opts.eps.size(); ++k) {
    if (!(opts.eps[k] > 0)) throw ValidationError("epsilon must be positive");
    if (k && !(opts.eps[k] < opts.eps[k - 1])) throw ValidationError("epsilon schedule must be strictly decreasing");
  }
  const Branch& b = plm.branches()[branch];
  const Polytope& poly = graph.polytope();
  const std::size_t nf = poly.facet_count();
  const VertexId v0 = graph.source(b.itinerary.front());
  const VertexId vm = graph.source(b.itinerary.back());

  std::vector<SectorSample> draws(opts.samples);
  for (std::size_t j = 0; j < opts.samples; ++j) draws[j] = draw_sample(b.domain, nf, opts.sampling, j);

  const std::size_t ne = opts.eps.size();
  std::vector<SampleError> out(opts.samples * ne);
  auto job = [&](std::size_t i) {
    const std::size_t j = i / ne, k = i % ne;
    SampleError& e = out[i];
    e.sample = j;
    e.eps_index = k;
    e.eps = opts.eps[k];
    if (!draws[j].valid) {
      e.skipped = true;
      e.reason = "no admissible direction";
      return;
    }
    try {
      e.y = sample_point(draws[j], b.domain, e.eps, opts.sampling.r);
      const RescaleChart c0 = make_chart(poly, chi, v0, e.eps, opts.level);
      const RescaleChart cm = make_chart(poly, chi, vm, e.eps, opts.level);
      PoincareOptions po;
      po.level = opts.level;
      po.eps = e.eps;
      po.integrator = opts.integrator;
      po.source_end = true;
      auto r = numeric_poincare(game, graph, b.itinerary, c0.unrescale_log(e.y), po);
      if (r.status != NumericPoincareResult::Status::ok) {
        e.skipped = true;
        e.reason = to_string(r.status);
        return;
      }
      e.image = cm.rescale_log(r.w);
      e.predicted = apply_matrix(b.matrix, e.y);
      double err = 0;
      for (FacetId s : poly.facets_of(vm)) err = std::max(err, std::abs(e.image[s] - e.predicted[s]));
      e.error = err;
    } catch (const std::exception& ex) {
      e.skipped = true;
      e.reason = ex.what();
    }
  };
  if (opts.parallel)
    parallel_for(out.size(), job, opts.threads);
  else
    serial_for(out.size(), job);

  ErrorTable t;
  t.branch = b.name;
  t.samples = std::move(out);
  for (std::size_t k = 0; k < ne; ++k) {
    ErrorRow row;
    row.eps = opts.eps[k];
    double sum = 0;
    for (std::size_t j = 0; j < opts.samples; ++j) {
      const SampleError& e = t.samples[j * ne + k];
      if (e.skipped) {
        ++row.skipped;
        continue;
      }
      ++row.used;
      sum += e.error;
      row.max_error = std::max(row.max_error, e.error);
    }
    row.mean_error = row.used ? sum / static_cast<double>(row.used) : std::nan("");
    if (!row.used) row.max_error = std::nan("");
    t.rows.push_back(row);
  }
  t.monotone = true;
  for (std::size_t k = 0; k < ne; ++k) {
    if (!t.rows[k].used) t.monotone = false;
    if (k && !(t.rows[k].max_error < t.rows[k - 1].max_error)) t.monotone = false;
  }
  return t;
}

AgreementReport oracle_agreement(const GameModel& game, const SkeletonField& chi, const FlowGraph& graph,
                                 const PiecewiseLinearMap& plm, EdgeId edge, const AgreementOptions& opts) {
  const auto& s = plm.structural_set();
  if (std::find(s.begin(), s.end(), edge) == s.end())
    throw ValidationError(Polytope::edge_name(edge) + " is not in the structural set");
  const Polytope& poly = graph.polytope();
  const std::size_t nf = poly.facet_count();
  const SectorSupport sup = poly.dual_support_edge(edge);
  const VertexId v0 = graph.source(edge);

  AgreementReport rep;
  rep.edge = edge;
  struct Draw {
    std::vector<double> theta;
    double scale = 0;
    std::optional<std::size_t> predicted;
  };
  std::vector<Draw> draws;
  std::size_t j = 0;
  while (draws.size() < opts.samples) {
    if (j > 1000 * (opts.samples + 1)) throw NumericError("too many excluded agreement samples");
    auto rng = sample_rng(opts.seed, j++);
    Draw d;
    d.theta = uniform_simplex(rng, sup.coords, nf);
    std::uniform_real_distribution<double> sc(opts.s_lo, opts.s_hi);
    d.scale = sc(rng);
    double best = -std::numeric_limits<double>::infinity();
    for (const Branch& b : plm.branches())
      if (b.source == edge) best = std::max(best, b.domain.slack(d.theta));
    const auto step = plm.apply(edge, d.theta, 0.0);
    if (step.status == PoincareStep::Status::ok) d.predicted = step.branch;
    if (best < opts.exclude) {
      ++rep.excluded;
      continue;
    }
    draws.push_back(std::move(d));
  }

  rep.cases.resize(draws.size());
  auto job = [&](std::size_t i) {
    AgreementCase& c = rep.cases[i];
    c.theta = draws[i].theta;
    c.predicted = draws[i].predicted;
    try {
      const double m = min_on(c.theta, sup.coords);
      std::vector<double> y(nf, 0.0);
      for (FacetId k : sup.coords) y[k] = draws[i].scale * std::pow(opts.eps, opts.r) * c.theta[k] / m;
      const RescaleChart c0 = make_chart(poly, chi, v0, opts.eps, opts.level);
      PoincareOptions po;
      po.level = opts.level;
      po.eps = opts.eps;
      po.integrator = opts.integrator;
      auto r = follow_network(game, graph, s, edge, c0.unrescale_log(y), po);
      c.itinerary = r.itinerary;
      c.status = to_string(r.status);
      if (r.status == NumericPoincareResult::Status::ok) {
        for (std::size_t k = 0; k < plm.branches().size(); ++k)
          if (plm.branches()[k].itinerary == r.itinerary) c.observed = k;
      }
    } catch (const std::exception& ex) {
      c.status = ex.what();
    }
  };
  if (opts.parallel)
    parallel_for(rep.cases.size(), job, opts.threads);
  else
    serial_for(rep.cases.size(), job);
  for (const auto& c : rep.cases)
    if (c.predicted && c.observed && *c.predicted == *c.observed) ++rep.agree;
  return rep;
}

}  // namespace polyskel
