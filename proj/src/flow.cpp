#include "polyskel/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace polyskel {

double h(int n, double x) {
  if (n < 1) throw ValidationError("order must be >= 1");
  if (!(x > 0)) throw ValidationError("h needs x > 0");
  if (n == 1) return -std::log(x);
  return (std::pow(x, 1 - n) - 1.0) / (n - 1);
}

double h_inv(int n, double y) {
  if (n < 1) throw ValidationError("order must be >= 1");
  if (n == 1) return std::exp(-y);
  return std::pow(1.0 + (n - 1) * y, -1.0 / (n - 1));
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_h_inv_scaled(int n, double y) {
  // log of h_n^{-1}(y), stable for large y.
  if (n == 1) return -y;
  return -std::log1p((n - 1) * y) / (n - 1);
}

}  // namespace

std::vector<double> RescaleChart::rescale(const std::vector<double>& x) const {
  std::vector<double> y(x.size(), 0.0);
  const double e2 = eps * eps;
  for (FacetId s : poly->facets_of(vertex)) {
    if (orders.at(s) == kInfiniteOrder) throw ValidationError("rescaling along a facet of infinite order");
    const double f = x.at(s) / level;
    if (!(f > 0)) throw ValidationError("rescaling a point on the boundary");
    y[s] = e2 * h(orders[s], f);
  }
  return y;
}

std::vector<double> RescaleChart::rescale_log(const std::vector<double>& w) const {
  std::vector<double> y(w.size(), 0.0);
  const double e2 = eps * eps;
  const double lc = std::log(level);
  for (FacetId s : poly->facets_of(vertex)) {
    const int n = orders.at(s);
    if (n == kInfiniteOrder) throw ValidationError("rescaling along a facet of infinite order");
    if (!std::isfinite(w.at(s))) throw ValidationError("rescaling a point on the boundary");
    const double lf = w[s] - lc;
    y[s] = n == 1 ? -e2 * lf : e2 * std::expm1((1 - n) * lf) / (n - 1);
  }
  return y;
}

std::vector<double> RescaleChart::unrescale_log(const std::vector<double>& y) const {
  const std::size_t nf = poly->facet_count();
  std::vector<double> w(nf, kNegInf);
  const double e2 = eps * eps;
  const double lc = std::log(level);
  const auto& type = poly->prism_type();
  if (!type) throw ValidationError("unrescale needs a prism");
  for (FacetId s : poly->facets_of(vertex)) {
    const int n = orders.at(s);
    if (n == kInfiniteOrder) throw ValidationError("rescaling along a facet of infinite order");
    if (y.at(s) < 0) throw ValidationError("rescaled point outside the sector");
    w[s] = lc + log_h_inv_scaled(n, y[s] / e2);
  }
  // Active strategy of each group takes the remaining mass.
  for (std::size_t j : poly->vertex_tuple(vertex)) {
    const std::size_t a = type->group_of(j);
    const auto [b, e] = type->ranges()[a];
    double rest = 0;
    for (std::size_t k = b; k < e; ++k)
      if (k != j && std::isfinite(w[k])) rest += std::exp(w[k]);
    w[j] = std::log1p(-rest);
  }
  return w;
}

std::vector<double> RescaleChart::unrescale(const std::vector<double>& y) const {
  std::vector<double> w = unrescale_log(y);
  std::vector<double> x(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) x[i] = std::exp(w[i]);
  return x;
}

RescaleChart make_chart(const Polytope& poly, const SkeletonField& chi, VertexId v, double eps,
                        double level) {
  if (!(eps > 0)) throw ValidationError("epsilon must be positive");
  if (!(level > 0 && level <= 1)) throw ValidationError("section level must lie in (0, 1]");
  RescaleChart c;
  c.poly = &poly;
  c.vertex = v;
  c.eps = eps;
  c.level = level;
  c.orders = chi.orders;
  return c;
}

std::vector<double> to_log(const std::vector<double>& x) {
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i] > 0 ? std::log(x[i]) : kNegInf;
  return w;
}

namespace {

void normalize_log(const std::vector<std::pair<std::size_t, std::size_t>>& ranges,
                   std::vector<double>& w) {
  for (const auto& [b, e] : ranges) {
    double m = kNegInf;
    for (std::size_t k = b; k < e; ++k) m = std::max(m, w[k]);
    if (!std::isfinite(m)) continue;
    double s = 0;
    for (std::size_t k = b; k < e; ++k)
      if (std::isfinite(w[k])) s += std::exp(w[k] - m);
    const double lse = m + std::log(s);
    for (std::size_t k = b; k < e; ++k)
      if (std::isfinite(w[k])) w[k] -= lse;
  }
}

}  // namespace

std::vector<double> from_log(const GameModel& game, const std::vector<double>& w) {
  std::vector<double> v(w);
  normalize_log(game.ranges(), v);
  for (auto& x : v) x = std::exp(x);
  return v;
}

FlowIntegrator::FlowIntegrator(const GameModel& game, IntegratorOptions opts)
    : game_(&game), opts_(opts) {}

void FlowIntegrator::rhs(const std::vector<double>& w, std::vector<double>& dw) const {
  const std::size_t n = w.size();
  std::vector<double> x(n, 0.0), f(n);
  for (const auto& [b, e] : game_->ranges()) {
    double m = kNegInf;
    for (std::size_t k = b; k < e; ++k) m = std::max(m, w[k]);
    double s = 0;
    for (std::size_t k = b; k < e; ++k)
      if (std::isfinite(w[k])) s += std::exp(w[k] - m);
    for (std::size_t k = b; k < e; ++k) x[k] = std::isfinite(w[k]) ? std::exp(w[k] - m) / s : 0.0;
  }
  game_->payoffs(x.data(), f.data());
  dw.assign(n, 0.0);
  for (const auto& [b, e] : game_->ranges()) {
    double avg = 0;
    for (std::size_t k = b; k < e; ++k) avg += x[k] * f[k];
    for (std::size_t k = b; k < e; ++k)
      if (std::isfinite(w[k])) dw[k] = f[k] - avg;
  }
}

namespace {

// Dormand-Prince 5(4) coefficients and the dense-output polynomial.
constexpr std::array<double, 6> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0};
constexpr double kA[6][5] = {
    {0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
};
constexpr std::array<double, 6> kB{35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
constexpr std::array<double, 7> kE{-71.0 / 57600, 0, 71.0 / 16695, -71.0 / 1920, 17253.0 / 339200, -22.0 / 525, 1.0 / 40};
constexpr double kP[7][4] = {
    {1, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0, 0, 0, 0},
    {0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};

struct Step {
  double t0 = 0, h = 0;
  const std::vector<double>* w0 = nullptr;
  const std::array<std::vector<double>, 7>* k = nullptr;

  void at(double theta, std::vector<double>& out) const {
    const std::size_t n = w0->size();
    out.assign(n, 0.0);
    double q[7];
    for (int i = 0; i < 7; ++i) {
      double p = 0, th = theta;
      for (int j = 0; j < 4; ++j) {
        p += kP[i][j] * th;
        th *= theta;
      }
      q[i] = p;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite((*w0)[c])) {
        out[c] = (*w0)[c];
        continue;
      }
      double acc = 0;
      for (int i = 0; i < 7; ++i) acc += (*k)[i][c] * q[i];
      out[c] = (*w0)[c] + h * acc;
    }
  }
};

double log_sum_exp(const std::vector<double>& w, std::size_t b, std::size_t e) {
  double m = kNegInf;
  for (std::size_t k = b; k < e; ++k) m = std::max(m, w[k]);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (std::size_t k = b; k < e; ++k)
    if (std::isfinite(w[k])) s += std::exp(w[k] - m);
  return m + std::log(s);
}

}  // namespace

FlowIntegrator::Result FlowIntegrator::run(const std::vector<double>& w0, double t_max,
                                           const std::vector<EventSpec>& events, Trajectory* record,
                                           double record_dt) const {
  const std::size_t n = game_->strategies();
  if (w0.size() != n) throw ValidationError("state has wrong dimension");
  const auto& ranges = game_->ranges();
  std::vector<double> w(w0);
  normalize_log(ranges, w);
  for (const auto& [b, e] : ranges) {
    bool any = false;
    for (std::size_t k = b; k < e; ++k) any = any || std::isfinite(w[k]);
    if (!any) throw ValidationError("a group has no positive frequency");
  }

  std::vector<double> log_level(events.size());
  std::vector<std::pair<std::size_t, std::size_t>> event_group(events.size());
  for (std::size_t j = 0; j < events.size(); ++j) {
    if (events[j].facet >= n) throw ValidationError("event facet out of range");
    log_level[j] = std::log(events[j].level);
    event_group[j] = ranges[game_->group_index()[events[j].facet]];
  }
  auto g = [&](std::size_t j, const std::vector<double>& s) {
    const auto [b, e] = event_group[j];
    return s[events[j].facet] - log_sum_exp(s, b, e) - log_level[j];
  };

  Result res;
  std::array<std::vector<double>, 7> k;
  rhs(w, k[0]);
  std::size_t evals = 1, accepted = 0, rejected = 0;

  double t = 0;
  double fmax = 0;
  for (double v : k[0]) fmax = std::max(fmax, std::abs(v));
  double step = fmax > 0 ? std::min(0.01 / fmax, 0.1) : 0.1;
  if (t_max > 0) step = std::min(step, t_max);

  auto emit = [&](double time, const std::vector<double>& state) {
    if (!record) return;
    record->times.push_back(time);
    record->states.push_back(from_log(*game_, state));
  };
  emit(0.0, w);
  std::size_t n_record = 1;
  double next_record = record_dt;

  std::vector<double> stage(n), wn(n), dense(n);
  std::vector<double> gval(events.size());
  for (std::size_t j = 0; j < events.size(); ++j) gval[j] = g(j, w);

  while (t < t_max) {
    if (accepted + rejected >= opts_.max_steps) {
      res.stop = Trajectory::Stop::max_steps;
      break;
    }
    double hh = std::min(step, t_max - t);
    if (opts_.max_step > 0) hh = std::min(hh, opts_.max_step);
    for (int s = 1; s < 6; ++s) {
      for (std::size_t c = 0; c < n; ++c) {
        if (!std::isfinite(w[c])) {
          stage[c] = w[c];
          continue;
        }
        double acc = 0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][c];
        stage[c] = w[c] + hh * acc;
      }
      rhs(stage, k[s]);
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(w[c])) {
        wn[c] = w[c];
        continue;
      }
      double acc = 0;
      for (int j = 0; j < 6; ++j) acc += kB[j] * k[j][c];
      wn[c] = w[c] + hh * acc;
    }
    rhs(wn, k[6]);
    evals += 6;
    double err = 0;
    std::size_t active = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(w[c])) continue;
      double e = 0;
      for (int j = 0; j < 7; ++j) e += kE[j] * k[j][c];
      e *= hh;
      const double sc = opts_.atol + opts_.rtol * std::max(std::abs(w[c]), std::abs(wn[c]));
      err += (e / sc) * (e / sc);
      ++active;
    }
    err = active ? std::sqrt(err / static_cast<double>(active)) : 0.0;
    if (!std::isfinite(err)) err = 1e10;
    if (err <= 1.0) {
      ++accepted;
      Step st{t, hh, &w, &k};
      // Earliest event crossing inside the step.
      std::optional<std::pair<double, std::size_t>> first;
      std::vector<double> gnew(events.size());
      for (std::size_t j = 0; j < events.size(); ++j) {
        gnew[j] = g(j, wn);
        const double a = gval[j], b = gnew[j];
        const int d = events[j].direction;
        const bool up = a < 0 && b >= 0, down = a > 0 && b <= 0;
        if (!((d >= 0 && up) || (d <= 0 && down))) continue;
        double lo = 0, hi = 1, glo = a;
        while ((hi - lo) * hh > opts_.event_tol * std::max(1.0, std::abs(t))) {
          const double mid = 0.5 * (lo + hi);
          st.at(mid, dense);
          const double gm = g(j, dense);
          if ((gm < 0) == (glo < 0) && gm != 0) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
          if (hi - lo < 1e-16) break;
        }
        if (!first || hi < first->first) first = std::make_pair(hi, j);
      }
      if (first) {
        st.at(first->first, dense);
        normalize_log(ranges, dense);
        const double te = t + first->first * hh;
        if (record) {
          while (record_dt > 0 && next_record < te) {
            std::vector<double> tmp;
            st.at((next_record - t) / hh, tmp);
            emit(next_record, tmp);
            next_record = static_cast<double>(++n_record) * record_dt;
          }
          emit(te, dense);
          record->events.push_back({first->second, te, dense});
        }
        res.stop = Trajectory::Stop::event;
        res.t = te;
        res.w = dense;
        res.hit = EventHit{first->second, te, dense};
        if (record) record->stats = {accepted, rejected, evals};
        return res;
      }
      if (record) {
        if (record_dt > 0) {
          while (next_record <= t + hh + 1e-12 * std::max(1.0, t_max)) {
            const double tr = std::min(next_record, t + hh);
            std::vector<double> tmp;
            st.at((tr - t) / hh, tmp);
            emit(tr, tmp);
            next_record = static_cast<double>(++n_record) * record_dt;
          }
        } else {
          emit(t + hh, wn);
        }
      }
      t += hh;
      w.swap(wn);
      normalize_log(ranges, w);
      k[0] = k[6];
      gval = gnew;
      for (std::size_t j = 0; j < events.size(); ++j) gval[j] = g(j, w);
      const double factor = err == 0 ? 10.0 : std::min(10.0, 0.9 * std::pow(err, -0.2));
      step = hh * factor;
    } else {
      ++rejected;
      step = hh * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (step < 1e-14 * std::max(1.0, std::abs(t))) {
        res.stop = Trajectory::Stop::step_underflow;
        break;
      }
    }
  }
  if (t >= t_max) res.stop = Trajectory::Stop::time;
  res.t = t;
  res.w = w;
  if (record) record->stats = {accepted, rejected, evals};
  return res;
}

Trajectory integrate(const GameModel& game, const std::vector<double>& x0, double t_end,
                     const std::vector<EventSpec>& events, const IntegratorOptions& opts,
                     double record_dt) {
  // Validates the start state against the prism.
  (void)eval_field(game, x0, 1e-9);
  FlowIntegrator integ(game, opts);
  Trajectory tr;
  auto r = integ.run(to_log(x0), t_end, events, &tr, record_dt);
  tr.stop = r.stop;
  return tr;
}

std::string to_string(NumericPoincareResult::Status s) {
  switch (s) {
    case NumericPoincareResult::Status::ok: return "ok";
    case NumericPoincareResult::Status::mismatch: return "itinerary mismatch";
    case NumericPoincareResult::Status::timeout: return "time cap reached";
    case NumericPoincareResult::Status::failure: return "integration failure";
  }
  return "?";
}

namespace {

struct Leg {
  SectionRef expect;
  int direction = -1;
  std::vector<FacetId> monitor;  // upward crossings that signal a mismatch
  VertexId monitor_vertex = 0;
};

Leg down_leg(const FlowGraph& graph, EdgeId e) {
  const Polytope& poly = graph.polytope();
  Leg l;
  const VertexId v = graph.target(e);
  l.expect = {v, e, poly.corner_facet(v, e)};
  l.direction = -1;
  l.monitor = poly.dual_support_edge(e).coords;
  l.monitor_vertex = v;
  return l;
}

Leg up_leg(const FlowGraph& graph, EdgeId next) {
  const Polytope& poly = graph.polytope();
  Leg l;
  const VertexId v = graph.source(next);
  const FacetId s = poly.corner_facet(v, next);
  l.expect = {v, next, s};
  l.direction = +1;
  for (FacetId f : poly.facets_of(v))
    if (f != s) l.monitor.push_back(f);
  l.monitor_vertex = v;
  return l;
}

// Runs one leg; on success replaces w with the state on the expected section.
NumericPoincareResult::Status run_leg(const FlowIntegrator& integ, const Polytope& poly, const Leg& leg,
                                      const PoincareOptions& opts, std::vector<double>& w, double& time,
                                      std::optional<SectionRef>& actual) {
  std::vector<EventSpec> ev{{leg.expect.facet, opts.level, leg.direction}};
  for (FacetId f : leg.monitor) ev.push_back({f, opts.level, +1});
  const double cap = 10.0 / (opts.eps * opts.eps);
  auto r = integ.run(w, cap, ev);
  time += r.t;
  if (r.stop == Trajectory::Stop::event) {
    if (r.hit->index == 0) {
      w = r.hit->w;
      return NumericPoincareResult::Status::ok;
    }
    const FacetId f = ev[r.hit->index].facet;
    const VertexId v = leg.monitor_vertex;
    SectionRef s{v, 0, f};
    if (poly.incident(v, f)) s.edge = poly.corner_edge(v, f);
    actual = s;
    w = r.hit->w;
    return NumericPoincareResult::Status::mismatch;
  }
  w = r.w;
  if (r.stop == Trajectory::Stop::time) return NumericPoincareResult::Status::timeout;
  return NumericPoincareResult::Status::failure;
}

}  // namespace

NumericPoincareResult numeric_poincare(const GameModel& game, const FlowGraph& graph,
                                       const Itinerary& xi, const std::vector<double>& w0,
                                       const PoincareOptions& opts) {
  if (xi.size() < 2) throw ValidationError("an itinerary needs at least two edges");
  for (std::size_t j = 0; j < xi.size(); ++j) {
    if (!graph.is_arc(xi[j])) throw ValidationError(Polytope::edge_name(xi[j]) + " is not a flowing edge");
    if (j && graph.target(xi[j - 1]) != graph.source(xi[j]))
      throw ValidationError("itinerary is not a flowing path");
  }
  std::vector<Leg> legs;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    if (j) legs.push_back(up_leg(graph, xi[j]));
    legs.push_back(down_leg(graph, xi[j]));
  }
  if (opts.source_end)
    legs.pop_back();
  else
    legs.erase(legs.begin());

  FlowIntegrator integ(game, opts.integrator);
  NumericPoincareResult res;
  std::vector<double> w = w0;
  for (std::size_t l = 0; l < legs.size(); ++l) {
    auto st = run_leg(integ, graph.polytope(), legs[l], opts, w, res.time, res.actual);
    if (st != NumericPoincareResult::Status::ok) {
      res.status = st;
      res.failed_leg = l;
      res.w = w;
      return res;
    }
    res.sections.push_back(legs[l].expect);
  }
  res.status = NumericPoincareResult::Status::ok;
  res.w = w;
  return res;
}

FollowResult follow_network(const GameModel& game, const FlowGraph& graph,
                            const std::vector<EdgeId>& s, EdgeId start,
                            const std::vector<double>& w0, const PoincareOptions& opts,
                            std::size_t max_edges) {
  const Polytope& poly = graph.polytope();
  FlowIntegrator integ(game, opts.integrator);
  FollowResult res;
  res.itinerary.push_back(start);
  std::vector<double> w = w0;
  double time = 0;
  std::optional<SectionRef> actual;
  EdgeId cur = start;
  while (res.itinerary.size() <= max_edges) {
    auto st = run_leg(integ, poly, down_leg(graph, cur), opts, w, time, actual);
    if (st != NumericPoincareResult::Status::ok) {
      res.status = st;
      res.w = w;
      return res;
    }
    const VertexId v = graph.target(cur);
    Leg any;
    any.direction = +1;
    any.monitor_vertex = v;
    const auto& fv = poly.facets_of(v);
    // The first facet plays the "expected" role; all are exits.
    any.expect = {v, poly.corner_edge(v, fv[0]), fv[0]};
    any.monitor.assign(fv.begin() + 1, fv.end());
    actual.reset();
    st = run_leg(integ, poly, any, opts, w, time, actual);
    EdgeId next;
    if (st == NumericPoincareResult::Status::ok)
      next = any.expect.edge;
    else if (st == NumericPoincareResult::Status::mismatch && actual)
      next = actual->edge;
    else {
      res.status = st;
      res.w = w;
      return res;
    }
    res.itinerary.push_back(next);
    if (!graph.is_arc(next) || graph.source(next) != v) {
      res.status = NumericPoincareResult::Status::mismatch;
      res.w = w;
      return res;
    }
    if (std::find(s.begin(), s.end(), next) != s.end()) {
      res.status = NumericPoincareResult::Status::ok;
      res.w = w;
      return res;
    }
    cur = next;
  }
  res.status = NumericPoincareResult::Status::timeout;
  res.w = w;
  return res;
}

}  // namespace polyskel
