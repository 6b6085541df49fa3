#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyskel/games.hpp"
#include "polyskel/skeleton.hpp"

namespace polyskel {

// h_1(x) = -log x, h_n(x) = (x^(1-n) - 1) / (n - 1).
double h(int n, double x);
double h_inv(int n, double y);

// Neighbourhood of a vertex v given by x_s <= c for s in F_v, with defining
// functions x_s / c; sections sit at x_s = c.
struct RescaleChart {
  const Polytope* poly = nullptr;
  VertexId vertex = 0;
  double eps = 0.1;
  double level = 0.25;
  std::vector<int> orders;  // per facet

  // q -> y_s = eps^2 h_nu(x_s / c) on F_v, 0 elsewhere.
  std::vector<double> rescale(const std::vector<double>& x) const;
  // Same from log-frequencies; exact for order 1 even when x underflows.
  std::vector<double> rescale_log(const std::vector<double>& w) const;
  std::vector<double> unrescale(const std::vector<double>& y) const;
  std::vector<double> unrescale_log(const std::vector<double>& y) const;
};

RescaleChart make_chart(const Polytope& poly, const SkeletonField& chi, VertexId v, double eps,
                        double level);

// Log-frequency states: w_i = log x_i, -inf for vanishing coordinates.
std::vector<double> to_log(const std::vector<double>& x);
std::vector<double> from_log(const GameModel& game, const std::vector<double>& w);

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0;  // 0 = unlimited
  std::size_t max_steps = 2'000'000;
  double event_tol = 1e-12;
};

// Crossing of x_facet = level; direction +1 upward, -1 downward, 0 either.
struct EventSpec {
  FacetId facet = 0;
  double level = 0.25;
  int direction = 0;
};

struct EventHit {
  std::size_t index = 0;  // into the event list
  double t = 0;
  std::vector<double> w;  // log state at the crossing
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

struct Trajectory {
  enum class Stop { time, event, max_steps, step_underflow };
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // frequencies
  std::vector<EventHit> events;
  IntegratorStats stats;
  Stop stop = Stop::time;
};

// Dormand-Prince 5(4) with the 4th-order continuous extension, applied to
// log-frequencies. The field is evaluated at the group-normalized point, so
// trajectories stay on the prism and faces stay invariant.
class FlowIntegrator {
 public:
  FlowIntegrator(const GameModel& game, IntegratorOptions opts = {});

  struct Result {
    Trajectory::Stop stop = Trajectory::Stop::time;
    double t = 0;
    std::vector<double> w;
    std::optional<EventHit> hit;
  };

  // Integrates from w0 for at most t_max; stops at the first listed event.
  // With record set, every accepted step is appended (frequencies).
  Result run(const std::vector<double>& w0, double t_max, const std::vector<EventSpec>& events,
             Trajectory* record = nullptr, double record_dt = 0) const;

  void rhs(const std::vector<double>& w, std::vector<double>& dw) const;

 private:
  const GameModel* game_;
  IntegratorOptions opts_;
};

// Convenience wrapper over FlowIntegrator::run from a frequency state.
Trajectory integrate(const GameModel& game, const std::vector<double>& x0, double t_end,
                     const std::vector<EventSpec>& events = {}, const IntegratorOptions& opts = {},
                     double record_dt = 0);

struct SectionRef {
  VertexId vertex = 0;
  EdgeId edge = 0;
  FacetId facet = 0;
};

struct PoincareOptions {
  double level = 0.25;  // section level c
  double eps = 0.1;     // only sets the time cap 10 / eps^2 per leg
  IntegratorOptions integrator;
  // Source-end sections (start on the section leaving s(g0), end on the one
  // leaving s(gm)); otherwise target-end sections.
  bool source_end = true;
};

struct NumericPoincareResult {
  enum class Status { ok, mismatch, timeout, failure };
  Status status = Status::failure;
  std::vector<double> w;  // log state on the final section
  std::vector<SectionRef> sections;  // sections crossed, in order
  std::optional<SectionRef> actual;  // section hit instead of the expected one
  std::size_t failed_leg = 0;
  double time = 0;
};
std::string to_string(NumericPoincareResult::Status s);

// Section-to-section integration along a prescribed itinerary of the flow
// graph of `game`.
NumericPoincareResult numeric_poincare(const GameModel& game, const FlowGraph& graph,
                                       const Itinerary& xi, const std::vector<double>& w0,
                                       const PoincareOptions& opts);

struct FollowResult {
  NumericPoincareResult::Status status = NumericPoincareResult::Status::failure;
  Itinerary itinerary;  // observed, from the start edge to the first structural edge
  std::vector<double> w;
};

// Starting on the source-end section of `start`, follows the flow vertex by
// vertex, recording which exit section is hit, until it reaches the source
// section of an edge in `s`.
FollowResult follow_network(const GameModel& game, const FlowGraph& graph,
                            const std::vector<EdgeId>& s, EdgeId start,
                            const std::vector<double>& w0, const PoincareOptions& opts,
                            std::size_t max_edges = 64);

}  // namespace polyskel
