#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyskel/flow.hpp"
#include "polyskel/skeleton.hpp"

namespace polyskel {

struct SamplingOptions {
  std::uint64_t seed = 7;
  double r = 0.5;        // samples live in Pi(eps^r)
  double margin = 0.02;  // minimal domain slack of the direction
  double delta = 0.1;    // minimal direction coordinate
  double s_lo = 2.0, s_hi = 3.0;
};

// One sample direction on the unit-sum slice of a sector and its scale.
struct SectorSample {
  std::vector<double> theta;  // full facet-length, unit sum on the support
  double scale = 0;
  bool valid = false;
};

// Rejection sampler: theta uniform on the support simplex, kept when it sits
// inside the domain with slack > margin and min theta >= delta. Sample j only
// depends on (seed, j).
SectorSample draw_sample(const ConeDomain& domain, std::size_t facets, const SamplingOptions& opts,
                         std::size_t j, std::size_t max_tries = 100000);

// y = scale * eps^r * theta / min theta.
std::vector<double> sample_point(const SectorSample& s, const ConeDomain& domain, double eps, double r);

struct AsymptoticsOptions {
  std::vector<double> eps{0.5, 0.3, 0.2, 0.1};
  std::size_t samples = 10;
  SamplingOptions sampling;
  double level = 0.25;
  IntegratorOptions integrator;
  bool parallel = true;
  int threads = 0;
};

struct SampleError {
  std::size_t sample = 0;
  std::size_t eps_index = 0;
  double eps = 0;
  bool skipped = false;
  std::string reason;
  double error = 0;
  std::vector<double> y, image, predicted;
};

struct ErrorRow {
  double eps = 0;
  double max_error = 0;
  double mean_error = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

struct ErrorTable {
  std::string branch;
  std::vector<ErrorRow> rows;        // in schedule order
  std::vector<SampleError> samples;  // sample-major
  bool monotone = false;             // max error strictly decreasing
};

// Rescaled flow return map against the linear branch map on seeded samples of
// the branch domain.
ErrorTable verify_asymptotics(const GameModel& game, const SkeletonField& chi, const FlowGraph& graph,
                              const PiecewiseLinearMap& plm, std::size_t branch,
                              const AsymptoticsOptions& opts);

struct AgreementOptions {
  std::size_t samples = 50;
  std::uint64_t seed = 11;
  double eps = 0.1;
  double r = 0.5;
  double s_lo = 2.0, s_hi = 3.0;
  double exclude = 1e-3;  // minimal best-branch slack
  double level = 0.25;
  IntegratorOptions integrator;
  bool parallel = true;
  int threads = 0;
};

struct AgreementCase {
  std::vector<double> theta;
  std::optional<std::size_t> predicted;  // branch from domain membership
  std::optional<std::size_t> observed;   // branch from the integrated itinerary
  Itinerary itinerary;
  std::string status;
};

struct AgreementReport {
  EdgeId edge = 0;
  std::vector<AgreementCase> cases;
  std::size_t excluded = 0;
  std::size_t agree = 0;
};

// Numerically followed itinerary from the source section of `edge` versus the
// branch whose domain holds the rescaled start point.
AgreementReport oracle_agreement(const GameModel& game, const SkeletonField& chi, const FlowGraph& graph,
                                 const PiecewiseLinearMap& plm, EdgeId edge, const AgreementOptions& opts);

}  // namespace polyskel
