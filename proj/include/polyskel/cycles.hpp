#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "polyskel/skeleton.hpp"

namespace polyskel {

// One Moebius piece of the 1-D chart: x -> (num[0] + num[1] x) / (den[0] + den[1] x)
// on [lo, hi). Coefficients are jointly primitive integers.
struct ChartPiece {
  std::size_t branch = 0;
  Rational lo, hi;
  Rational num[2], den[2];

  Rational operator()(const Rational& x) const;
  double operator()(double x) const;
};

// For three-dimensional polytopes every edge sector is two-dimensional and
// its unit-sum slice is a segment. Sector k of the structural set (in edge
// order) becomes [k, k+1] through x = k + u_a / (u_a + u_b), with a < b the
// two support facets.
struct Chart {
  std::vector<EdgeId> edges;  // offset k <-> edges[k]
  std::vector<ChartPiece> pieces;  // sorted by lo
  std::vector<Rational> breakpoints;
  Rational lo, hi;

  std::optional<std::size_t> piece_at(double x) const;
  std::optional<std::size_t> piece_at(const Rational& x) const;
  double operator()(double x) const;  // NaN outside the pieces
  std::optional<Rational> operator()(const Rational& x) const;

  double to_chart(const Polytope& poly, EdgeId e, const std::vector<double>& u) const;
  std::pair<EdgeId, std::vector<double>> from_chart(const Polytope& poly, double x) const;
};

class ProjectiveMap {
 public:
  static ProjectiveMap build(const PiecewiseLinearMap& plm);

  const PiecewiseLinearMap& plm() const { return *plm_; }
  const std::optional<Chart>& chart() const { return chart_; }

  // Normalized image M u / sum(M u); exact.
  PoincareStep apply(EdgeId edge, const RationalVector& u) const;
  PoincareStepD apply(EdgeId edge, const std::vector<double>& u, double tol = 1e-12) const;

 private:
  const PiecewiseLinearMap* plm_ = nullptr;
  std::optional<Chart> chart_;
};

ProjectiveMap projectivize(const PiecewiseLinearMap& plm);

struct SpectralRatios {
  double sigma_max = 0;
  double sigma_min = 0;
};

// Ratios |lambda'| / lambda over the spectrum with one copy of lambda removed.
SpectralRatios spectral_ratios(double lambda, const std::vector<std::complex<double>>& spectrum);

struct Verdict {
  enum class Kind {
    normally_contractive,
    normally_repelling,
    normally_hyperbolic,
    eigenvalue_one,
    ratio_one,
  };
  Kind kind = Kind::eigenvalue_one;
  bool stable_manifold = false;  // lambda > 1; otherwise unstable

  bool applicable() const { return kind != Kind::eigenvalue_one && kind != Kind::ratio_one; }
  std::string text() const;
};

Verdict classify_cycle(double lambda, const std::vector<std::complex<double>>& others,
                       double tol = 1e-12);

struct CycleReport {
  std::vector<std::size_t> word;  // branch indices, cyclic
  std::vector<std::string> word_names;
  Itinerary edges;                // concatenated edge cycle starting at the first source
  EdgeId edge = 0;                // sector holding u0
  RationalMatrix matrix;          // restricted product on the sector of `edge`
  Rational determinant;
  std::vector<double> eigenvector;  // restricted coordinates, unit sum
  double eigenvalue = 0;
  std::vector<std::complex<double>> spectrum;  // all eigenvalues of `matrix`
  std::vector<std::complex<double>> others;    // spectrum minus lambda
  SpectralRatios ratios;
  std::size_t eigenspace_dim = 1;
  bool defective = false;
  bool boundary = false;  // eigenray lies on a domain boundary
  std::vector<double> orbit_chart;  // chart coordinates along the orbit, d = 3
  Verdict verdict;
};

// Cyclic words of composable branches up to max_period (one per rotation
// class, primitive words only) and their positive eigenrays.
std::vector<CycleReport> fixed_and_periodic_points(const ProjectiveMap& pm, std::size_t max_period,
                                                   double margin = 1e-10);

struct ChartOrbit {
  enum class Stop { completed, breakpoint, outside };
  std::vector<double> xs;
  std::vector<std::size_t> pieces;
  Stop stop = Stop::completed;
  std::optional<std::size_t> period;  // detected limit cycle period
  std::vector<double> cycle;          // points of the limit cycle
  bool parabolic = false;             // fixed point with unit derivative
  int side_repulsion = 0;             // sign of phi(x) - x just right of a parabolic fixed point
};

ChartOrbit chart_dynamics(const ProjectiveMap& pm, double x0, std::size_t n, double tol = 1e-9,
                          std::size_t max_detect_period = 8);

}  // namespace polyskel
