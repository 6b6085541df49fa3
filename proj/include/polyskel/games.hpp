#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "polyskel/geometry.hpp"
#include "polyskel/linalg.hpp"
#include "polyskel/rational.hpp"

namespace polyskel {

enum class GameKind { replicator, polymatrix, generalized };

// f(x) for generalized polymatrix fields; x and f have length n.
using PayoffFunction = std::function<void(const double* x, double* f)>;

class GameModel {
 public:
  static GameModel replicator(const RationalMatrix& payoff);
  static GameModel polymatrix(const PrismType& groups, const RationalMatrix& payoff);
  static GameModel generalized(const PrismType& groups, PayoffFunction f);

  GameKind kind() const { return kind_; }
  const PrismType& groups() const { return groups_; }
  std::size_t strategies() const { return groups_.strategies(); }
  bool has_matrix() const { return kind_ != GameKind::generalized; }
  const RationalMatrix& payoff() const;
  const Eigen::MatrixXd& payoff_d() const { return payoff_d_; }
  const std::vector<std::size_t>& group_index() const { return group_of_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& ranges() const { return ranges_; }

  // f(x), the payoff vector.
  void payoffs(const double* x, double* f) const;

 private:
  GameKind kind_ = GameKind::polymatrix;
  PrismType groups_;
  RationalMatrix payoff_;
  Eigen::MatrixXd payoff_d_;
  PayoffFunction fn_;
  std::vector<std::size_t> group_of_;
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
};

using Velocity = std::vector<double>;

// x_i (f_i(x) - sum_{k in group(i)} x_k f_k(x)). Throws ValidationError when x
// is off the prism by more than tol.
Velocity eval_field(const GameModel& game, const std::vector<double>& x, double tol = 1e-9);
RationalVector eval_field_exact(const GameModel& game, const RationalVector& x);

constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

struct SkeletonField {
  std::size_t vertices = 0;
  std::size_t facets = 0;
  std::vector<Rational> chi;  // row-major vertices x facets
  std::vector<int> orders;    // per facet, kInfiniteOrder for identical tangency

  SkeletonField() = default;
  SkeletonField(std::size_t nv, std::size_t nf)
      : vertices(nv), facets(nf), chi(nv * nf, Rational(0)), orders(nf, 1) {}

  Rational& at(VertexId v, FacetId s) { return chi.at(v * facets + s); }
  const Rational& at(VertexId v, FacetId s) const { return chi.at(v * facets + s); }
  RationalVector character(VertexId v) const;
  SkeletonField negated() const;
  bool operator==(const SkeletonField& o) const {
    return vertices == o.vertices && facets == o.facets && chi == o.chi && orders == o.orders;
  }
};

std::string order_to_string(int order);

// Replicator characters on the simplex, from the three-way case analysis on A.
SkeletonField skeleton_replicator(const RationalMatrix& a);

// Polymatrix characters on the prism. The order and the leading coefficient
// of x_i (f_i - avg) along each facet are read off exactly after eliminating
// one frequency per group.
SkeletonField skeleton_polymatrix(const GameModel& game);

// Replicator game on the (n+1)-simplex for dz/dt = z (r + A z).
GameModel compactify_lv(const RationalMatrix& a, const RationalVector& r);

// Jacobian of the field at x in ambient coordinates.
RationalMatrix jacobian_exact(const GameModel& game, const RationalVector& x);
Eigen::MatrixXd jacobian(const GameModel& game, const std::vector<double>& x);

// Jacobian restricted to the directions of the face with the given support
// (strategy indices), in the basis e_k - e_last per group.
RationalMatrix restrict_to_face(const GameModel& game, const RationalMatrix& jac,
                                const std::vector<std::size_t>& support);

struct FaceEquilibrium {
  enum class Status { isolated, degenerate, none };
  std::vector<std::size_t> support;  // sorted strategy indices
  Status status = Status::none;
  RationalVector point;                             // set when isolated
  std::vector<std::complex<double>> face_spectrum;  // along the face
  std::vector<std::complex<double>> spectrum;       // along the whole prism
  bool interior = false;
};

// Solves "equal payoffs within each group on the support + group sums 1" on
// every face. Isolated equilibria with positive support coordinates and the
// degenerate faces are returned; faces without a solution are dropped unless
// keep_empty is set.
std::vector<FaceEquilibrium> equilibria(const GameModel& game, bool keep_empty = false);

}  // namespace polyskel
