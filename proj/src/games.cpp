#include "polyskel/games.hpp"

#include <algorithm>
#include <cmath>

#include "polyskel/polynomial.hpp"

namespace polyskel {

namespace {

void check_square(const RationalMatrix& a, std::size_t n) {
  if (a.rows() != n || a.cols() != n)
    throw ValidationError("payoff matrix is " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + ", expected " + std::to_string(n) + "x" +
                          std::to_string(n));
}

}  // namespace

GameModel GameModel::replicator(const RationalMatrix& payoff) {
  if (!payoff.square() || payoff.rows() == 0) throw ValidationError("replicator needs a square matrix");
  GameModel g = polymatrix(PrismType{{static_cast<int>(payoff.rows())}}, payoff);
  g.kind_ = GameKind::replicator;
  return g;
}

GameModel GameModel::polymatrix(const PrismType& groups, const RationalMatrix& payoff) {
  groups.validate();
  check_square(payoff, groups.strategies());
  GameModel g;
  g.kind_ = GameKind::polymatrix;
  g.groups_ = groups;
  g.payoff_ = payoff;
  g.payoff_d_ = payoff.to_eigen();
  g.ranges_ = groups.ranges();
  for (std::size_t a = 0; a < g.ranges_.size(); ++a)
    for (std::size_t i = g.ranges_[a].first; i < g.ranges_[a].second; ++i) g.group_of_.push_back(a);
  return g;
}

GameModel GameModel::generalized(const PrismType& groups, PayoffFunction f) {
  groups.validate();
  if (!f) throw ValidationError("generalized game needs a payoff function");
  GameModel g;
  g.kind_ = GameKind::generalized;
  g.groups_ = groups;
  g.fn_ = std::move(f);
  g.ranges_ = groups.ranges();
  for (std::size_t a = 0; a < g.ranges_.size(); ++a)
    for (std::size_t i = g.ranges_[a].first; i < g.ranges_[a].second; ++i) g.group_of_.push_back(a);
  return g;
}

const RationalMatrix& GameModel::payoff() const {
  if (!has_matrix()) throw ValidationError("generalized game has no payoff matrix");
  return payoff_;
}

void GameModel::payoffs(const double* x, double* f) const {
  if (kind_ == GameKind::generalized) {
    fn_(x, f);
    return;
  }
  const long n = payoff_d_.rows();
  Eigen::Map<const Eigen::VectorXd> xv(x, n);
  Eigen::Map<Eigen::VectorXd> fv(f, n);
  fv.noalias() = payoff_d_ * xv;
}

Velocity eval_field(const GameModel& game, const std::vector<double>& x, double tol) {
  const std::size_t n = game.strategies();
  if (x.size() != n) throw ValidationError("state has wrong dimension");
  for (const auto& [b, e] : game.ranges()) {
    double s = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (!(x[i] >= -tol)) throw ValidationError("state has a negative frequency");
      s += x[i];
    }
    if (std::abs(s - 1.0) > tol) throw ValidationError("state is off the prism (group sum != 1)");
  }
  std::vector<double> f(n);
  game.payoffs(x.data(), f.data());
  Velocity v(n);
  for (const auto& [b, e] : game.ranges()) {
    double avg = 0;
    for (std::size_t k = b; k < e; ++k) avg += x[k] * f[k];
    for (std::size_t i = b; i < e; ++i) v[i] = x[i] * (f[i] - avg);
  }
  return v;
}

RationalVector eval_field_exact(const GameModel& game, const RationalVector& x) {
  const RationalMatrix& a = game.payoff();
  if (x.size() != a.rows()) throw ValidationError("state has wrong dimension");
  RationalVector f = a * x;
  RationalVector v(x.size());
  for (const auto& [b, e] : game.ranges()) {
    Rational avg = 0;
    for (std::size_t k = b; k < e; ++k) avg += x[k] * f[k];
    for (std::size_t i = b; i < e; ++i) v[i] = x[i] * (f[i] - avg);
  }
  return v;
}

RationalVector SkeletonField::character(VertexId v) const {
  return RationalVector(chi.begin() + static_cast<long>(v * facets),
                        chi.begin() + static_cast<long>((v + 1) * facets));
}

SkeletonField SkeletonField::negated() const {
  SkeletonField s(*this);
  for (auto& c : s.chi) c = -c;
  return s;
}

std::string order_to_string(int order) {
  return order == kInfiniteOrder ? std::string("inf") : std::to_string(order);
}

SkeletonField skeleton_replicator(const RationalMatrix& a) {
  if (!a.square()) throw ValidationError("replicator needs a square matrix");
  const std::size_t n = a.rows();
  SkeletonField s(n, n);
  auto reduced_skew = [&](std::size_t skip) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        if (k == skip || j == skip) continue;
        if (a(k, j) - a(j, j) != -(a(j, k) - a(k, k))) return false;
      }
    return true;
  };
  const bool full_skew = reduced_skew(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool rows_match = true;
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) != a(j, j)) rows_match = false;
    if (!rows_match || !reduced_skew(i)) {
      s.orders[i] = 1;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s.at(j, i) = a(j, j) - a(i, j);
    } else if (!full_skew) {
      s.orders[i] = 2;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s.at(j, i) = a(j, i) - a(i, i);
    } else {
      s.orders[i] = kInfiniteOrder;
    }
  }
  return s;
}

SkeletonField skeleton_polymatrix(const GameModel& game) {
  const RationalMatrix& a = game.payoff();
  const Polytope poly = Polytope::prism(game.groups());
  const std::size_t n = game.strategies();
  const auto& ranges = game.ranges();
  SkeletonField s(poly.vertex_count(), n);

  std::vector<Polynomial> x;
  for (std::size_t k = 0; k < n; ++k) x.push_back(Polynomial::variable(n, k));
  std::vector<Polynomial> f(n, Polynomial(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) != 0) f[i] += x[j] * a(i, j);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t alpha = game.group_index()[i];
    const auto [b, e] = ranges[alpha];
    if (e - b == 1) {
      // A one-strategy group: the facet x_i = 0 never meets the prism.
      s.orders[i] = kInfiniteOrder;
      continue;
    }
    Polynomial g = f[i];
    for (std::size_t k = b; k < e; ++k) g = g - x[k] * f[k];
    for (std::size_t beta = 0; beta < ranges.size(); ++beta) {
      const auto [bb, be] = ranges[beta];
      std::size_t m = be - 1;
      if (beta == alpha && m == i) m = be - 2;
      Polynomial rest = Polynomial::constant(n, 1);
      for (std::size_t k = bb; k < be; ++k)
        if (k != m) rest = rest - x[k];
      g = g.substitute(m, rest);
    }
    s.orders[i] = kInfiniteOrder;
    const int deg = g.degree_in(i);
    for (int k = 0; k <= deg; ++k) {
      Polynomial pk = g.coefficient(i, k);
      if (pk.is_zero()) continue;
      s.orders[i] = k + 1;
      for (VertexId v = 0; v < poly.vertex_count(); ++v) {
        if (!poly.incident(v, i)) continue;
        RationalVector pt(n, Rational(0));
        for (std::size_t j : poly.vertex_tuple(v)) pt[j] = 1;
        s.at(v, i) = -pk.evaluate(pt);
      }
      break;
    }
  }
  return s;
}

GameModel compactify_lv(const RationalMatrix& a, const RationalVector& r) {
  if (!a.square() || r.size() != a.rows()) throw ValidationError("compactify: size mismatch");
  const std::size_t n = a.rows();
  RationalMatrix t(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t(i, j) = a(i, j);
    t(i, n) = r[i];
  }
  return GameModel::replicator(t);
}

RationalMatrix jacobian_exact(const GameModel& game, const RationalVector& x) {
  const RationalMatrix& a = game.payoff();
  const std::size_t n = x.size();
  RationalVector f = a * x;
  RationalMatrix j(n, n);
  for (const auto& [b, e] : game.ranges()) {
    Rational avg = 0;
    for (std::size_t k = b; k < e; ++k) avg += x[k] * f[k];
    for (std::size_t c = 0; c < n; ++c) {
      Rational davg = 0;
      if (c >= b && c < e) davg += f[c];
      for (std::size_t k = b; k < e; ++k) davg += x[k] * a(k, c);
      for (std::size_t i = b; i < e; ++i) {
        Rational v = x[i] * (a(i, c) - davg);
        if (i == c) v += f[i] - avg;
        j(i, c) = v;
      }
    }
  }
  return j;
}

Eigen::MatrixXd jacobian(const GameModel& game, const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> f(n);
  game.payoffs(x.data(), f.data());
  Eigen::MatrixXd df(n, n);
  if (game.has_matrix()) {
    df = game.payoff_d();
  } else {
    // Central differences for black-box payoffs.
    std::vector<double> xp(x), fp(n), fm(n);
    for (std::size_t c = 0; c < n; ++c) {
      double h = 1e-6;
      xp[c] = x[c] + h;
      game.payoffs(xp.data(), fp.data());
      xp[c] = x[c] - h;
      game.payoffs(xp.data(), fm.data());
      xp[c] = x[c];
      for (std::size_t i = 0; i < n; ++i) df(static_cast<long>(i), static_cast<long>(c)) = (fp[i] - fm[i]) / (2 * h);
    }
  }
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  for (const auto& [b, e] : game.ranges()) {
    double avg = 0;
    for (std::size_t k = b; k < e; ++k) avg += x[k] * f[k];
    for (std::size_t c = 0; c < n; ++c) {
      double davg = (c >= b && c < e) ? f[c] : 0.0;
      for (std::size_t k = b; k < e; ++k) davg += x[k] * df(static_cast<long>(k), static_cast<long>(c));
      for (std::size_t i = b; i < e; ++i) {
        double v = x[i] * (df(static_cast<long>(i), static_cast<long>(c)) - davg);
        if (i == c) v += f[i] - avg;
        j(static_cast<long>(i), static_cast<long>(c)) = v;
      }
    }
  }
  return j;
}

RationalMatrix restrict_to_face(const GameModel& game, const RationalMatrix& jac,
                                const std::vector<std::size_t>& support) {
  // Basis e_k - e_last(group) for every supported k except the group's last;
  // coordinates of a tangent vector in this basis are its non-last entries.
  std::vector<std::size_t> keep;
  std::vector<std::pair<std::size_t, std::size_t>> basis;
  for (const auto& [b, e] : game.ranges()) {
    std::vector<std::size_t> in;
    for (std::size_t k : support)
      if (k >= b && k < e) in.push_back(k);
    for (std::size_t t = 0; t + 1 < in.size(); ++t) basis.emplace_back(in[t], in.back());
  }
  const std::size_t d = basis.size();
  RationalMatrix r(d, d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t i = 0; i < d; ++i)
      r(i, c) = jac(basis[i].first, basis[c].first) - jac(basis[i].first, basis[c].second);
  return r;
}

std::vector<FaceEquilibrium> equilibria(const GameModel& game, bool keep_empty) {
  const RationalMatrix& a = game.payoff();
  const auto& ranges = game.ranges();
  const std::size_t p = ranges.size();
  const std::size_t n = game.strategies();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  // Per-group nonempty subsets as bit masks; odometer over groups.
  std::vector<unsigned long> mask(p, 1), limit(p);
  for (std::size_t g = 0; g < p; ++g) limit[g] = (1UL << (ranges[g].second - ranges[g].first));
  std::vector<FaceEquilibrium> out;
  for (;;) {
    FaceEquilibrium fe;
    std::vector<std::size_t> group_of_unknown;
    for (std::size_t g = 0; g < p; ++g)
      for (std::size_t k = ranges[g].first; k < ranges[g].second; ++k)
        if (mask[g] >> (k - ranges[g].first) & 1UL) fe.support.push_back(k);
    const std::size_t s = fe.support.size();
    // Unknowns: x_k on the support, then one average payoff per group.
    RationalMatrix m(s + p, s + p);
    RationalVector rhs(s + p, Rational(0));
    for (std::size_t r = 0; r < s; ++r) {
      std::size_t i = fe.support[r];
      for (std::size_t c = 0; c < s; ++c) m(r, c) = a(i, fe.support[c]);
      m(r, s + game.group_index()[i]) = -1;
    }
    for (std::size_t g = 0; g < p; ++g) {
      for (std::size_t c = 0; c < s; ++c)
        if (game.group_index()[fe.support[c]] == g) m(s + g, c) = 1;
      rhs[s + g] = 1;
    }
    auto sol = m.solve(rhs);
    bool keep = false;
    if (!sol) {
      fe.status = FaceEquilibrium::Status::degenerate;
      keep = true;
    } else {
      bool positive = true;
      for (std::size_t c = 0; c < s; ++c)
        if ((*sol)[c] <= 0) positive = false;
      if (positive) {
        fe.status = FaceEquilibrium::Status::isolated;
        fe.point.assign(n, Rational(0));
        for (std::size_t c = 0; c < s; ++c) fe.point[fe.support[c]] = (*sol)[c];
        RationalMatrix jac = jacobian_exact(game, fe.point);
        fe.face_spectrum = eigenvalues(restrict_to_face(game, jac, fe.support));
        fe.spectrum = eigenvalues(restrict_to_face(game, jac, all));
        keep = true;
      }
    }
    fe.interior = s == n;
    if (keep || keep_empty) out.push_back(std::move(fe));
    std::size_t g = p;
    while (g-- > 0) {
      if (++mask[g] < limit[g]) break;
      mask[g] = 1;
    }
    if (g == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace polyskel
