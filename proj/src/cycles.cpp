#include "polyskel/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "polyskel/exact_lp.hpp"

namespace polyskel {

Rational ChartPiece::operator()(const Rational& x) const {
  return (num[0] + num[1] * x) / (den[0] + den[1] * x);
}

double ChartPiece::operator()(double x) const {
  return (num[0].get_d() + num[1].get_d() * x) / (den[0].get_d() + den[1].get_d() * x);
}

std::optional<std::size_t> Chart::piece_at(double x) const {
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double a = pieces[k].lo.get_d(), b = pieces[k].hi.get_d();
    if (x >= a && (x < b || (x == b && pieces[k].hi == hi))) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> Chart::piece_at(const Rational& x) const {
  for (std::size_t k = 0; k < pieces.size(); ++k)
    if (x >= pieces[k].lo && (x < pieces[k].hi || (x == pieces[k].hi && x == hi))) return k;
  return std::nullopt;
}

double Chart::operator()(double x) const {
  auto k = piece_at(x);
  if (!k) return std::numeric_limits<double>::quiet_NaN();
  return pieces[*k](x);
}

std::optional<Rational> Chart::operator()(const Rational& x) const {
  auto k = piece_at(x);
  if (!k) return std::nullopt;
  return pieces[*k](x);
}

double Chart::to_chart(const Polytope& poly, EdgeId e, const std::vector<double>& u) const {
  auto it = std::find(edges.begin(), edges.end(), e);
  if (it == edges.end()) throw ValidationError(Polytope::edge_name(e) + " is not charted");
  const auto sup = poly.dual_support_edge(e).coords;
  const double k = static_cast<double>(it - edges.begin());
  return k + u[sup[0]] / (u[sup[0]] + u[sup[1]]);
}

std::pair<EdgeId, std::vector<double>> Chart::from_chart(const Polytope& poly, double x) const {
  const long m = static_cast<long>(edges.size());
  long k = static_cast<long>(std::floor(x));
  k = std::clamp(k, 0L, m - 1);
  const EdgeId e = edges[static_cast<std::size_t>(k)];
  const auto sup = poly.dual_support_edge(e).coords;
  std::vector<double> u(poly.facet_count(), 0.0);
  const double t = x - static_cast<double>(k);
  u[sup[0]] = t;
  u[sup[1]] = 1.0 - t;
  return {e, u};
}

namespace {

std::optional<Chart> build_chart(const PiecewiseLinearMap& plm) {
  const Polytope& poly = plm.polytope();
  if (poly.dim() != 3) return std::nullopt;
  Chart c;
  c.edges = plm.structural_set();
  auto offset = [&](EdgeId e) {
    return Rational(static_cast<long>(std::find(c.edges.begin(), c.edges.end(), e) - c.edges.begin()));
  };
  for (std::size_t k = 0; k < plm.branches().size(); ++k) {
    const Branch& b = plm.branches()[k];
    const auto sup = poly.dual_support_edge(b.source).coords;
    const Rational o = offset(b.source), o2 = offset(b.target);
    // Interval in t = x - o from u = (t, 1 - t) > 0 and the domain rows.
    Rational lo = 0, hi = 1;
    bool empty = false;
    for (std::size_t r = 0; r < b.domain.rows.size(); ++r) {
      const RationalVector row = b.domain.restricted_row(r);
      const Rational slope = row[0] - row[1];
      if (slope == 0) {
        if (row[1] <= 0) empty = true;
        continue;
      }
      const Rational root = -row[1] / slope;
      if (slope > 0)
        lo = std::max(lo, root);
      else
        hi = std::min(hi, root);
    }
    if (empty || lo >= hi) continue;
    const RationalMatrix m = b.restricted_matrix(poly);
    // w(t) = M (t, 1 - t); image x' = o2 + w_a / (w_a + w_b).
    const Rational wa1 = m(0, 0) - m(0, 1), wa0 = m(0, 1);
    const Rational wb1 = m(1, 0) - m(1, 1), wb0 = m(1, 1);
    const Rational n1 = (1 + o2) * wa1 + o2 * wb1, n0 = (1 + o2) * wa0 + o2 * wb0;
    const Rational d1 = wa1 + wb1, d0 = wa0 + wb0;
    // Back to x = t + o.
    RationalVector coeffs{n0 - n1 * o, n1, d0 - d1 * o, d1};
    coeffs = primitive(coeffs);
    const int s = coeffs[2] != 0 ? sign(coeffs[2]) : sign(coeffs[3]);
    if (s < 0)
      for (auto& q : coeffs) q = -q;
    ChartPiece p;
    p.branch = k;
    p.lo = lo + o;
    p.hi = hi + o;
    p.num[0] = coeffs[0];
    p.num[1] = coeffs[1];
    p.den[0] = coeffs[2];
    p.den[1] = coeffs[3];
    c.pieces.push_back(p);
  }
  if (c.pieces.empty()) return std::nullopt;
  std::sort(c.pieces.begin(), c.pieces.end(),
            [](const ChartPiece& a, const ChartPiece& b) { return a.lo < b.lo; });
  c.lo = c.pieces.front().lo;
  c.hi = c.pieces.front().hi;
  std::vector<Rational> ends;
  for (const auto& p : c.pieces) {
    c.lo = std::min(c.lo, p.lo);
    c.hi = std::max(c.hi, p.hi);
    ends.push_back(p.lo);
    ends.push_back(p.hi);
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  for (const auto& e : ends)
    if (e != c.lo && e != c.hi) c.breakpoints.push_back(e);
  return c;
}

Rational total(const RationalVector& u) {
  Rational s = 0;
  for (const auto& x : u) s += x;
  return s;
}

}  // namespace

ProjectiveMap ProjectiveMap::build(const PiecewiseLinearMap& plm) {
  ProjectiveMap pm;
  pm.plm_ = &plm;
  pm.chart_ = build_chart(plm);
  return pm;
}

ProjectiveMap projectivize(const PiecewiseLinearMap& plm) { return ProjectiveMap::build(plm); }

PoincareStep ProjectiveMap::apply(EdgeId edge, const RationalVector& u) const {
  PoincareStep st = plm_->apply(edge, u);
  if (st.status != PoincareStep::Status::ok) return st;
  const Rational s = total(st.image);
  if (s <= 0) throw NumericError("projective normalization with nonpositive sum");
  for (auto& x : st.image) x /= s;
  return st;
}

PoincareStepD ProjectiveMap::apply(EdgeId edge, const std::vector<double>& u, double tol) const {
  PoincareStepD st = plm_->apply(edge, u, tol);
  if (st.status != PoincareStep::Status::ok) return st;
  double s = 0;
  for (double x : st.image) s += x;
  if (!(s > 0)) throw NumericError("projective normalization with nonpositive sum");
  for (auto& x : st.image) x /= s;
  return st;
}

SpectralRatios spectral_ratios(double lambda, const std::vector<std::complex<double>>& spectrum) {
  std::vector<std::complex<double>> rest = spectrum;
  if (!rest.empty()) {
    auto it = std::min_element(rest.begin(), rest.end(), [&](const auto& a, const auto& b) {
      return std::abs(a - lambda) < std::abs(b - lambda);
    });
    rest.erase(it);
  }
  SpectralRatios r;
  if (rest.empty()) {
    r.sigma_max = 0;
    r.sigma_min = std::numeric_limits<double>::infinity();
    return r;
  }
  r.sigma_max = 0;
  r.sigma_min = std::numeric_limits<double>::infinity();
  for (const auto& z : rest) {
    r.sigma_max = std::max(r.sigma_max, std::abs(z) / lambda);
    r.sigma_min = std::min(r.sigma_min, std::abs(z) / lambda);
  }
  return r;
}

std::string Verdict::text() const {
  const std::string m = stable_manifold ? "stable" : "unstable";
  switch (kind) {
    case Kind::normally_contractive: return "normally contractive local " + m + " manifold";
    case Kind::normally_repelling: return "normally repelling local " + m + " manifold";
    case Kind::normally_hyperbolic: return "normally hyperbolic local " + m + " manifold";
    case Kind::eigenvalue_one: return "hyperbolicity hypothesis fails (eigenvalue 1); theorem inapplicable";
    case Kind::ratio_one: return "non-hyperbolic ratio 1; theorem inapplicable";
  }
  return "?";
}

Verdict classify_cycle(double lambda, const std::vector<std::complex<double>>& others, double tol) {
  Verdict v;
  v.stable_manifold = lambda > 1;
  if (std::abs(lambda - 1.0) <= tol) {
    v.kind = Verdict::Kind::eigenvalue_one;
    return v;
  }
  for (const auto& z : others)
    if (std::abs(std::abs(z) - lambda) <= tol * lambda) {
      v.kind = Verdict::Kind::ratio_one;
      return v;
    }
  if (others.empty()) {
    v.kind = Verdict::Kind::normally_hyperbolic;
    return v;
  }
  double smax = 0, smin = std::numeric_limits<double>::infinity();
  for (const auto& z : others) {
    smax = std::max(smax, std::abs(z) / lambda);
    smin = std::min(smin, std::abs(z) / lambda);
  }
  if (smax < 1)
    v.kind = Verdict::Kind::normally_contractive;
  else if (smin > 1)
    v.kind = Verdict::Kind::normally_repelling;
  else
    v.kind = Verdict::Kind::normally_hyperbolic;
  return v;
}

namespace {

bool canonical_rotation(const std::vector<std::size_t>& w) {
  for (std::size_t r = 1; r < w.size(); ++r) {
    std::vector<std::size_t> rot(w.begin() + static_cast<long>(r), w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(r));
    if (rot < w) return false;
  }
  return true;
}

bool primitive_word(const std::vector<std::size_t>& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool same = true;
    for (std::size_t i = p; i < n && same; ++i) same = w[i] == w[i - p];
    if (same) return false;
  }
  return true;
}

std::vector<double> apply_d(const RationalMatrix& m, const std::vector<double>& u) {
  std::vector<double> r(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (u[j] != 0.0 && m(i, j) != 0) r[i] += m(i, j).get_d() * u[j];
  return r;
}

void normalize(std::vector<double>& u) {
  double s = 0;
  for (double x : u) s += x;
  for (double& x : u) x /= s;
}

}  // namespace

std::vector<CycleReport> fixed_and_periodic_points(const ProjectiveMap& pm, std::size_t max_period,
                                                   double margin) {
  const PiecewiseLinearMap& plm = pm.plm();
  const Polytope& poly = plm.polytope();
  const auto& br = plm.branches();
  std::vector<std::vector<std::size_t>> words;
  std::vector<std::size_t> w;
  std::function<void()> grow = [&]() {
    if (!w.empty() && br[w.back()].target == br[w.front()].source && canonical_rotation(w) &&
        primitive_word(w))
      words.push_back(w);
    if (w.size() == max_period) return;
    for (std::size_t k = 0; k < br.size(); ++k) {
      if (!w.empty() && br[k].source != br[w.back()].target) continue;
      if (!w.empty() && k < w.front()) continue;  // canonical words start at their minimum
      w.push_back(k);
      grow();
      w.pop_back();
    }
  };
  grow();

  std::vector<CycleReport> out;
  for (const auto& word : words) {
    const std::size_t nf = poly.facet_count();
    RationalMatrix prod = RationalMatrix::identity(nf);
    for (std::size_t k : word) prod = br[k].matrix * prod;
    const EdgeId e0 = br[word.front()].source;
    const auto sup = poly.dual_support_edge(e0).coords;
    const RationalMatrix small = prod.submatrix(sup, sup);
    const auto spectrum = eigenvalues(small);
    const Eigen::MatrixXd md = small.to_eigen();
    double scale = 1.0;
    for (const auto& z : spectrum) scale = std::max(scale, std::abs(z));

    std::vector<double> seen;
    for (const auto& z : spectrum) {
      if (std::abs(z.imag()) > 1e-12 * scale || z.real() <= 0) continue;
      const double lambda = z.real();
      if (std::any_of(seen.begin(), seen.end(),
                      [&](double s) { return std::abs(s - lambda) <= 1e-9 * scale; }))
        continue;
      seen.push_back(lambda);

      CycleReport rep;
      rep.word = word;
      for (std::size_t k : word) rep.word_names.push_back(br[k].name);
      for (std::size_t k : word)
        rep.edges.insert(rep.edges.end(), br[k].itinerary.begin(), br[k].itinerary.end() - 1);
      rep.edges.push_back(e0);
      rep.edge = e0;
      rep.matrix = small;
      rep.determinant = small.determinant();
      rep.eigenvalue = lambda;
      rep.spectrum = spectrum;
      std::size_t alg = 0;
      for (const auto& y : spectrum)
        if (std::abs(y - lambda) <= 1e-7 * scale) ++alg;

      Eigen::MatrixXd shifted = md - lambda * Eigen::MatrixXd::Identity(md.rows(), md.cols());
      Eigen::MatrixXd ker = numerical_kernel(shifted, 1e-9);
      if (ker.cols() == 0) ker = numerical_kernel(shifted, 1e-6);
      if (ker.cols() == 0) continue;
      rep.eigenspace_dim = static_cast<std::size_t>(ker.cols());
      rep.defective = alg > rep.eigenspace_dim;
      std::vector<double> u0(sup.size());
      if (ker.cols() == 1) {
        double s = ker.col(0).sum();
        if (std::abs(s) < 1e-14) continue;
        bool ok = true;
        for (std::size_t i = 0; i < sup.size(); ++i) {
          u0[i] = ker(static_cast<long>(i), 0) / s;
          if (u0[i] < -1e-9) ok = false;
          if (u0[i] < 0) u0[i] = 0;
        }
        if (!ok) continue;
      } else {
        // Whole eigenspace: use an exact interior point of the first domain.
        std::vector<RationalVector> rows;
        for (std::size_t r = 0; r < br[word.front()].domain.rows.size(); ++r)
          rows.push_back(br[word.front()].domain.restricted_row(r));
        auto p = open_cone_point(rows, sup.size());
        if (!p) continue;
        for (std::size_t i = 0; i < sup.size(); ++i) u0[i] = (*p)[i].get_d();
      }
      normalize(u0);
      rep.eigenvector = u0;

      std::vector<double> u(nf, 0.0);
      for (std::size_t i = 0; i < sup.size(); ++i) u[sup[i]] = u0[i];
      double min_slack = std::numeric_limits<double>::infinity();
      for (std::size_t k : word) {
        min_slack = std::min(min_slack, br[k].domain.slack(u));
        if (pm.chart()) rep.orbit_chart.push_back(pm.chart()->to_chart(poly, br[k].source, u));
        u = apply_d(br[k].matrix, u);
        normalize(u);
      }
      if (min_slack < -margin) continue;
      rep.boundary = min_slack <= margin;
      rep.others = spectrum;
      auto it = std::min_element(rep.others.begin(), rep.others.end(), [&](const auto& a, const auto& b) {
        return std::abs(a - lambda) < std::abs(b - lambda);
      });
      rep.others.erase(it);
      rep.ratios = spectral_ratios(lambda, spectrum);
      rep.verdict = classify_cycle(lambda, rep.others);
      out.push_back(std::move(rep));
    }
  }
  return out;
}

ChartOrbit chart_dynamics(const ProjectiveMap& pm, double x0, std::size_t n, double tol,
                          std::size_t max_detect_period) {
  if (!pm.chart()) throw ValidationError("chart dynamics needs a three-dimensional polytope");
  const Chart& c = *pm.chart();
  ChartOrbit o;
  std::vector<double> bps;
  for (const auto& b : c.breakpoints) bps.push_back(b.get_d());
  double x = x0;
  for (std::size_t step = 0; step <= n; ++step) {
    auto k = c.piece_at(x);
    if (!k) {
      o.stop = ChartOrbit::Stop::outside;
      o.xs.push_back(x);
      break;
    }
    o.xs.push_back(x);
    o.pieces.push_back(*k);
    if (std::find(bps.begin(), bps.end(), x) != bps.end()) {
      o.stop = ChartOrbit::Stop::breakpoint;
      break;
    }
    // Stop early once the orbit repeats to machine precision.
    bool settled = false;
    for (std::size_t p = 1; p <= max_detect_period && p < o.xs.size(); ++p)
      if (std::abs(o.xs.back() - o.xs[o.xs.size() - 1 - p]) <= 1e-15 * std::max(1.0, std::abs(x))) {
        settled = true;
        break;
      }
    if (settled || step == n) break;
    x = c.pieces[*k](x);
  }
  if (o.stop != ChartOrbit::Stop::completed) return o;
  const double last = o.xs.back();
  double y = last;
  for (std::size_t p = 1; p <= max_detect_period; ++p) {
    y = c(y);
    if (std::isnan(y)) break;
    if (std::abs(y - last) < tol) {
      o.period = p;
      double z = last;
      for (std::size_t i = 0; i < p; ++i) {
        o.cycle.push_back(z);
        z = c(z);
      }
      break;
    }
  }
  if (o.period && *o.period == 1) {
    const double h = 1e-7;
    const double xr = last + h;
    if (c.piece_at(xr)) {
      const double d = (c(xr) - c(last)) / h;
      o.parabolic = std::abs(d - 1.0) < 1e-4;
      const double g = c(last + 1e-4) - (last + 1e-4);
      o.side_repulsion = g > 0 ? 1 : (g < 0 ? -1 : 0);
    }
  }
  return o;
}

}  // namespace polyskel
