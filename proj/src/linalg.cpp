#include "polyskel/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace polyskel {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows) {
  if (rows.empty()) return RationalMatrix();
  RationalMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RationalVector RationalMatrix::row(std::size_t i) const {
  return RationalVector(data_.begin() + static_cast<long>(i * cols_),
                        data_.begin() + static_cast<long>((i + 1) * cols_));
}

RationalVector RationalMatrix::col(std::size_t j) const {
  RationalVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product: size mismatch");
  RationalMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        if (o(k, j) != 0) r(i, j) += a * o(k, j);
    }
  return r;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: size mismatch");
  RationalMatrix r(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix difference: size mismatch");
  RationalMatrix r(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

RationalVector RationalMatrix::operator*(const RationalVector& v) const {
  if (v.size() != cols_) throw std::invalid_argument("matrix-vector: size mismatch");
  RationalVector r(rows_, Rational(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != 0 && v[j] != 0) r[i] += (*this)(i, j) * v[j];
  return r;
}

bool RationalMatrix::operator==(const RationalMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RationalMatrix RationalMatrix::submatrix(const std::vector<std::size_t>& ri,
                                         const std::vector<std::size_t>& ci) const {
  RationalMatrix s(ri.size(), ci.size());
  for (std::size_t i = 0; i < ri.size(); ++i)
    for (std::size_t j = 0; j < ci.size(); ++j) s(i, j) = (*this)(ri[i], ci[j]);
  return s;
}

Rational RationalMatrix::trace() const {
  Rational t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

namespace {

// Row echelon form in place; returns (rank, sign of row permutation).
std::pair<std::size_t, int> eliminate(RationalMatrix& a, RationalMatrix* aug) {
  std::size_t r = 0;
  int perm_sign = 1;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    if (p != r) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
      if (aug)
        for (std::size_t j = 0; j < aug->cols(); ++j) std::swap((*aug)(p, j), (*aug)(r, j));
      perm_sign = -perm_sign;
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      if (!aug && i < r) continue;
      Rational f = a(i, c) / a(r, c);
      for (std::size_t j = c; j < a.cols(); ++j)
        if (a(r, j) != 0) a(i, j) -= f * a(r, j);
      if (aug)
        for (std::size_t j = 0; j < aug->cols(); ++j)
          if ((*aug)(r, j) != 0) (*aug)(i, j) -= f * (*aug)(r, j);
    }
    ++r;
  }
  return {r, perm_sign};
}

}  // namespace

Rational RationalMatrix::determinant() const {
  if (!square()) throw std::invalid_argument("determinant of non-square matrix");
  RationalMatrix a(*this);
  auto [rk, s] = eliminate(a, nullptr);
  if (rk < rows_) return 0;
  Rational d = s;
  for (std::size_t i = 0; i < rows_; ++i) d *= a(i, i);
  return d;
}

std::optional<RationalMatrix> RationalMatrix::inverse() const {
  if (!square()) throw std::invalid_argument("inverse of non-square matrix");
  RationalMatrix a(*this);
  RationalMatrix inv = identity(rows_);
  auto [rk, s] = eliminate(a, &inv);
  (void)s;
  if (rk < rows_) return std::nullopt;
  for (std::size_t i = 0; i < rows_; ++i) {
    Rational piv = a(i, i);
    for (std::size_t j = 0; j < cols_; ++j) inv(i, j) /= piv;
  }
  return inv;
}

std::optional<RationalVector> RationalMatrix::solve(const RationalVector& b) const {
  if (!square() || b.size() != rows_) throw std::invalid_argument("solve: size mismatch");
  RationalMatrix a(*this);
  RationalMatrix rhs(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) rhs(i, 0) = b[i];
  auto [rk, s] = eliminate(a, &rhs);
  (void)s;
  if (rk < rows_) return std::nullopt;
  RationalVector x(rows_);
  for (std::size_t i = 0; i < rows_; ++i) x[i] = rhs(i, 0) / a(i, i);
  return x;
}

std::size_t RationalMatrix::rank() const {
  RationalMatrix a(*this);
  return eliminate(a, nullptr).first;
}

Eigen::MatrixXd RationalMatrix::to_eigen() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).get_d();
  return m;
}

RationalVector left_multiply(const RationalVector& row, const RationalMatrix& m) {
  if (row.size() != m.rows()) throw std::invalid_argument("row-matrix: size mismatch");
  RationalVector r(m.cols(), Rational(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (row[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) r[j] += row[i] * m(i, j);
  }
  return r;
}

RationalVector characteristic_polynomial(const RationalMatrix& m) {
  if (!m.square()) throw std::invalid_argument("characteristic polynomial of non-square matrix");
  const std::size_t n = m.rows();
  RationalVector c(n + 1, Rational(0));
  c[n] = 1;
  RationalMatrix mk = RationalMatrix(n, n);  // M_0 = 0
  RationalMatrix id = RationalMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix inner = mk;
    for (std::size_t i = 0; i < n; ++i) inner(i, i) += c[n - k + 1];
    mk = m * inner;
    c[n - k] = -mk.trace() / Rational(static_cast<long>(k));
  }
  return c;
}

namespace {

std::complex<long double> horner(const std::vector<double>& c, std::complex<long double> z,
                                 std::complex<long double>* deriv) {
  std::complex<long double> p = 0, dp = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + static_cast<long double>(c[k]);
  }
  if (deriv) *deriv = dp;
  return p;
}

void sort_spectrum(std::vector<std::complex<double>>& ev) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() <= 1) return {};
  const std::size_t n = c.size() - 1;
  if (n == 1) return {std::complex<double>(-c[0] / c[1], 0.0)};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  for (std::size_t i = 1; i < n; ++i) comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) comp(static_cast<long>(i), static_cast<long>(n - 1)) = -c[i] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> roots;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<long double> z(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    for (int it = 0; it < 8; ++it) {
      std::complex<long double> d;
      std::complex<long double> p = horner(c, z, &d);
      if (std::abs(d) == 0.0L) break;
      std::complex<long double> step = p / d;
      std::complex<long double> zn = z - step;
      if (std::abs(horner(c, zn, nullptr)) >= std::abs(p)) break;
      z = zn;
    }
    roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return roots;
}

std::vector<std::complex<double>> eigenvalues(const RationalMatrix& m) {
  if (!m.square()) throw std::invalid_argument("eigenvalues of non-square matrix");
  const std::size_t n = m.rows();
  std::vector<std::complex<double>> ev;
  if (n == 0) return ev;
  if (n == 1) {
    ev.emplace_back(m(0, 0).get_d(), 0.0);
  } else if (n == 2) {
    // Exact discriminant keeps repeated and real roots exact in sign.
    Rational tr = m.trace();
    Rational det = m.determinant();
    Rational disc = tr * tr - 4 * det;
    double t = tr.get_d();
    if (disc == 0) {
      ev.emplace_back(t / 2, 0.0);
      ev.emplace_back(t / 2, 0.0);
    } else if (disc > 0) {
      double s = std::sqrt(disc.get_d());
      double big = (t >= 0 ? t + s : t - s) / 2;
      double small = big != 0.0 ? det.get_d() / big : 0.0;
      ev.emplace_back(big, 0.0);
      ev.emplace_back(small, 0.0);
    } else {
      double s = std::sqrt(-disc.get_d());
      ev.emplace_back(t / 2, s / 2);
      ev.emplace_back(t / 2, -s / 2);
    }
  } else if (n <= 4) {
    ev = polynomial_roots(to_doubles(characteristic_polynomial(m)));
  } else {
    return eigenvalues(m.to_eigen());
  }
  sort_spectrum(ev);
  return ev;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<std::complex<double>> ev;
  for (long i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()[i]);
  sort_spectrum(ev);
  return ev;
}

Eigen::MatrixXd numerical_kernel(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  long cols = m.cols();
  long rank = 0;
  for (long i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * scale) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace polyskel
