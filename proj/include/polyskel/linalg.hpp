#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

#include "polyskel/rational.hpp"

namespace polyskel {

// Dense row-major matrix of exact rationals. Sizes here are small (|F| x |F|),
// so no attempt is made at sparse storage.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);
  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_rows(const std::vector<RationalVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalVector row(std::size_t i) const;
  RationalVector col(std::size_t j) const;

  RationalMatrix operator*(const RationalMatrix& other) const;
  RationalMatrix operator+(const RationalMatrix& other) const;
  RationalMatrix operator-(const RationalMatrix& other) const;
  RationalVector operator*(const RationalVector& v) const;
  bool operator==(const RationalMatrix& other) const;
  bool operator!=(const RationalMatrix& other) const { return !(*this == other); }

  RationalMatrix transpose() const;
  // Principal/general submatrix on the given index lists.
  RationalMatrix submatrix(const std::vector<std::size_t>& row_idx,
                           const std::vector<std::size_t>& col_idx) const;
  Rational trace() const;
  Rational determinant() const;
  std::optional<RationalMatrix> inverse() const;
  std::optional<RationalVector> solve(const RationalVector& b) const;
  std::size_t rank() const;

  Eigen::MatrixXd to_eigen() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

// Row vector times matrix.
RationalVector left_multiply(const RationalVector& row, const RationalMatrix& m);

// Coefficients c_0..c_n of det(t I - M), c_n = 1 (Faddeev-LeVerrier).
RationalVector characteristic_polynomial(const RationalMatrix& m);

// Complex roots of a real polynomial given by ascending coefficients.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

// Eigenvalues sorted by decreasing real part then decreasing imaginary part.
// Exact characteristic polynomial for n <= 4, Eigen's QR iteration above.
std::vector<std::complex<double>> eigenvalues(const RationalMatrix& m);
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

// Orthonormal basis of the numerical kernel of m (columns).
Eigen::MatrixXd numerical_kernel(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

}  // namespace polyskel
