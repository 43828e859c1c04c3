#pragma once

#include <cstddef>
#include <vector>

namespace scencert {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vec& d);
  // Kronecker product of an all-ones r x c block pattern with `m`.
  static Matrix ones_kron(std::size_t r, std::size_t c, const Matrix& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const;
  Vec apply(const Vec& x) const;  // m * x
  bool finite() const;
  bool symmetric(double tolerance) const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Rank by Gaussian elimination with partial pivoting; a pivot counts
// only when its magnitude exceeds `tolerance`.
std::size_t numeric_rank(const Matrix& m, double tolerance);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
double min_eigenvalue_symmetric(const Matrix& m);

}  // namespace scencert
