#include "scencert/matrix.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

namespace scencert {

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::ones_kron(std::size_t r, std::size_t c, const Matrix& m) {
  Matrix out(r * m.rows(), c * m.cols());
  for (std::size_t br = 0; br < r; ++br)
    for (std::size_t bc = 0; bc < c; ++bc)
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
          out(br * m.rows() + i, bc * m.cols() + j) = m(i, j);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Matrix::apply(const Vec& x) const {
  assert(x.size() == cols_);
  Vec y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

bool Matrix::finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool Matrix::symmetric(double tolerance) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tolerance) return false;
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double min_eigenvalue_symmetric(const Matrix& m) {
  assert(m.rows() == m.cols());
  Matrix a = m;
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.max_abs() * a.max_abs())) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double sign = theta >= 0.0 ? 1.0 : -1.0;
        const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double mn = a(0, 0);
  for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, a(i, i));
  return mn;
}

std::size_t numeric_rank(const Matrix& m, double tolerance) {
  Matrix a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    // partial pivoting within the column
    std::size_t best = row;
    for (std::size_t r = row + 1; r < rows; ++r)
      if (std::abs(a(r, col)) > std::abs(a(best, col))) best = r;
    if (std::abs(a(best, col)) <= tolerance) continue;
    if (best != row)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(best, j), a(row, j));
    const double piv = a(row, col);
    for (std::size_t r = row + 1; r < rows; ++r) {
      const double f = a(r, col) / piv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < cols; ++j) a(r, j) -= f * a(row, j);
    }
    ++rank;
    ++row;
  }
  return rank;
}

}  // namespace scencert
