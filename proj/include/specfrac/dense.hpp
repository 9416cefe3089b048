#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "specfrac/errors.hpp"

namespace specfrac {

/// Dense row-major matrix of doubles. Deliberately minimal: the library only
/// needs storage, element access and a couple of small solves.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw InvalidParameter("matrix dimensions must be nonnegative");
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  /// max_ij |A_ij - A_ji|
  double asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

inline std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

/// Solves A x = b by LU with partial pivoting. A is consumed by value.
inline std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw InvalidParameter("lu_solve: shape mismatch");
  const double scale = a.max_abs();
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) <= 1e-300 + 1e-15 * scale)
      throw SingularSystem("lu_solve: pivot below working precision");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    const double inv = 1.0 / a(col, col);
    for (int i = col + 1; i < n; ++i) {
      const double f = a(i, col) * inv;
      if (f == 0.0) continue;
      a(i, col) = f;
      for (int j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
    b[i] = s / a(i, i);
  }
  return b;
}

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double two_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace specfrac
