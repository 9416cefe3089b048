#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "specfrac/dense.hpp"
#include "specfrac/errors.hpp"

namespace specfrac {

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j is the eigenvector of values[j]
  int sweeps = 0;
};

inline double off_diagonal_frobenius(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

/// Cyclic Jacobi rotation eigensolver for symmetric matrices.
///
/// Sweeps all upper-triangle pairs in row order, annihilating each entry with
/// a two-sided rotation, until the off-diagonal Frobenius norm falls below
/// tol * max(1, ||A||_F). Quadratic convergence makes the sweep cap generous.
inline EigenDecomposition jacobi_eigen(Matrix a, double tol = 1e-13, int max_sweeps = 100) {
  const int n = a.rows();
  if (a.cols() != n) throw InvalidParameter("jacobi_eigen: matrix must be square");
  if (a.asymmetry() > 1e-12 * std::max(1.0, a.max_abs()))
    throw InvalidParameter("jacobi_eigen: matrix must be symmetric");

  Matrix v = Matrix::identity(n);
  double full = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) full += a(i, j) * a(i, j);
  const double stop = tol * std::max(1.0, std::sqrt(full));

  int sweep = 0;
  while (off_diagonal_frobenius(a) > stop) {
    if (sweep >= max_sweeps) throw NoConvergence("jacobi_eigen: sweep limit reached");
    ++sweep;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double diff = a(q, q) - a(p, p);
        double t;
        if (std::abs(apq) < 1e-300 * std::abs(diff)) {
          t = apq / diff;
        } else {
          const double theta = diff / (2.0 * apq);
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = a(i, p), aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(p, i) = a(i, p);
            a(q, i) = a(i, q);
          }
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  EigenDecomposition dec;
  dec.sweeps = sweep;
  dec.values.resize(n);
  for (int i = 0; i < n; ++i) dec.values[i] = a(i, i);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return dec.values[i] < dec.values[j]; });
  std::vector<double> sorted(n);
  for (int i = 0; i < n; ++i) sorted[i] = dec.values[order[i]];
  dec.values = std::move(sorted);
  dec.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) dec.vectors(i, j) = v(i, order[j]);
  return dec;
}

}  // namespace specfrac
