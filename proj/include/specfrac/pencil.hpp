#pragma once

#include <cmath>
#include <vector>

#include "specfrac/dense.hpp"
#include "specfrac/errors.hpp"
#include "specfrac/jacobi.hpp"

namespace specfrac {

/// Smallest positive eigenvalue of the singular pencil
///     diag(d) u = lambda M u,   d[0] = 0, d[k] > 0 for k >= 1,
/// where slot 0 is the kernel mode of the left-hand side. Row 0 forces
/// (M u)_0 = 0 for any eigenpair with lambda != 0, which lets the kernel
/// coordinate be eliminated when M(0,0) != 0.
struct PencilSolution {
  double lambda = 0.0;
  double theta = 0.0;           // 1/lambda, eigenvalue of the reduced matrix
  std::vector<double> coeffs;   // full coefficient vector, u^T M u = 1
  int jacobi_sweeps = 0;
};

inline PencilSolution smallest_positive_pencil(const std::vector<double>& d, const Matrix& m) {
  const int n = static_cast<int>(d.size());
  if (m.rows() != n || m.cols() != n) throw InvalidParameter("pencil: shape mismatch");
  if (n < 2) throw InvalidParameter("pencil: need at least one non-kernel mode");
  if (d[0] != 0.0) throw InvalidParameter("pencil: slot 0 must be the kernel mode");
  for (int k = 1; k < n; ++k)
    if (!(d[k] > 0.0)) throw InvalidParameter("pencil: diagonal must be positive off the kernel");
  const double m00 = m(0, 0);
  if (std::abs(m00) <= 1e-12)
    throw ZeroMeanWeight("pencil: weight mean is numerically zero, kernel mode cannot be eliminated");

  // Schur complement of the kernel row/column, then symmetric scaling by
  // diag(d)^{-1/2}: eigenvalues theta of S are reciprocals of the pencil's.
  Matrix s(n - 1, n - 1);
  std::vector<double> dinv(n, 0.0);
  for (int k = 1; k < n; ++k) dinv[k] = 1.0 / std::sqrt(d[k]);
  for (int k = 1; k < n; ++k)
    for (int j = k; j < n; ++j) {
      const double mt = m(k, j) - m(k, 0) * m(0, j) / m00;
      const double v = dinv[k] * mt * dinv[j];
      s(k - 1, j - 1) = v;
      s(j - 1, k - 1) = v;
    }

  EigenDecomposition dec = jacobi_eigen(std::move(s));
  const double theta = dec.values[n - 2];
  double scale = std::max(std::abs(dec.values[0]), std::abs(theta));
  if (!(theta > 1e-13 * std::max(1.0, scale)))
    throw NoPositiveEigenvalue("pencil: reduced matrix has no positive eigenvalue");

  PencilSolution sol;
  sol.theta = theta;
  sol.lambda = 1.0 / theta;
  sol.jacobi_sweeps = dec.sweeps;
  sol.coeffs.assign(n, 0.0);
  for (int k = 1; k < n; ++k) sol.coeffs[k] = dinv[k] * dec.vectors(k - 1, n - 2);
  double acc = 0.0;
  for (int j = 1; j < n; ++j) acc += m(0, j) * sol.coeffs[j];
  sol.coeffs[0] = -acc / m00;

  // u^T M u = theta * sum d_k u_k^2 > 0 for a positive-theta eigenvector.
  const std::vector<double> mu = m * sol.coeffs;
  double q = 0.0;
  for (int k = 0; k < n; ++k) q += sol.coeffs[k] * mu[k];
  if (!(q > 0.0)) throw NoPositiveEigenvalue("pencil: eigenvector has nonpositive weighted norm");
  const double inv = 1.0 / std::sqrt(q);
  for (double& c : sol.coeffs) c *= inv;
  return sol;
}

}  // namespace specfrac
