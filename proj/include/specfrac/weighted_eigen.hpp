#pragma once

#include <cmath>
#include <vector>

#include "specfrac/basis.hpp"
#include "specfrac/dense.hpp"
#include "specfrac/errors.hpp"
#include "specfrac/fracop.hpp"
#include "specfrac/pencil.hpp"
#include "specfrac/weight.hpp"

namespace specfrac {

/// Gram matrix of the basis against the weight, M_ij = int m phi_i phi_j,
/// assembled with the basis quadrature.
inline Matrix assemble_weight_matrix(const SpectralBasis& basis, const Weight& m) {
  const int n = basis.modes() + 1;
  const QuadratureRule& quad = basis.quadrature();
  const std::size_t nq = quad.nodes.size();
  std::vector<double> mw(nq);
  for (std::size_t q = 0; q < nq; ++q) mw[q] = quad.weights[q] * m.eval(quad.nodes[q], basis.length());
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < nq; ++q) s += mw[q] * basis.mode_at_node(i, q) * basis.mode_at_node(j, q);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

/// Same matrix in closed form. A product of three cosines integrates to zero
/// over (0, L) unless the frequencies cancel, so each weight harmonic j only
/// couples mode pairs with |i - k| = j or i + k = j.
inline Matrix assemble_weight_matrix_analytic(const SpectralBasis& basis, const Weight& m) {
  const int n = basis.modes() + 1;
  const double L = basis.length();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) out(i, i) = m.offset;
  std::vector<double> norm(n);
  norm[0] = 1.0 / std::sqrt(L);
  for (int i = 1; i < n; ++i) norm[i] = std::sqrt(2.0 / L);
  for (const Weight::Harmonic& h : m.harmonics) {
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) {
        const int hits = (k - i == h.index ? 1 : 0) + (k + i == h.index ? 1 : 0);
        if (hits == 0) continue;
        const double v = h.amplitude * norm[i] * norm[k] * (L / 4.0) * hits;
        out(i, k) += v;
        if (k != i) out(k, i) += v;
      }
  }
  return out;
}

struct EigenPair {
  double lambda = 0.0;
  SpectralField field;        // int m u^2 = 1, sign fixed by int u > 0 (u(0) > 0 on ties)
  bool positive = false;      // one-signed on the scan grid
  double op_residual = 0.0;         // ||diag(mu^s) u - lambda M u||_inf over modes >= 1
  double constraint_residual = 0.0; // |(M u)_0|
  double norm_residual = 0.0;       // |u^T M u - 1|
  int jacobi_sweeps = 0;
};

struct RayleighResidual {
  double op_residual = 0.0;
  double constraint_residual = 0.0;
};

inline RayleighResidual rayleigh_residual(const SpectralBasis& basis, const Weight& m,
                                          FracPower p, const SpectralField& u, double lambda) {
  const Matrix mat = assemble_weight_matrix(basis, m);
  const std::vector<double> mu = mat * u.coeffs;
  RayleighResidual r;
  r.constraint_residual = std::abs(mu[0]);
  for (int k = 1; k <= basis.modes(); ++k) {
    const double lhs = std::pow(basis.mu(k), p.s) * u.coeffs[k];
    r.op_residual = std::max(r.op_residual, std::abs(lhs - lambda * mu[k]));
  }
  return r;
}

/// True when the field does not change sign on an n-point grid over [0, L]
/// (up to a relative tolerance that forgives roundoff-level undershoot).
inline bool positivity_scan(const SpectralField& u, int grid_n = 1024) {
  const std::vector<double> xs = uniform_grid(u.basis->length(), grid_n);
  double lo = 0.0, hi = 0.0;
  for (double x : xs) {
    const double v = synthesize(u, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double vmax = std::max(std::abs(lo), std::abs(hi));
  return lo > -1e-10 * vmax;
}

/// Smallest positive eigenvalue of  (-Laplace_N)^s u = lambda m u  on the
/// zero-weighted-mean subspace, via Schur elimination of the constant mode.
inline EigenPair smallest_positive_eigen(const SpectralBasis& basis, const Weight& m, FracPower p) {
  const int n = basis.modes() + 1;
  const Matrix mat = assemble_weight_matrix(basis, m);
  std::vector<double> d(n, 0.0);
  for (int k = 1; k < n; ++k) d[k] = std::pow(basis.mu(k), p.s);

  PencilSolution sol = smallest_positive_pencil(d, mat);

  EigenPair pair;
  pair.lambda = sol.lambda;
  pair.jacobi_sweeps = sol.jacobi_sweeps;
  pair.field = SpectralField(basis);
  pair.field.coeffs = sol.coeffs;

  double flip = 1.0;
  const double integral = std::sqrt(basis.length()) * pair.field.coeffs[0];
  if (std::abs(integral) > 1e-12 * two_norm(pair.field.coeffs)) {
    if (integral < 0.0) flip = -1.0;
  } else if (synthesize(pair.field, 0.0) < 0.0) {
    flip = -1.0;
  }
  if (flip < 0.0)
    for (double& c : pair.field.coeffs) c = -c;

  pair.positive = positivity_scan(pair.field);
  const std::vector<double> mu = mat * pair.field.coeffs;
  pair.constraint_residual = std::abs(mu[0]);
  double q = 0.0;
  for (int k = 0; k < n; ++k) q += pair.field.coeffs[k] * mu[k];
  pair.norm_residual = std::abs(q - 1.0);
  for (int k = 1; k < n; ++k) {
    const double r = d[k] * pair.field.coeffs[k] - pair.lambda * mu[k];
    pair.op_residual = std::max(pair.op_residual, std::abs(r));
  }
  return pair;
}

}  // namespace specfrac
