#pragma once

#include <cmath>

#include "specfrac/basis.hpp"
#include "specfrac/errors.hpp"

namespace specfrac {

/// Exponent of a spectral fractional power, restricted to (0, 1].
struct FracPower {
  explicit FracPower(double value) : s(value) {
    if (!(value > 0.0) || !(value <= 1.0) || !std::isfinite(value))
      throw InvalidParameter("fractional power must lie in (0, 1]");
  }
  double s;
};

/// Spectral fractional Laplacian: multiplies mode k by mu_k^s and annihilates
/// the constant mode.
inline SpectralField frac_laplacian(const SpectralField& u, FracPower p) {
  SpectralField out(*u.basis);
  out.coeffs[0] = 0.0;
  for (int k = 1; k <= u.basis->modes(); ++k)
    out.coeffs[k] = std::pow(u.basis->mu(k), p.s) * u.coeffs[k];
  return out;
}

/// Inverse of frac_laplacian on the zero-mean subspace. The input must have a
/// (numerically) vanishing constant coefficient; there is no way to invert the
/// constant mode, so a nonzero mean is a contract violation, not noise.
inline SpectralField frac_solve(const SpectralField& f, FracPower p) {
  double norm = 0.0;
  for (double c : f.coeffs) norm += c * c;
  norm = std::sqrt(norm);
  if (std::abs(f.coeffs[0]) > 1e-12 * std::max(1.0, norm))
    throw ZeroMeanViolation("frac_solve: input must have zero mean");
  SpectralField out(*f.basis);
  out.coeffs[0] = 0.0;
  for (int k = 1; k <= f.basis->modes(); ++k)
    out.coeffs[k] = f.coeffs[k] / std::pow(f.basis->mu(k), p.s);
  return out;
}

/// Value at (x, y) of the harmonic extension of u to the half-cylinder
/// (0,L) x (0,inf): mode k decays like exp(-sqrt(mu_k) y), the constant mode
/// extends unchanged.
inline double extend_value(const SpectralField& u, double x, double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw InvalidParameter("extension height y must be >= 0");
  const SpectralBasis& basis = *u.basis;
  double s = u.coeffs[0] * basis.eval_mode(0, x);
  for (int k = 1; k <= basis.modes(); ++k)
    s += u.coeffs[k] * basis.eval_mode(k, x) * std::exp(-std::sqrt(basis.mu(k)) * y);
  return s;
}

/// Cross-sectional Dirichlet energy of the extension at height y:
/// integral over (0,L) of |grad v|^2 dx = sum_k 2 mu_k u_k^2 exp(-2 sqrt(mu_k) y).
inline double energy_profile(const SpectralField& u, double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw InvalidParameter("extension height y must be >= 0");
  const SpectralBasis& basis = *u.basis;
  double s = 0.0;
  for (int k = 1; k <= basis.modes(); ++k) {
    const double mu = basis.mu(k);
    s += 2.0 * mu * u.coeffs[k] * u.coeffs[k] * std::exp(-2.0 * std::sqrt(mu) * y);
  }
  return s;
}

}  // namespace specfrac
