#pragma once

#include <cmath>
#include <vector>

#include "specfrac/banded.hpp"
#include "specfrac/basis.hpp"
#include "specfrac/dense.hpp"
#include "specfrac/errors.hpp"
#include "specfrac/jacobi.hpp"
#include "specfrac/pencil.hpp"
#include "specfrac/weight.hpp"

namespace specfrac {

// Finite-difference cross-checks for the spectral solvers. Everything here
// discretizes the differential problems directly on grids; the only shared
// machinery is the pencil reduction and the Jacobi eigensolver.

struct FDGrid {
  int n = 0;
  double h = 0.0;
  std::vector<double> x;  // cell centers
};

inline FDGrid make_fd_grid(double L, int n) {
  if (!(L > 0.0) || n < 2) throw InvalidParameter("make_fd_grid: need L > 0 and n >= 2");
  FDGrid g;
  g.n = n;
  g.h = L / n;
  g.x.resize(n);
  for (int i = 0; i < n; ++i) g.x[i] = (i + 0.5) * g.h;
  return g;
}

/// Cell-centered second-difference matrix with reflecting (Neumann) closures,
/// scaled so that u^T A u approximates the Dirichlet energy: off-diagonals
/// -1/h, diagonal 2/h except 1/h in the first and last rows. A annihilates
/// constants.
inline Matrix neumann_tridiagonal(double L, int n) {
  const FDGrid g = make_fd_grid(L, n);
  Matrix a(n, n);
  const double w = 1.0 / g.h;
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    if (i > 0) {
      a(i, i - 1) = -w;
      diag += w;
    }
    if (i < n - 1) {
      a(i, i + 1) = -w;
      diag += w;
    }
    a(i, i) = diag;
  }
  return a;
}

struct FdEigenResult {
  double lambda = 0.0;         // Richardson-extrapolated when two grids are used
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  std::vector<double> u;       // eigenvector on the (finer) grid
  bool positive = false;
  int jacobi_sweeps = 0;
};

namespace detail {

inline void fix_grid_sign(std::vector<double>& u, double h) {
  double integral = 0.0, norm = 0.0;
  for (double v : u) {
    integral += v * h;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  const bool tie = std::abs(integral) <= 1e-12 * std::max(1.0, norm);
  if ((tie && u[0] < 0.0) || (!tie && integral < 0.0))
    for (double& v : u) v = -v;
}

inline bool grid_one_signed(const std::vector<double>& u) {
  double lo = 0.0, hi = 0.0;
  for (double v : u) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > -1e-10 * std::max(std::abs(lo), std::abs(hi));
}

/// Smallest positive eigenvalue of A u = lambda diag(m(x_i) h) u on one grid.
/// The pencil is transformed into the eigenbasis of A and reduced exactly as
/// in the spectral path. For small n the eigenbasis comes from the Jacobi
/// solver; for large n the closed-form discrete cosine eigenvectors of the
/// same matrix are used instead and the basis is truncated to max_modes
/// (the discarded modes have huge Neumann eigenvalues and influence the
/// smallest positive lambda far below the grid error).
inline FdEigenResult fd_eigen_single(double L, int n, const Weight& m, int max_modes) {
  const FDGrid g = make_fd_grid(L, n);
  std::vector<double> mw(n);
  for (int i = 0; i < n; ++i) mw[i] = m.eval(g.x[i], L) * g.h;

  int nm;                 // number of retained modes including the constant
  Matrix q;               // columns are the retained unit eigenvectors of A
  std::vector<double> d;  // corresponding eigenvalues, d[0] = 0
  int sweeps = 0;
  if (max_modes <= 0 || max_modes >= n) {
    EigenDecomposition dec = jacobi_eigen(neumann_tridiagonal(L, n));
    nm = n;
    if (std::abs(dec.values[0]) > 1e-8 * std::max(1.0, dec.values[n - 1]))
      throw NoConvergence("fd_eigen: constant mode of A not resolved");
    dec.values[0] = 0.0;
    q = std::move(dec.vectors);
    d = std::move(dec.values);
    sweeps = dec.sweeps;
  } else {
    nm = max_modes + 1;
    q = Matrix(n, nm);
    d.assign(nm, 0.0);
    for (int k = 0; k < nm; ++k) {
      const double norm = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int i = 0; i < n; ++i) q(i, k) = norm * std::cos(k * kPi * (i + 0.5) / n);
      const double sn = std::sin(k * kPi / (2.0 * n));
      d[k] = 4.0 / g.h * sn * sn;
    }
  }

  Matrix mm(nm, nm);
  for (int k = 0; k < nm; ++k)
    for (int l = k; l < nm; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += q(i, k) * mw[i] * q(i, l);
      mm(k, l) = s;
      mm(l, k) = s;
    }

  PencilSolution sol = smallest_positive_pencil(d, mm);
  FdEigenResult res;
  res.lambda = res.lambda_coarse = res.lambda_fine = sol.lambda;
  res.jacobi_sweeps = sweeps + sol.jacobi_sweeps;
  res.u.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < nm; ++k) s += q(i, k) * sol.coeffs[k];
    res.u[i] = s;
  }
  fix_grid_sign(res.u, g.h);
  res.positive = grid_one_signed(res.u);
  return res;
}

}  // namespace detail

/// Finite-difference value of the smallest positive eigenvalue of
/// -u'' = lambda m u with Neumann ends, Richardson-extrapolated from grids
/// n and 2n. max_modes = 0 picks the full Jacobi eigenbasis up to n = 384 and
/// the truncated closed-form basis beyond.
inline FdEigenResult fd_eigen_laplace(double L, int n, const Weight& m, int max_modes = 0) {
  auto pick = [&](int grid_n) {
    if (max_modes > 0) return std::min(max_modes, grid_n - 1);
    return grid_n <= 384 ? 0 : std::min(grid_n - 1, 256);
  };
  const FdEigenResult coarse = detail::fd_eigen_single(L, n, m, pick(n));
  FdEigenResult fine = detail::fd_eigen_single(L, 2 * n, m, pick(2 * n));
  FdEigenResult res;
  res.lambda_coarse = coarse.lambda;
  res.lambda_fine = fine.lambda;
  // second-order scheme: h^2 error cancels between h and h/2
  res.lambda = (4.0 * fine.lambda - coarse.lambda) / 3.0;
  res.u = std::move(fine.u);
  res.positive = fine.positive;
  res.jacobi_sweeps = coarse.jacobi_sweeps + fine.jacobi_sweeps;
  return res;
}

struct CylinderGrid {
  int nx = 0;
  int ny = 0;
  double Y = 0.0;
};

/// Discrete Dirichlet-to-Neumann form on the truncated half-cylinder
/// (0,L) x (0,Y): finite-volume Laplacian, Neumann on sides and top, Schur
/// complement onto the bottom row. The result S is symmetric positive
/// semidefinite with the constant vector in its kernel;
/// (S u)_i / h_x approximates the outward normal derivative -d v / d y at the
/// bottom, where v is the discrete harmonic extension of u.
inline Matrix cylinder_dtn_matrix(double L, const CylinderGrid& grid) {
  if (!(L > 0.0) || grid.nx < 2 || grid.ny < 2 || !(grid.Y > 0.0))
    throw InvalidParameter("cylinder_dtn_matrix: bad grid");
  const int nx = grid.nx, ny = grid.ny;
  const double hx = L / nx, hy = grid.Y / ny;
  const double cx = 1.0 / hx;  // flux factor per unit y-thickness
  const double cy = hx / hy;
  const int N = nx * ny;  // interior nodes (i, j), j = 1..ny
  auto idx = [nx](int i, int j) { return (j - 1) * nx + i; };

  BandedSPD b11(N, nx);
  for (int j = 1; j <= ny; ++j) {
    const double dy = (j == ny) ? 0.5 * hy : hy;  // half volume at the top rim
    for (int i = 0; i < nx; ++i) {
      const int row = idx(i, j);
      double diag = 0.0;
      if (i > 0) {
        b11.at(row, idx(i - 1, j)) = -dy * cx;
        diag += dy * cx;
      }
      if (i < nx - 1) diag += dy * cx;  // upper x-neighbor set when visited from the right
      diag += cy;                       // coupling down (to j-1 or the bottom row)
      if (j < ny) {
        diag += cy;
        b11.at(row, idx(i, j + 1)) = -cy;
      }
      b11.at(row, row) = diag;
    }
  }
  b11.factor();

  // Bottom-row block of the finite-volume operator (half volume).
  Matrix s(nx, nx);
  for (int i = 0; i < nx; ++i) {
    double diag = cy;
    if (i > 0) {
      s(i, i - 1) = -0.5 * hy * cx;
      diag += 0.5 * hy * cx;
    }
    if (i < nx - 1) {
      s(i, i + 1) = -0.5 * hy * cx;
      diag += 0.5 * hy * cx;
    }
    s(i, i) = diag;
  }

  // Subtract B01 B11^{-1} B10, one bottom basis vector at a time.
  std::vector<double> rhs(N);
  for (int col = 0; col < nx; ++col) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    rhs[idx(col, 1)] = -cy;  // B10 e_col
    b11.solve(rhs);
    for (int r = 0; r < nx; ++r) s(r, col) -= -cy * rhs[idx(r, 1)];
  }
  for (int i = 0; i < nx; ++i)
    for (int j = i + 1; j < nx; ++j) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

/// Steklov cross-check for the half-Laplacian eigenproblem: smallest positive
/// lambda of S u = lambda diag(m(x_i) h_x) u with S the discrete
/// Dirichlet-to-Neumann form, reduced in the eigenbasis of S like the
/// spectral pencil.
inline FdEigenResult fd_cylinder_eigen(double L, const CylinderGrid& grid, const Weight& m) {
  const Matrix s = cylinder_dtn_matrix(L, grid);
  const int nx = grid.nx;
  const double hx = L / nx;
  EigenDecomposition dec = jacobi_eigen(s);
  if (std::abs(dec.values[0]) > 1e-8 * std::max(1.0, dec.values[nx - 1]))
    throw NoConvergence("fd_cylinder_eigen: constant mode of the trace form not resolved");
  dec.values[0] = 0.0;

  Matrix mm(nx, nx);
  for (int k = 0; k < nx; ++k)
    for (int l = k; l < nx; ++l) {
      double acc = 0.0;
      for (int i = 0; i < nx; ++i)
        acc += dec.vectors(i, k) * m.eval((i + 0.5) * hx, L) * hx * dec.vectors(i, l);
      mm(k, l) = acc;
      mm(l, k) = acc;
    }

  PencilSolution sol = smallest_positive_pencil(dec.values, mm);
  FdEigenResult res;
  res.lambda = res.lambda_coarse = res.lambda_fine = sol.lambda;
  res.jacobi_sweeps = dec.sweeps + sol.jacobi_sweeps;
  res.u.assign(nx, 0.0);
  for (int i = 0; i < nx; ++i) {
    double acc = 0.0;
    for (int k = 0; k < nx; ++k) acc += dec.vectors(i, k) * sol.coeffs[k];
    res.u[i] = acc;
  }
  detail::fix_grid_sign(res.u, hx);
  res.positive = detail::grid_one_signed(res.u);
  return res;
}

struct FdLogisticResult {
  std::vector<double> trace;
  int iterations = 0;
  double residual_norm = 0.0;
};

namespace detail {

/// Damped Newton for the bottom-trace system S u = hx lambda u (m - u); the
/// interior harmonic rows are already eliminated inside S.
inline FdLogisticResult fd_trace_newton(const Matrix& s, const std::vector<double>& mval,
                                        double hx, double lambda, std::vector<double> u) {
  const int nx = s.rows();
  auto residual = [&](const std::vector<double>& v) {
    std::vector<double> r = s * v;
    for (int i = 0; i < nx; ++i) r[i] -= hx * lambda * v[i] * (mval[i] - v[i]);
    return r;
  };
  std::vector<double> r = residual(u);
  double rn = sup_norm(r);
  FdLogisticResult out;
  for (int iter = 0; iter <= 60; ++iter) {
    if (rn <= 1e-12) {
      out.trace = std::move(u);
      out.iterations = iter;
      out.residual_norm = rn;
      return out;
    }
    if (iter == 60) break;
    Matrix jac = s;
    for (int i = 0; i < nx; ++i) jac(i, i) -= hx * lambda * (mval[i] - 2.0 * u[i]);
    std::vector<double> rhs(r);
    for (double& v : rhs) v = -v;
    const std::vector<double> dx = lu_solve(std::move(jac), std::move(rhs));
    double alpha = 1.0;
    bool accepted = false;
    for (int halve = 0; halve <= 20; ++halve) {
      std::vector<double> trial(u);
      for (int i = 0; i < nx; ++i) trial[i] += alpha * dx[i];
      std::vector<double> rt = residual(trial);
      if (sup_norm(rt) < rn) {
        u = std::move(trial);
        r = std::move(rt);
        rn = sup_norm(r);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw NoConvergence("fd_trace_newton: damping failed");
  }
  throw NoConvergence("fd_trace_newton: iteration limit reached");
}

}  // namespace detail

/// Coarse nonlinear cross-check: steady logistic state on the truncated
/// cylinder, returned as the bottom trace. For weights with negative mean the
/// start iterate rides the discrete Steklov eigenvector (amplitude from the
/// first-order branch expansion, doubled on collapse); otherwise it is the
/// constant mean(m) state. Below the discrete principal eigenvalue Newton is
/// simply run from a small positive constant and is expected to land on the
/// trivial state.
inline FdLogisticResult fd_cylinder_logistic(double L, const CylinderGrid& grid, const Weight& m,
                                             double lambda) {
  if (!(lambda > 0.0)) throw InvalidParameter("fd_cylinder_logistic: lambda must be positive");
  const Matrix s = cylinder_dtn_matrix(L, grid);
  const int nx = grid.nx;
  const double hx = L / nx;
  std::vector<double> mval(nx);
  for (int i = 0; i < nx; ++i) mval[i] = m.eval((i + 0.5) * hx, L);

  const double supm = sup_positive_part(m, L);
  if (m.mean() >= 0.0) {
    const double h0 = m.mean() > 0.0 ? m.mean() : 1e-3 * supm;
    return detail::fd_trace_newton(s, mval, hx, lambda, std::vector<double>(nx, h0));
  }

  const FdEigenResult eig = fd_cylinder_eigen(L, grid, m);
  if (lambda <= eig.lambda * (1.0 + 1e-12))
    return detail::fd_trace_newton(s, mval, hx, lambda,
                                   std::vector<double>(nx, 1e-3 * std::max(supm, 1e-30)));

  double cube = 0.0;
  for (int i = 0; i < nx; ++i) cube += eig.u[i] * eig.u[i] * eig.u[i] * hx;
  const double delta = lambda / eig.lambda - 1.0;
  double t = 1e-3 * supm;
  if (cube > 1e-12) t = std::max(t, delta / cube);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<double> init(nx);
    for (int i = 0; i < nx; ++i) init[i] = t * eig.u[i];
    try {
      FdLogisticResult res = detail::fd_trace_newton(s, mval, hx, lambda, std::move(init));
      if (sup_norm(res.trace) > 1e-3 * t) return res;
    } catch (const NoConvergence&) {
    } catch (const SingularSystem&) {
    }
    t *= 2.0;
  }
  throw NoConvergence("fd_cylinder_logistic: could not leave the trivial state");
}

}  // namespace specfrac
