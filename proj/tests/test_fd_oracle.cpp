#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "specfrac/fd_oracle.hpp"
#include "specfrac/logistic.hpp"
#include "specfrac/weighted_eigen.hpp"

using namespace specfrac;

TEST_CASE("second-difference matrix annihilates constants and is symmetric", "[fd_oracle]") {
  const Matrix a = neumann_tridiagonal(5.0, 40);
  CHECK(a.asymmetry() == 0.0);
  for (int i = 0; i < 40; ++i) {
    double row = 0.0;
    for (int j = 0; j < 40; ++j) row += a(i, j);
    CHECK(std::abs(row) < 1e-13);
  }
  // quadratic form equals the summed squared differences over h
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> u(40);
  for (double& v : u) v = unif(rng);
  const std::vector<double> au = a * u;
  double quad = 0.0;
  for (int i = 0; i < 40; ++i) quad += u[i] * au[i];
  double ref = 0.0;
  const double h = 5.0 / 40;
  for (int i = 0; i + 1 < 40; ++i) ref += (u[i + 1] - u[i]) * (u[i + 1] - u[i]) / h;
  CHECK(std::abs(quad - ref) < 1e-12 * std::max(1.0, ref));
}

TEST_CASE("grid eigenvalue of the unweighted problem", "[fd_oracle]") {
  const FdEigenResult res = fd_eigen_laplace(kPi, 128, constant_weight(1.0));
  CHECK(std::abs(res.lambda - 1.0) < 1e-6);
  CHECK(std::abs(res.lambda_coarse - 1.0) < 1e-3);
  // coarse is below fine is below the limit for this dispersion
  CHECK(res.lambda_coarse < res.lambda_fine);
  CHECK(res.lambda_fine < 1.0);
  CHECK_FALSE(res.positive);  // first nonconstant mode changes sign
}

TEST_CASE("closed-form eigenbasis path matches the dense path", "[fd_oracle]") {
  const Weight m = weight_m1();
  const FdEigenResult full = detail::fd_eigen_single(5.0, 256, m, 0);
  const FdEigenResult same = detail::fd_eigen_single(5.0, 256, m, 255);
  CHECK(std::abs(full.lambda - same.lambda) < 1e-10 * full.lambda);
  const FdEigenResult cut = detail::fd_eigen_single(5.0, 256, m, 128);
  CHECK(std::abs(full.lambda - cut.lambda) < 1e-6 * full.lambda);
}

TEST_CASE("grid refinement converges at second order to the spectral value", "[fd_oracle]") {
  const SpectralBasis basis(5.0, 64);
  const Weight m = weight_m1();
  const double ref = smallest_positive_eigen(basis, m, FracPower(1.0)).lambda;
  double err[3];
  int n = 64;
  for (int level = 0; level < 3; ++level, n *= 2)
    err[level] = std::abs(fd_eigen_laplace(5.0, n, m).lambda_coarse - ref);
  CHECK(err[1] / err[0] < 0.35);
  CHECK(err[2] / err[1] < 0.35);
  // extrapolation beats the finer grid on its own
  const FdEigenResult res = fd_eigen_laplace(5.0, 128, m);
  CHECK(std::abs(res.lambda - ref) < std::abs(res.lambda_fine - ref));
  CHECK(std::abs(res.lambda - ref) < 1e-4 * ref);
  CHECK(res.positive);
}

TEST_CASE("trace form is symmetric, semidefinite, and kills constants", "[fd_oracle]") {
  const CylinderGrid grid{24, 48, 12.0};
  const Matrix s = cylinder_dtn_matrix(5.0, grid);
  CHECK(s.asymmetry() == 0.0);
  double kernel = 0.0;
  for (int i = 0; i < 24; ++i) {
    double row = 0.0;
    for (int j = 0; j < 24; ++j) row += s(i, j);
    kernel = std::max(kernel, std::abs(row));
  }
  CHECK(kernel < 1e-10 * s.max_abs());
  const EigenDecomposition dec = jacobi_eigen(s);
  CHECK(dec.values[0] > -1e-10 * dec.values[23]);
  CHECK(dec.values[1] > 0.0);
}

TEST_CASE("trace form reproduces the half-order symbol", "[fd_oracle]") {
  const double L = 5.0;
  const double root_mu1 = kPi / L;
  const CylinderGrid grid{48, 96, 8.0 / root_mu1};
  const Matrix s = cylinder_dtn_matrix(L, grid);
  const double hx = L / grid.nx;
  const EigenDecomposition dec = jacobi_eigen(s);
  for (int k = 1; k <= 3; ++k) {
    const double sym = k * root_mu1 * std::tanh(k * root_mu1 * grid.Y);
    CHECK(std::abs(dec.values[k] / hx - sym) < 1e-2 * sym);
  }
  // Rayleigh quotient of the first cosine sampled on the grid
  std::vector<double> u(grid.nx);
  for (int i = 0; i < grid.nx; ++i) u[i] = std::cos(kPi * (i + 0.5) * hx / L);
  const std::vector<double> su = s * u;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    num += u[i] * su[i];
    den += u[i] * u[i] * hx;
  }
  CHECK(std::abs(num / den - root_mu1) < 1e-2 * root_mu1);
}

TEST_CASE("cylinder eigenvalue for the unit weight", "[fd_oracle]") {
  const double L = 5.0;
  const CylinderGrid grid{64, 128, 8.0 * L / kPi};
  const FdEigenResult res = fd_cylinder_eigen(L, grid, constant_weight(1.0));
  CHECK(std::abs(res.lambda - kPi / L) < 5e-3 * kPi / L);
  CHECK_FALSE(res.positive);
}

TEST_CASE("cylinder eigenvalue tracks the spectral solver", "[fd_oracle]") {
  const double L = 5.0;
  const SpectralBasis basis(L, 64);
  const CylinderGrid grid{64, 128, 8.0 * L / kPi};
  for (const Weight& m : {weight_m1(), weight_m2()}) {
    const double spectral = smallest_positive_eigen(basis, m, FracPower(0.5)).lambda;
    const FdEigenResult res = fd_cylinder_eigen(L, grid, m);
    CHECK(std::abs(res.lambda - spectral) < 2e-2 * spectral);
    CHECK(res.positive);
  }
}

TEST_CASE("cylinder logistic state for the unit weight is constant", "[fd_oracle]") {
  const CylinderGrid grid{32, 64, 12.0};
  const FdLogisticResult res = fd_cylinder_logistic(5.0, grid, constant_weight(1.0), 2.0);
  for (double v : res.trace) CHECK(std::abs(v - 1.0) < 1e-10);
  CHECK(res.iterations == 0);
}

TEST_CASE("cylinder logistic state tracks the spectral branch", "[fd_oracle]") {
  const double L = 5.0;
  const SpectralBasis basis(L, 48);
  const Weight m = weight_m1();
  const double lambda1 = smallest_positive_eigen(basis, m, FracPower(0.5)).lambda;
  const double lambda = 2.0 * lambda1;
  const Branch branch = branch_continue(basis, m, lambda);
  const double sup_spectral = branch.points.back().check.sup_u;

  const CylinderGrid grid{64, 128, 8.0 * L / kPi};
  const FdLogisticResult res = fd_cylinder_logistic(L, grid, m, lambda);
  double sup_fd = 0.0;
  for (double v : res.trace) sup_fd = std::max(sup_fd, v);
  CHECK(std::abs(sup_fd - sup_spectral) < 5e-2 * sup_spectral);
  double lo = 0.0;
  for (double v : res.trace) lo = std::min(lo, v);
  CHECK(lo > -1e-10);
}

TEST_CASE("cylinder logistic collapses below the principal eigenvalue", "[fd_oracle]") {
  const double L = 5.0;
  const CylinderGrid grid{48, 96, 8.0 * L / kPi};
  const Weight m = weight_m1();
  const FdEigenResult eig = fd_cylinder_eigen(L, grid, m);
  const FdLogisticResult res = fd_cylinder_logistic(L, grid, m, 0.5 * eig.lambda);
  for (double v : res.trace) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("banded factorization matches dense elimination", "[fd_oracle]") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 60, bw = 7;
  Matrix dense(n, n);
  BandedSPD banded(n, bw);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - bw); j < i; ++j) {
      const double v = unif(rng);
      dense(i, j) = v;
      dense(j, i) = v;
      banded.at(i, j) = v;
    }
    const double diag = 2.0 * bw + unif(rng);  // dominant, hence SPD
    dense(i, i) = diag;
    banded.at(i, i) = diag;
  }
  std::vector<double> rhs(n);
  for (double& v : rhs) v = unif(rng);
  const std::vector<double> expect = lu_solve(dense, rhs);
  banded.factor();
  std::vector<double> got = rhs;
  banded.solve(got);
  for (int i = 0; i < n; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-11);
}

TEST_CASE("grid helpers reject bad input", "[fd_oracle]") {
  CHECK_THROWS_AS(make_fd_grid(0.0, 16), InvalidParameter);
  CHECK_THROWS_AS(make_fd_grid(5.0, 1), InvalidParameter);
  CHECK_THROWS_AS(cylinder_dtn_matrix(5.0, CylinderGrid{1, 8, 4.0}), InvalidParameter);
  CHECK_THROWS_AS(cylinder_dtn_matrix(5.0, CylinderGrid{8, 8, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(fd_cylinder_logistic(5.0, CylinderGrid{8, 8, 4.0}, weight_m1(), 0.0),
                  InvalidParameter);
}
