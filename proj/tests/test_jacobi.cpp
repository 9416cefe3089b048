#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "specfrac/jacobi.hpp"

using namespace specfrac;

TEST_CASE("2x2 eigenpairs", "[jacobi]") {
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  const EigenDecomposition dec = jacobi_eigen(a);
  REQUIRE(dec.values.size() == 2);
  CHECK(std::abs(dec.values[0] - 1.0) < 1e-14);
  CHECK(std::abs(dec.values[1] - 3.0) < 1e-14);
  // eigenvector for 3 is (1,1)/sqrt(2) up to sign
  const double r = dec.vectors(0, 1) / dec.vectors(1, 1);
  CHECK(std::abs(r - 1.0) < 1e-13);
}

TEST_CASE("3x3 second-difference matrix", "[jacobi]") {
  Matrix a(3, 3);
  for (int i = 0; i < 3; ++i) a(i, i) = 2.0;
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = -1.0;
  const EigenDecomposition dec = jacobi_eigen(a);
  CHECK(std::abs(dec.values[0] - 0.58578643762690495) < 1e-13);  // 2 - sqrt(2)
  CHECK(std::abs(dec.values[1] - 2.0) < 1e-13);
  CHECK(std::abs(dec.values[2] - 3.4142135623730949) < 1e-13);  // 2 + sqrt(2)
}

TEST_CASE("diagonal input converges immediately", "[jacobi]") {
  Matrix a(4, 4);
  a(0, 0) = 4.0;
  a(1, 1) = -1.0;
  a(2, 2) = 0.5;
  a(3, 3) = 2.0;
  const EigenDecomposition dec = jacobi_eigen(a);
  CHECK(dec.sweeps == 0);
  CHECK(dec.values[0] == -1.0);
  CHECK(dec.values[3] == 4.0);
}

TEST_CASE("random symmetric matrices reconstruct", "[jacobi]") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 20;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = unif(rng);
        a(i, j) = v;
        a(j, i) = v;
      }

    const EigenDecomposition dec = jacobi_eigen(a);

    for (int k = 1; k < n; ++k) CHECK(dec.values[k - 1] <= dec.values[k]);

    // V^T V = I
    double ortho_err = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double dot = 0.0;
        for (int r = 0; r < n; ++r) dot += dec.vectors(r, i) * dec.vectors(r, j);
        ortho_err = std::max(ortho_err, std::abs(dot - (i == j ? 1.0 : 0.0)));
      }
    CHECK(ortho_err < 1e-13);

    // A = V diag V^T
    double rec_err = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int r = 0; r < n; ++r) v += dec.vectors(i, r) * dec.values[r] * dec.vectors(j, r);
        rec_err = std::max(rec_err, std::abs(v - a(i, j)));
      }
    CHECK(rec_err < 1e-12);

    CHECK(dec.sweeps <= 100);
  }
}

TEST_CASE("eigenvalues of a known spectrum are recovered", "[jacobi]") {
  // build A = Q diag(1..n) Q^T from a random orthogonal Q (Gram-Schmidt)
  const int n = 10;
  std::mt19937 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix q(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(n);
    for (double& v : col) v = gauss(rng);
    for (int p = 0; p < j; ++p) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += col[i] * q(i, p);
      for (int i = 0; i < n; ++i) col[i] -= dot * q(i, p);
    }
    double nrm = 0.0;
    for (double v : col) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
  }
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int r = 0; r < n; ++r) v += q(i, r) * (r + 1.0) * q(j, r);
      a(i, j) = v;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }

  const EigenDecomposition dec = jacobi_eigen(a);
  for (int k = 0; k < n; ++k) CHECK(std::abs(dec.values[k] - (k + 1.0)) < 1e-12);
}

TEST_CASE("asymmetric input is rejected", "[jacobi]") {
  Matrix a(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = 0.5;
  CHECK_THROWS_AS(jacobi_eigen(a), InvalidParameter);
}

TEST_CASE("off-diagonal norm helper", "[jacobi]") {
  Matrix a(3, 3);
  a(0, 1) = a(1, 0) = 3.0;
  a(1, 2) = a(2, 1) = 4.0;
  CHECK(std::abs(off_diagonal_frobenius(a) - std::sqrt(50.0)) < 1e-14);
}
