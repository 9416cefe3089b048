#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "specfrac/fracop.hpp"

using namespace specfrac;

namespace {

SpectralField random_field(const SpectralBasis& basis, unsigned seed, bool zero_mean = false) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SpectralField u(basis);
  for (double& c : u.coeffs) c = unif(rng);
  if (zero_mean) u.coeffs[0] = 0.0;
  return u;
}

}  // namespace

TEST_CASE("fractional power validates its range", "[fracop]") {
  CHECK_THROWS_AS(FracPower(0.0), InvalidParameter);
  CHECK_THROWS_AS(FracPower(-0.5), InvalidParameter);
  CHECK_THROWS_AS(FracPower(1.5), InvalidParameter);
  CHECK(FracPower(1.0).s == 1.0);
}

TEST_CASE("half power scales a single mode by sqrt(mu)", "[fracop]") {
  const SpectralBasis basis(5.0, 8);
  SpectralField u(basis);
  u.coeffs[3] = 2.0;
  const SpectralField lu = frac_laplacian(u, FracPower(0.5));
  CHECK(std::abs(lu.coeffs[3] - 2.0 * 1.8849555921538759) < 1e-14);  // 3 pi / 5
  for (int k = 0; k <= 8; ++k)
    if (k != 3) CHECK(lu.coeffs[k] == 0.0);
}

TEST_CASE("constants are annihilated", "[fracop]") {
  const SpectralBasis basis(2.5, 8);
  SpectralField u(basis);
  u.coeffs[0] = 3.0;
  const SpectralField lu = frac_laplacian(u, FracPower(0.7));
  for (double c : lu.coeffs) CHECK(c == 0.0);
}

TEST_CASE("powers compose: s1 then s2 equals s1+s2", "[fracop]") {
  const SpectralBasis basis(8.0, 32);
  const SpectralField u = random_field(basis, 7);
  const SpectralField a = frac_laplacian(frac_laplacian(u, FracPower(0.3)), FracPower(0.7));
  const SpectralField b = frac_laplacian(u, FracPower(1.0));
  for (int k = 0; k <= 32; ++k)
    CHECK(std::abs(a.coeffs[k] - b.coeffs[k]) < 1e-12 * std::max(1.0, std::abs(b.coeffs[k])));
}

TEST_CASE("two half powers give the full Neumann Laplacian", "[fracop]") {
  const SpectralBasis basis(5.0, 16);
  const SpectralField u = random_field(basis, 21);
  const SpectralField a = frac_laplacian(frac_laplacian(u, FracPower(0.5)), FracPower(0.5));
  for (int k = 1; k <= 16; ++k)
    CHECK(std::abs(a.coeffs[k] - basis.mu(k) * u.coeffs[k]) < 1e-12 * basis.mu(k));
  CHECK(a.coeffs[0] == 0.0);
}

TEST_CASE("solve inverts the operator on zero-mean fields", "[fracop]") {
  const SpectralBasis basis(5.0, 24);
  const SpectralField u = random_field(basis, 3, true);
  for (double s : {0.4, 0.5, 1.0}) {
    const SpectralField back = frac_solve(frac_laplacian(u, FracPower(s)), FracPower(s));
    for (int k = 0; k <= 24; ++k) CHECK(std::abs(back.coeffs[k] - u.coeffs[k]) < 1e-12);
    const SpectralField fwd = frac_laplacian(frac_solve(u, FracPower(s)), FracPower(s));
    for (int k = 0; k <= 24; ++k) CHECK(std::abs(fwd.coeffs[k] - u.coeffs[k]) < 1e-12);
  }
}

TEST_CASE("solve rejects a nonzero mean", "[fracop]") {
  const SpectralBasis basis(5.0, 8);
  SpectralField f(basis);
  f.coeffs[0] = 1.0;
  f.coeffs[2] = 0.5;
  CHECK_THROWS_AS(frac_solve(f, FracPower(0.5)), ZeroMeanViolation);
  // tiny constant contamination below the tolerance is accepted
  f.coeffs[0] = 1e-14;
  CHECK_NOTHROW(frac_solve(f, FracPower(0.5)));
}

TEST_CASE("applying the operator always returns a zero-mean field", "[fracop]") {
  const SpectralBasis basis(2.5, 16);
  const SpectralField u = random_field(basis, 11);
  const SpectralField lu = frac_laplacian(u, FracPower(0.6));
  CHECK(lu.coeffs[0] == 0.0);
  CHECK(mean(lu) == 0.0);
}

TEST_CASE("extension traces back to the field at y = 0", "[fracop]") {
  const SpectralBasis basis(5.0, 16);
  const SpectralField u = random_field(basis, 17);
  for (double x : {0.0, 1.3, 5.0})
    CHECK(std::abs(extend_value(u, x, 0.0) - synthesize(u, x)) < 1e-13);
  CHECK_THROWS_AS(extend_value(u, 1.0, -0.1), InvalidParameter);
}

TEST_CASE("single-mode extension decays like exp(-sqrt(mu) y)", "[fracop]") {
  const SpectralBasis basis(5.0, 8);
  SpectralField u(basis);
  u.coeffs[1] = 1.0;
  const double y = 5.0 / kPi;  // 1 / sqrt(mu_1)
  const double expected = std::sqrt(0.4) * std::exp(-1.0);
  CHECK(std::abs(extend_value(u, 0.0, y) - expected) < 1e-14);
  const double y2 = 2.0 * y;
  CHECK(std::abs(extend_value(u, 0.0, y2) - std::sqrt(0.4) * std::exp(-2.0)) < 1e-14);
}

TEST_CASE("constant fields extend unchanged in y", "[fracop]") {
  const SpectralBasis basis(8.0, 8);
  SpectralField u(basis);
  u.coeffs[0] = 2.0;
  for (double y : {0.0, 1.0, 25.0})
    CHECK(std::abs(extend_value(u, 3.0, y) - 2.0 / std::sqrt(8.0)) < 1e-14);
}

TEST_CASE("energy profile of a single mode", "[fracop]") {
  const SpectralBasis basis(5.0, 8);
  SpectralField u(basis);
  u.coeffs[1] = 0.75;
  const double mu1 = basis.mu(1);
  CHECK(std::abs(energy_profile(u, 0.0) - 2.0 * mu1 * 0.5625) < 1e-14);
  const double y = 1.7;
  const double expected = 2.0 * mu1 * 0.5625 * std::exp(-2.0 * std::sqrt(mu1) * y);
  CHECK(std::abs(energy_profile(u, y) - expected) < 1e-15);
}

TEST_CASE("energy profile obeys the slowest-mode decay bound", "[fracop]") {
  const SpectralBasis basis(5.0, 24);
  const SpectralField u = random_field(basis, 5);
  const double mu1 = basis.mu(1);
  const double e0 = energy_profile(u, 0.0);
  double prev = e0;
  for (int i = 1; i <= 100; ++i) {
    const double y = i * (8.0 / std::sqrt(mu1)) / 100.0;
    const double e = energy_profile(u, y);
    CHECK(e <= prev * (1.0 + 1e-14));
    CHECK(e <= e0 * std::exp(-2.0 * std::sqrt(mu1) * y) * (1.0 + 1e-12));
    prev = e;
  }
}

TEST_CASE("integrated energy profile matches the trace norm", "[fracop]") {
  const SpectralBasis basis(5.0, 12);
  const SpectralField u = random_field(basis, 31);
  double trace_energy = 0.0;
  for (int k = 1; k <= 12; ++k)
    trace_energy += std::sqrt(basis.mu(k)) * u.coeffs[k] * u.coeffs[k];

  // Simpson in y; the tail beyond Y decays like exp(-2 sqrt(mu_1) Y)
  const double Y = 40.0 / std::sqrt(basis.mu(1));
  const int n = 200000;
  const double h = Y / n;
  double integral = energy_profile(u, 0.0) + energy_profile(u, Y);
  for (int i = 1; i < n; ++i) integral += (i % 2 ? 4.0 : 2.0) * energy_profile(u, i * h);
  integral *= h / 3.0;
  CHECK(std::abs(integral - trace_energy) < 1e-9 * std::max(1.0, trace_energy));
}
