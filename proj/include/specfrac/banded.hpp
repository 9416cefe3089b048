#pragma once

#include <cmath>
#include <vector>

#include "specfrac/errors.hpp"

namespace specfrac {

/// Symmetric positive definite banded matrix with in-place Cholesky
/// factorization. Only the lower band is stored: entry (i, j) with
/// 0 <= i - j <= bandwidth lives at data[(i - j) * n + j].
class BandedSPD {
 public:
  BandedSPD(int n, int bandwidth)
      : n_(n), bw_(bandwidth), a_(static_cast<std::size_t>(bandwidth + 1) * n, 0.0) {
    if (n < 1 || bandwidth < 0 || bandwidth >= n) throw InvalidParameter("BandedSPD: bad shape");
  }

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  double& at(int i, int j) {
    if (i < j) std::swap(i, j);
    if (i - j > bw_) throw InvalidParameter("BandedSPD: entry outside the band");
    return a_[static_cast<std::size_t>(i - j) * n_ + j];
  }

  /// Overwrites the band with the Cholesky factor L (A = L L^T).
  void factor() {
    for (int j = 0; j < n_; ++j) {
      double d = el(j, j);
      const int k0 = std::max(0, j - bw_);
      for (int k = k0; k < j; ++k) d -= el(j, k) * el(j, k);
      if (!(d > 0.0)) throw SingularSystem("BandedSPD: matrix is not positive definite");
      const double lj = std::sqrt(d);
      el(j, j) = lj;
      const int imax = std::min(n_ - 1, j + bw_);
      for (int i = j + 1; i <= imax; ++i) {
        double s = el(i, j);
        const int kk0 = std::max(0, i - bw_);
        for (int k = kk0; k < j; ++k) s -= el(i, k) * el(j, k);
        el(i, j) = s / lj;
      }
    }
    factored_ = true;
  }

  /// Solves A x = b in place (factor() must have run).
  void solve(std::vector<double>& b) const {
    if (!factored_) throw InvalidParameter("BandedSPD: solve before factor");
    for (int i = 0; i < n_; ++i) {
      double s = b[i];
      const int k0 = std::max(0, i - bw_);
      for (int k = k0; k < i; ++k) s -= cel(i, k) * b[k];
      b[i] = s / cel(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double s = b[i];
      const int kmax = std::min(n_ - 1, i + bw_);
      for (int k = i + 1; k <= kmax; ++k) s -= cel(k, i) * b[k];
      b[i] = s / cel(i, i);
    }
  }

 private:
  double& el(int i, int j) { return a_[static_cast<std::size_t>(i - j) * n_ + j]; }
  double cel(int i, int j) const { return a_[static_cast<std::size_t>(i - j) * n_ + j]; }

  int n_, bw_;
  bool factored_ = false;
  std::vector<double> a_;
};

}  // namespace specfrac
