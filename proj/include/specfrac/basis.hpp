#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "specfrac/errors.hpp"

namespace specfrac {

inline constexpr double kPi = 3.14159265358979323846;

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) s += weights[q] * f(nodes[q]);
    return s;
  }
};

/// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on the
/// Legendre recurrence (nodes are symmetric, only half are computed).
inline void gauss_legendre_reference(int order, std::vector<double>& x, std::vector<double>& w) {
  if (order < 1) throw InvalidParameter("quadrature order must be >= 1");
  x.assign(order, 0.0);
  w.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[order - 1 - i] = w[i];
  }
}

/// Composite Gauss-Legendre rule on [a,b] with `panels` equal panels.
inline QuadratureRule gauss_legendre_panels(double a, double b, int order, int panels) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidParameter("quadrature interval must be finite with b > a");
  if (panels < 1) throw InvalidParameter("quadrature panel count must be >= 1");
  std::vector<double> xr, wr;
  gauss_legendre_reference(order, xr, wr);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(order) * panels);
  rule.weights.reserve(static_cast<std::size_t>(order) * panels);
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * hp;
    for (int q = 0; q < order; ++q) {
      rule.nodes.push_back(left + 0.5 * hp * (xr[q] + 1.0));
      rule.weights.push_back(0.5 * hp * wr[q]);
    }
  }
  return rule;
}

/// Truncated Neumann cosine basis on (0, L).
///
/// Mode k has eigenvalue mu_k = (k pi / L)^2; mode 0 is the constant 1/sqrt(L)
/// and modes k >= 1 are sqrt(2/L) cos(k pi x / L). The basis owns a composite
/// Gauss-Legendre rule sized so that products of two modes (and a smooth
/// weight) integrate to near machine precision, plus a table of mode values at
/// the quadrature nodes. Immutable after construction.
class SpectralBasis {
 public:
  SpectralBasis(double L, int K, int quad_order = 8, int quad_panels = 0)
      : L_(L), K_(K), quad_order_(quad_order) {
    if (!(L > 0.0) || !std::isfinite(L)) throw InvalidParameter("interval length must be positive and finite");
    if (K < 1) throw InvalidParameter("mode cutoff K must be >= 1");
    if (quad_order < 2) throw InvalidParameter("quadrature order must be >= 2");
    quad_panels_ = quad_panels > 0 ? quad_panels : std::max(32, 2 * K);
    quad_ = gauss_legendre_panels(0.0, L, quad_order_, quad_panels_);
    const std::size_t nq = quad_.nodes.size();
    mode_table_.assign(static_cast<std::size_t>(K_ + 1) * nq, 0.0);
    for (int k = 0; k <= K_; ++k)
      for (std::size_t q = 0; q < nq; ++q)
        mode_table_[k * nq + q] = eval_mode(k, quad_.nodes[q]);
  }

  double length() const { return L_; }
  int modes() const { return K_; }
  int quad_order() const { return quad_order_; }
  int quad_panels() const { return quad_panels_; }
  const QuadratureRule& quadrature() const { return quad_; }

  /// Neumann eigenvalue of mode k.
  double mu(int k) const {
    check_mode(k);
    return (k * kPi / L_) * (k * kPi / L_);
  }

  double eval_mode(int k, double x) const {
    check_mode(k);
    if (k == 0) return 1.0 / std::sqrt(L_);
    return std::sqrt(2.0 / L_) * std::cos(k * kPi * x / L_);
  }

  /// Cached value of mode k at quadrature node q.
  double mode_at_node(int k, std::size_t q) const {
    return mode_table_[static_cast<std::size_t>(k) * quad_.nodes.size() + q];
  }

 private:
  void check_mode(int k) const {
    if (k < 0 || k > K_) throw InvalidParameter("mode index out of range");
  }

  double L_;
  int K_;
  int quad_order_;
  int quad_panels_;
  QuadratureRule quad_;
  std::vector<double> mode_table_;
};

/// Coefficients of a field in a SpectralBasis. Non-owning basis pointer: the
/// basis must outlive every field built on it.
struct SpectralField {
  const SpectralBasis* basis = nullptr;
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(const SpectralBasis& b)
      : basis(&b), coeffs(static_cast<std::size_t>(b.modes()) + 1, 0.0) {}
};

/// Projects a callable onto the basis with the basis quadrature.
inline SpectralField project(const SpectralBasis& basis, const std::function<double(double)>& f) {
  SpectralField u(basis);
  const QuadratureRule& quad = basis.quadrature();
  const std::size_t nq = quad.nodes.size();
  std::vector<double> fw(nq);
  for (std::size_t q = 0; q < nq; ++q) fw[q] = quad.weights[q] * f(quad.nodes[q]);
  for (int k = 0; k <= basis.modes(); ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < nq; ++q) s += fw[q] * basis.mode_at_node(k, q);
    u.coeffs[k] = s;
  }
  return u;
}

/// Projects samples already taken at the basis quadrature nodes.
inline SpectralField project_samples(const SpectralBasis& basis, const std::vector<double>& values) {
  const QuadratureRule& quad = basis.quadrature();
  if (values.size() != quad.nodes.size())
    throw InvalidParameter("project_samples: values must match the quadrature nodes");
  SpectralField u(basis);
  for (int k = 0; k <= basis.modes(); ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < values.size(); ++q)
      s += quad.weights[q] * values[q] * basis.mode_at_node(k, q);
    u.coeffs[k] = s;
  }
  return u;
}

inline double synthesize(const SpectralField& u, double x) {
  double s = 0.0;
  for (int k = 0; k <= u.basis->modes(); ++k) s += u.coeffs[k] * u.basis->eval_mode(k, x);
  return s;
}

inline std::vector<double> synthesize(const SpectralField& u, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = synthesize(u, xs[i]);
  return out;
}

/// Mean over (0, L); only the constant mode contributes.
inline double mean(const SpectralField& u) {
  return u.coeffs[0] / std::sqrt(u.basis->length());
}

/// n-point uniform grid on [0, L] including both endpoints.
inline std::vector<double> uniform_grid(double L, int n) {
  if (n < 2) throw InvalidParameter("uniform_grid needs at least 2 points");
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = L * i / (n - 1);
  return xs;
}

}  // namespace specfrac
