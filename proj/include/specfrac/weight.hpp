#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "specfrac/basis.hpp"
#include "specfrac/errors.hpp"

namespace specfrac {

/// Weight of the form  m(x) = offset + sum_j amplitude_j cos(j pi x / L).
/// The harmonic indices are relative to the interval the weight is used on,
/// so the description itself is length-free. Its mean is the offset.
struct Weight {
  struct Harmonic {
    int index;
    double amplitude;
  };

  double offset = 0.0;
  std::vector<Harmonic> harmonics;  // sorted by index, indices unique and >= 1

  double mean() const { return offset; }

  double eval(double x, double L) const {
    double s = offset;
    for (const Harmonic& h : harmonics) s += h.amplitude * std::cos(h.index * kPi * x / L);
    return s;
  }
};

inline Weight make_weight(double offset, std::vector<Weight::Harmonic> harmonics) {
  if (!std::isfinite(offset)) throw InvalidParameter("weight offset must be finite");
  std::sort(harmonics.begin(), harmonics.end(),
            [](const Weight::Harmonic& a, const Weight::Harmonic& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < harmonics.size(); ++i) {
    if (harmonics[i].index < 1) throw InvalidParameter("weight harmonic index must be >= 1");
    if (!std::isfinite(harmonics[i].amplitude))
      throw InvalidParameter("weight harmonic amplitude must be finite");
    if (i > 0 && harmonics[i].index == harmonics[i - 1].index)
      throw InvalidParameter("weight harmonic indices must be unique");
  }
  return Weight{offset, std::move(harmonics)};
}

/// cos(pi x / L) - 1/2
inline Weight weight_m1() { return make_weight(-0.5, {{1, 1.0}}); }

/// cos(2 pi x / L) - 1/2
inline Weight weight_m2() { return make_weight(-0.5, {{2, 1.0}}); }

inline Weight constant_weight(double c) { return make_weight(c, {}); }

inline std::vector<double> eval_on(const Weight& m, const std::vector<double>& xs, double L) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = m.eval(xs[i], L);
  return out;
}

/// sup of max(m, 0) over (0, L), by dense grid scan; exact when the sup sits
/// at an endpoint, otherwise accurate to O((L/n)^2) which is far below the
/// tolerances this bound feeds.
inline double sup_positive_part(const Weight& m, double L, int grid_n = 4096) {
  double best = 0.0;
  for (int i = 0; i <= grid_n; ++i) best = std::max(best, m.eval(L * i / grid_n, L));
  return best;
}

inline bool positive_somewhere(const Weight& m, double L, int grid_n = 4096) {
  for (int i = 0; i <= grid_n; ++i)
    if (m.eval(L * i / grid_n, L) > 0.0) return true;
  return false;
}

}  // namespace specfrac
