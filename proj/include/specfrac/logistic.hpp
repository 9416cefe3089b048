#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "specfrac/basis.hpp"
#include "specfrac/dense.hpp"
#include "specfrac/errors.hpp"
#include "specfrac/weight.hpp"
#include "specfrac/weighted_eigen.hpp"

namespace specfrac {

/// Steady state candidate u = h + sum_{k>=1} tilde_k phi_k at parameter lambda.
/// tilde has the same indexing as the basis; slot 0 stays zero.
struct LogisticState {
  double lambda = 0.0;
  double h = 0.0;
  std::vector<double> tilde;

  LogisticState() = default;
  LogisticState(const SpectralBasis& basis, double lam, double h0)
      : lambda(lam), h(h0), tilde(static_cast<std::size_t>(basis.modes()) + 1, 0.0) {}

  SpectralField to_field(const SpectralBasis& basis) const {
    SpectralField f(basis);
    f.coeffs = tilde;
    f.coeffs[0] = h * std::sqrt(basis.length());
    return f;
  }
};

struct LogisticOptions {
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  int newton_max_halvings = 20;
  double positivity_rel_tol = 1e-10;  // min u > -tol * sup|u|
  double bound_slack = 1e-8;          // sup u <= sup m^+ + slack
  double mass_tol = 1e-10;            // |int u(m-u)|
  double residual_tol = 1e-10;
  double takeoff_delta = 1e-3;        // branch start at lambda1 * (1 + delta)
  double step_cap = 0.5;
  int step_grow_after = 3;            // double the step after this many accepts
  int stall_halvings = 10;            // step halvings before giving up
  int check_grid = 1024;
};

/// Zero-mean part of the equation and the mass constraint, stacked as
///   r[0] = int u (m - u)
///   r[k] = -sqrt(mu_k) tilde_k + lambda int u (m - u) phi_k,  k >= 1.
inline std::vector<double> logistic_residual(const SpectralBasis& basis, const Weight& m,
                                             const LogisticState& st) {
  const int K = basis.modes();
  const QuadratureRule& quad = basis.quadrature();
  const std::size_t nq = quad.nodes.size();
  std::vector<double> r(K + 1, 0.0);
  std::vector<double> fw(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    double u = st.h;
    for (int k = 1; k <= K; ++k) u += st.tilde[k] * basis.mode_at_node(k, q);
    const double mv = m.eval(quad.nodes[q], basis.length());
    fw[q] = quad.weights[q] * u * (mv - u);
    r[0] += fw[q];
  }
  for (int k = 1; k <= K; ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < nq; ++q) s += fw[q] * basis.mode_at_node(k, q);
    r[k] = -std::sqrt(basis.mu(k)) * st.tilde[k] + st.lambda * s;
  }
  return r;
}

/// Derivative of logistic_residual in (h, tilde_1..tilde_K); column 0 is h.
inline Matrix logistic_jacobian(const SpectralBasis& basis, const Weight& m,
                                const LogisticState& st) {
  const int K = basis.modes();
  const QuadratureRule& quad = basis.quadrature();
  const std::size_t nq = quad.nodes.size();
  std::vector<double> g(nq);  // quadrature weight times (m - 2u)
  for (std::size_t q = 0; q < nq; ++q) {
    double u = st.h;
    for (int k = 1; k <= K; ++k) u += st.tilde[k] * basis.mode_at_node(k, q);
    g[q] = quad.weights[q] * (m.eval(quad.nodes[q], basis.length()) - 2.0 * u);
  }
  Matrix jac(K + 1, K + 1);
  std::vector<double> gphi(static_cast<std::size_t>(K + 1), 0.0);
  for (int k = 1; k <= K; ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < nq; ++q) s += g[q] * basis.mode_at_node(k, q);
    gphi[k] = s;
  }
  double g0 = 0.0;
  for (std::size_t q = 0; q < nq; ++q) g0 += g[q];
  jac(0, 0) = g0;
  for (int j = 1; j <= K; ++j) jac(0, j) = gphi[j];
  for (int k = 1; k <= K; ++k) {
    jac(k, 0) = st.lambda * gphi[k];
    for (int j = 1; j <= K; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < nq; ++q)
        s += g[q] * basis.mode_at_node(k, q) * basis.mode_at_node(j, q);
      jac(k, j) = st.lambda * s;
    }
    jac(k, k) -= std::sqrt(basis.mu(k));
  }
  return jac;
}

struct NewtonResult {
  LogisticState state;
  int iterations = 0;
};

/// Damped Newton on the stacked system; a step is accepted only if it reduces
/// the residual sup-norm.
inline NewtonResult newton_solve(const SpectralBasis& basis, const Weight& m,
                                 LogisticState init, const LogisticOptions& opts = {}) {
  const int K = basis.modes();
  if (static_cast<int>(init.tilde.size()) != K + 1)
    throw InvalidParameter("newton_solve: state size does not match basis");
  LogisticState st = std::move(init);
  std::vector<double> r = logistic_residual(basis, m, st);
  double rn = sup_norm(r);
  for (int iter = 0; iter <= opts.newton_max_iter; ++iter) {
    if (rn <= opts.newton_tol) return NewtonResult{std::move(st), iter};
    if (iter == opts.newton_max_iter) break;
    Matrix jac = logistic_jacobian(basis, m, st);
    std::vector<double> rhs(r);
    for (double& v : rhs) v = -v;
    const std::vector<double> dx = lu_solve(std::move(jac), std::move(rhs));
    double alpha = 1.0;
    bool accepted = false;
    for (int halve = 0; halve <= opts.newton_max_halvings; ++halve) {
      LogisticState trial = st;
      trial.h += alpha * dx[0];
      for (int k = 1; k <= K; ++k) trial.tilde[k] += alpha * dx[k];
      std::vector<double> rt = logistic_residual(basis, m, trial);
      const double rtn = sup_norm(rt);
      if (rtn < rn) {
        st = std::move(trial);
        r = std::move(rt);
        rn = rtn;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw NoConvergence("newton_solve: step halving failed to reduce the residual");
  }
  throw NoConvergence("newton_solve: iteration limit reached");
}

/// Diagnostics for a candidate steady state; purely observational.
struct SolutionCheck {
  double min_u = 0.0;
  double sup_u = 0.0;
  double mass_residual = 0.0;
  double residual_norm = 0.0;
  bool positive = false;
  bool bounded = false;
  bool mass_ok = false;
  bool residual_ok = false;
  bool admissible = false;
};

inline SolutionCheck check_solution(const SpectralBasis& basis, const Weight& m,
                                    const LogisticState& st, const LogisticOptions& opts = {}) {
  SolutionCheck c;
  const SpectralField f = st.to_field(basis);
  const std::vector<double> xs = uniform_grid(basis.length(), opts.check_grid);
  double lo = synthesize(f, xs[0]), hi = lo;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double v = synthesize(f, xs[i]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  c.min_u = lo;
  c.sup_u = hi;
  const std::vector<double> r = logistic_residual(basis, m, st);
  c.mass_residual = std::abs(r[0]);
  c.residual_norm = sup_norm(r);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  c.positive = lo > -opts.positivity_rel_tol * scale;
  c.bounded = hi <= sup_positive_part(m, basis.length()) + opts.bound_slack;
  c.mass_ok = c.mass_residual <= opts.mass_tol;
  c.residual_ok = c.residual_norm <= opts.residual_tol;
  c.admissible = c.positive && c.bounded && c.mass_ok && c.residual_ok;
  return c;
}

struct TakeoffResult {
  LogisticState state;
  double lambda1 = 0.0;
  int iterations = 0;
};

namespace detail {

inline double state_sup(const SpectralBasis& basis, const LogisticState& st, int grid_n) {
  const SpectralField f = st.to_field(basis);
  double s = 0.0;
  for (double x : uniform_grid(basis.length(), grid_n)) s = std::max(s, std::abs(synthesize(f, x)));
  return s;
}

/// Principal eigenpair at s = 1/2 plus the cubic term of the bifurcation
/// expansion; enough to predict the branch state at any nearby lambda.
struct TakeoffSeed {
  EigenPair eig;
  double cube = 0.0;  // int phi1^3
};

inline TakeoffSeed takeoff_seed(const SpectralBasis& basis, const Weight& m) {
  TakeoffSeed seed;
  seed.eig = smallest_positive_eigen(basis, m, FracPower(0.5));
  const QuadratureRule& quad = basis.quadrature();
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double v = synthesize(seed.eig.field, quad.nodes[q]);
    seed.cube += quad.weights[q] * v * v * v;
  }
  return seed;
}

/// t times the principal eigenfunction, packaged as a state at lambda.
inline LogisticState seeded_state(const SpectralBasis& basis, const TakeoffSeed& seed,
                                  double lambda, double t) {
  LogisticState init(basis, lambda, t * mean(seed.eig.field));
  for (int k = 1; k <= basis.modes(); ++k) init.tilde[k] = t * seed.eig.field.coeffs[k];
  return init;
}

inline TakeoffResult takeoff_from_seed(const SpectralBasis& basis, const Weight& m,
                                       const TakeoffSeed& seed, double delta,
                                       const LogisticOptions& opts) {
  const double lambda_start = seed.eig.lambda * (1.0 + delta);
  // first-order branch amplitude; the flat floor only backs up a degenerate
  // cube (it badly overshoots when the normalized eigenfunction is large)
  double t = seed.cube > 1e-12 ? delta / seed.cube
                               : 1e-3 * sup_positive_part(m, basis.length());
  for (int attempt = 0; attempt < 10; ++attempt) {
    try {
      NewtonResult res =
          newton_solve(basis, m, seeded_state(basis, seed, lambda_start, t), opts);
      const double sup = state_sup(basis, res.state, opts.check_grid);
      if (sup > 1e-3 * t && check_solution(basis, m, res.state, opts).positive)
        return TakeoffResult{std::move(res.state), seed.eig.lambda, res.iterations};
    } catch (const NoConvergence&) {
    } catch (const SingularSystem&) {
    }
    t *= 2.0;
  }
  throw NoConvergence("takeoff_state: could not leave the trivial branch");
}

}  // namespace detail

/// First point of the nontrivial branch that bifurcates from the principal
/// eigenvalue: Newton-corrects lambda = lambda1 (1 + delta) starting from a
/// multiple of the principal eigenfunction. The initial amplitude comes from
/// the first-order expansion of the branch (amplitude ~ delta / int phi1^3),
/// with a flat 1e-3 sup m^+ standing in when that expansion degenerates; if
/// Newton collapses onto the trivial state the amplitude is doubled and the
/// correction retried.
inline TakeoffResult takeoff_state(const SpectralBasis& basis, const Weight& m, double delta,
                                   const LogisticOptions& opts = {}) {
  if (!(delta > 0.0)) throw InvalidParameter("takeoff_state: delta must be positive");
  if (!positive_somewhere(m, basis.length()))
    throw NoPositiveSolution("takeoff_state: weight is nonpositive, only the trivial state exists");
  return detail::takeoff_from_seed(basis, m, detail::takeoff_seed(basis, m), delta, opts);
}

struct BranchPoint {
  LogisticState state;
  SolutionCheck check;
  int newton_iters = 0;
};

struct Branch {
  int regime = 0;          // 1: mean < 0, 2: mean > 0, 3: zero mean
  double lambda1 = 0.0;    // bifurcation point when regime 1 (perturbed value when regime 3)
  std::vector<BranchPoint> points;
};

namespace detail {

/// Natural-parameter continuation from the last recorded point up to
/// lambda_max. Steps halve on failure (stall after too many) and double after
/// a run of accepts, capped. When a takeoff seed is supplied, a failed step is
/// retried once from the first-order branch state at the trial parameter
/// before shrinking: close to a small bifurcation point the previous point is
/// a poor guide (any admissible step multiplies the amplitude many times over)
/// while the expansion still lands in the Newton basin.
inline void march_branch(const SpectralBasis& basis, const Weight& m, Branch& branch,
                         double lambda_max, double step0, const LogisticOptions& opts,
                         const TakeoffSeed* seed = nullptr) {
  double step = std::min(step0, opts.step_cap);
  int accepts_in_a_row = 0;
  int halvings = 0;
  auto try_point = [&](LogisticState init) -> bool {
    try {
      NewtonResult res = newton_solve(basis, m, std::move(init), opts);
      SolutionCheck chk = check_solution(basis, m, res.state, opts);
      if (!chk.admissible) return false;
      branch.points.push_back(BranchPoint{std::move(res.state), chk, res.iterations});
      return true;
    } catch (const NoConvergence&) {
    } catch (const SingularSystem&) {
    }
    return false;
  };
  while (branch.points.back().state.lambda < lambda_max * (1.0 - 1e-14)) {
    const LogisticState& prev = branch.points.back().state;
    const double trial_lambda = std::min(prev.lambda + step, lambda_max);
    LogisticState init = prev;
    init.lambda = trial_lambda;
    bool ok = try_point(std::move(init));
    if (!ok && seed && seed->cube > 1e-12 && trial_lambda > seed->eig.lambda)
      ok = try_point(seeded_state(basis, *seed, trial_lambda,
                                  (trial_lambda / seed->eig.lambda - 1.0) / seed->cube));
    if (ok) {
      halvings = 0;
      if (++accepts_in_a_row >= opts.step_grow_after) {
        step = std::min(step * 2.0, opts.step_cap);
        accepts_in_a_row = 0;
      }
    } else {
      accepts_in_a_row = 0;
      if (++halvings > opts.stall_halvings)
        throw BranchStall("branch continuation stalled at lambda = " +
                              std::to_string(branch.points.back().state.lambda),
                          branch.points.back().state.lambda);
      step *= 0.5;
    }
  }
}

}  // namespace detail

/// Positive steady-state branch against lambda, up to lambda_max. The start
/// point depends on the sign of the weight mean:
///   mean < 0: bifurcation from the principal eigenvalue (requires m^+ != 0),
///   mean > 0: near-constant state h = mean(m) at small lambda,
///   mean = 0: branch of the shifted weight m - 1/n, n doubled until its
///             principal eigenvalue is negligible, then each point is
///             re-corrected with the unshifted weight.
inline Branch branch_continue(const SpectralBasis& basis, const Weight& m, double lambda_max,
                              const LogisticOptions& opts = {}) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    throw InvalidParameter("branch_continue: lambda_max must be positive and finite");
  Branch branch;
  const double mbar = m.mean();
  if (mbar < 0.0) {
    branch.regime = 1;
    if (!positive_somewhere(m, basis.length()))
      throw NoPositiveSolution("branch_continue: weight is nonpositive everywhere");
    const detail::TakeoffSeed seed = detail::takeoff_seed(basis, m);
    TakeoffResult take = detail::takeoff_from_seed(basis, m, seed, opts.takeoff_delta, opts);
    branch.lambda1 = take.lambda1;
    if (lambda_max <= take.state.lambda)
      throw NoPositiveSolution("branch_continue: lambda_max does not exceed the bifurcation point");
    branch.points.push_back(BranchPoint{take.state, check_solution(basis, m, take.state, opts),
                                        take.iterations});
    detail::march_branch(basis, m, branch, lambda_max,
                         0.05 * std::max(branch.lambda1, 1.0), opts, &seed);
    return branch;
  }
  if (mbar > 0.0) {
    branch.regime = 2;
    const double lambda_start = std::min(1e-3, lambda_max);
    NewtonResult res = newton_solve(basis, m, LogisticState(basis, lambda_start, mbar), opts);
    SolutionCheck chk = check_solution(basis, m, res.state, opts);
    branch.points.push_back(BranchPoint{std::move(res.state), chk, res.iterations});
    detail::march_branch(basis, m, branch, lambda_max, 0.05, opts);
    return branch;
  }

  branch.regime = 3;
  Weight shifted = m;
  detail::TakeoffSeed seed;
  bool found = false;
  for (long n = 8; n <= (1L << 24); n *= 2) {
    shifted.offset = m.offset - 1.0 / static_cast<double>(n);
    seed = detail::takeoff_seed(basis, shifted);
    if (seed.eig.lambda < 1e-3) {
      found = true;
      break;
    }
  }
  if (!found) throw NoConvergence("branch_continue: shifted principal eigenvalue did not vanish");
  branch.lambda1 = seed.eig.lambda;

  Branch scaffold;
  scaffold.regime = 1;
  TakeoffResult take = detail::takeoff_from_seed(basis, shifted, seed, opts.takeoff_delta, opts);
  if (lambda_max <= take.state.lambda)
    throw NoPositiveSolution("branch_continue: lambda_max does not exceed the start point");
  scaffold.lambda1 = take.lambda1;
  scaffold.points.push_back(BranchPoint{take.state, check_solution(basis, shifted, take.state, opts),
                                        take.iterations});
  detail::march_branch(basis, shifted, scaffold, lambda_max,
                       0.05 * std::max(scaffold.lambda1, 1.0), opts, &seed);

  // Correct the scaffold with the exact weight, sweeping from the largest
  // lambda down: near the shifted bifurcation point the scaffold states are
  // far smaller than the exact ones (the offset is no small perturbation
  // there), but the already-corrected right neighbor is a workable guess.
  std::vector<BranchPoint> corrected(scaffold.points.size());
  const LogisticState* warm = nullptr;
  for (std::size_t i = scaffold.points.size(); i-- > 0;) {
    const double lambda_i = scaffold.points[i].state.lambda;
    LogisticState init = std::move(scaffold.points[i].state);
    bool done = false;
    for (int use_warm = 0; use_warm < 2 && !done; ++use_warm) {
      if (use_warm) {
        if (!warm) break;
        init = *warm;
        init.lambda = lambda_i;
      }
      try {
        NewtonResult res = newton_solve(basis, m, std::move(init), opts);
        SolutionCheck chk = check_solution(basis, m, res.state, opts);
        if (chk.admissible) {
          corrected[i] = BranchPoint{std::move(res.state), chk, res.iterations};
          done = true;
        }
      } catch (const NoConvergence&) {
      } catch (const SingularSystem&) {
      }
    }
    if (!done)
      throw NoConvergence("branch_continue: exact-weight correction failed at lambda = " +
                          std::to_string(lambda_i));
    warm = &corrected[i].state;
  }
  for (BranchPoint& pt : corrected) branch.points.push_back(std::move(pt));
  return branch;
}

}  // namespace specfrac
