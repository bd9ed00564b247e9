#pragma once

// Maximum likelihood estimate of the skewness and the companion estimators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sbm/likelihood.hpp"

namespace sbm::lik {

struct EstimateReport {
  double theta_mle = 0.0;
  double alpha_scaled = std::numeric_limits<double>::quiet_NaN();  // alpha_n / n^(1/4)
  double alpha_n = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> expansion;  // d^(2) .. d^(p+1)
  double theta_expansion = std::numeric_limits<double>::quiet_NaN();
  bool crossed = false;
  bool boundary = false;
  int solver_iters = 0;
  double score_residual = 0.0;
};

struct MleOptions {
  std::size_t K = 6;
  std::size_t p = 4;
  double score_tol = 1e-10;  // absolute; never looser than 1e-10 * n
  int max_iters = 200;
};

struct RootResult {
  double theta = 0.0;
  double residual = 0.0;
  int iters = 0;
};

/// Root of the strictly decreasing score on (-1, 1), bracketed by the endpoints.
/// Newton steps that leave the current bracket, or fail to halve the residual, are
/// replaced by bisection.
inline RootResult solve_score(const StepWeights& w, double start, const MleOptions& opts) {
  double lo = -1.0, hi = 1.0;
  double theta = std::clamp(start, -0.99, 0.99);
  double f = score(w, theta);
  int it = 0;
  for (; it < opts.max_iters && std::abs(f) > opts.score_tol; ++it) {
    if (f > 0.0) lo = theta; else hi = theta;
    const double df = score_derivative(w, theta, 2);
    double next = df < 0.0 ? theta - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    double f_next = score(w, next);
    if (std::abs(f_next) > 0.5 * std::abs(f) && next != 0.5 * (lo + hi)) {
      // Slow Newton progress: take the bisection point instead if it is better.
      const double mid = 0.5 * (lo + hi);
      const double f_mid = score(w, mid);
      if (std::abs(f_mid) < std::abs(f_next)) {
        next = mid;
        f_next = f_mid;
      }
    }
    if (next == theta) break;
    theta = next;
    f = f_next;
  }
  return {theta, f, it};
}

inline EstimateReport mle(const sim::GridPath& path, const MleOptions& opts = {}) {
  const StepWeights w = step_weights(path);
  const DerivativeStack stack = derivatives_from_weights(w, path.params.T, opts.K);
  EstimateReport r;
  r.crossed = path.crossed;
  const double quarter = std::pow(static_cast<double>(w.n), 0.25);
  if (stack.at(2) != 0.0) {
    r.alpha_n = alpha_n(stack);
    r.alpha_scaled = r.alpha_n / quarter;
    const auto d = expansion_coefficients(stack, opts.p);
    r.expansion.assign(d.begin() + 1, d.end());
    r.theta_expansion = theta_expansion(stack, opts.p);
  }

  // The score decreases strictly, so its one-sided limits at +-1 decide whether the
  // maximum of Z_n sits at an endpoint.
  double at_plus = 0.0, at_minus = 0.0;
  for (double c : w.c) {
    at_plus += c == -1.0 ? -std::numeric_limits<double>::infinity() : c / (1.0 + c);
    at_minus += c == 1.0 ? std::numeric_limits<double>::infinity() : c / (1.0 - c);
  }
  if (at_plus >= 0.0) {
    r.theta_mle = 1.0;
    r.boundary = true;
    r.score_residual = at_plus;
    return r;
  }
  if (at_minus <= 0.0) {
    r.theta_mle = -1.0;
    r.boundary = true;
    r.score_residual = at_minus;
    return r;
  }
  MleOptions o = opts;
  o.score_tol = std::min(opts.score_tol, 1e-10 * static_cast<double>(w.n));
  const RootResult root = solve_score(w, std::isfinite(r.alpha_scaled) ? r.alpha_scaled : 0.0, o);
  r.theta_mle = root.theta;
  r.score_residual = root.residual;
  r.solver_iters = root.iters;
  return r;
}

}  // namespace sbm::lik
