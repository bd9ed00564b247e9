#pragma once

// Gaussian density, distribution function and a log-space upper tail.

#include <cmath>
#include <numbers>

#include "sbm/core/error.hpp"

namespace sbm::num {

/// Density of N(0, variance) at x.
inline double normal_pdf(double x, double variance) {
  if (!(variance > 0.0)) throw DomainError("normal_pdf: variance must be positive");
  return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

inline double normal_log_pdf(double x, double variance) {
  if (!(variance > 0.0)) throw DomainError("normal_log_pdf: variance must be positive");
  return -0.5 * x * x / variance - 0.5 * std::log(2.0 * std::numbers::pi * variance);
}

/// Standard normal distribution function.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace detail {

// Mills ratio R(x) = (1 - Phi(x)) / phi(x) by its continued fraction,
// R = 1/(x+ 1/(x+ 2/(x+ 3/(x+ ...)))), evaluated bottom-up. Only used for x >= 30,
// where 60 levels are far past convergence.
inline double mills_ratio_cf(double x) {
  double tail = x;
  for (int k = 60; k >= 1; --k) tail = x + k / tail;
  return 1.0 / tail;
}

}  // namespace detail

/// log(1 - Phi(x)); finite for all x a double can hold without underflowing Phi(-x).
inline double log_normal_sf(double x) {
  constexpr double kSwitch = 30.0;
  if (x < 0.0) return std::log1p(-0.5 * std::erfc(-x / std::numbers::sqrt2));
  if (x < kSwitch) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  const double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
  return log_phi + std::log(detail::mills_ratio_cf(x));
}

inline int sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace sbm::num
