#pragma once

// Exact grid simulation of the skew Brownian motion X_t = x + B_t + theta * l_t.
//
// One step from x >= 0 over a time delta: propose y = x + sqrt(delta) G. A Brownian
// bridge from x > 0 to y > 0 touches zero with probability exp(-2 x y / delta); a
// proposal y <= 0 has touched it for sure. A path that touched zero picks the sign
// of its final excursion, + with probability (1 + theta) / 2, and keeps |y|. The
// resulting law has density p(delta, y - x) + sgn(y) theta p(delta, |x| + |y|).
// Negative starting points use the mirror image (x, theta) -> (-x, -theta).

#include <cmath>
#include <cstddef>
#include <vector>

#include "sbm/core/error.hpp"
#include "sbm/core/random.hpp"

namespace sbm::sim {

struct SbmParams {
  double theta = 0.0;  // skewness, |theta| <= 1
  double x0 = 0.0;     // initial condition, >= 0
  double T = 1.0;      // horizon
  std::size_t n = 1;   // grid steps

  double delta() const { return T / static_cast<double>(n); }

  void validate() const {
    if (!(std::abs(theta) <= 1.0)) throw DomainError("skewness must lie in [-1, 1]");
    if (!(x0 >= 0.0)) throw DomainError("initial condition must be >= 0 (mirror the path otherwise)");
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be positive");
    if (n < 1) throw DomainError("grid needs at least one step");
  }
};

struct GridPath {
  SbmParams params;
  std::vector<double> values;  // X_0 .. X_n at times i T / n
  bool crossed = false;        // some X_i < 0 for i >= 1

  std::size_t n() const { return values.size() - 1; }
  double delta() const { return params.T / static_cast<double>(n()); }
};

/// Strict-inequality crossing indicator over X_1 .. X_n.
inline bool path_crossed(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < 0.0) return true;
  return false;
}

namespace detail {

// Above this exponent exp(-e) is below the smallest uniform the stream can produce.
inline constexpr double kNoTouchExponent = 38.0;

inline double transition_nonneg(double x, double theta, double sqrt_delta, double inv_delta,
                                num::RngStream& rng) {
  const double y = x + sqrt_delta * num::draw_gaussian(rng);
  bool touched = y <= 0.0;
  if (!touched) {
    const double e = 2.0 * x * y * inv_delta;
    touched = e < kNoTouchExponent && rng.uniform() < std::exp(-e);
  }
  if (!touched) return y;
  const double r = std::abs(y);
  return rng.uniform() < 0.5 * (1.0 + theta) ? r : -r;
}

inline double transition_unchecked(double x, double theta, double sqrt_delta, double inv_delta,
                                   num::RngStream& rng) {
  if (x >= 0.0) return transition_nonneg(x, theta, sqrt_delta, inv_delta, rng);
  return -transition_nonneg(-x, -theta, sqrt_delta, inv_delta, rng);
}

}  // namespace detail

/// One exact draw from the transition density q_theta(delta, x, .).
inline double sbm_transition(double x, double theta, double delta, num::RngStream& rng) {
  if (!(std::abs(theta) <= 1.0)) throw DomainError("sbm_transition: |theta| > 1");
  if (!(delta > 0.0)) throw DomainError("sbm_transition: delta must be positive");
  return detail::transition_unchecked(x, theta, std::sqrt(delta), 1.0 / delta, rng);
}

inline GridPath simulate_path(const SbmParams& params, num::RngStream& rng) {
  params.validate();
  GridPath path;
  path.params = params;
  path.values.resize(params.n + 1);
  path.values[0] = params.x0;
  const double sqrt_delta = std::sqrt(params.delta());
  const double inv_delta = 1.0 / params.delta();
  double x = params.x0;
  for (std::size_t i = 1; i <= params.n; ++i) {
    x = detail::transition_unchecked(x, params.theta, sqrt_delta, inv_delta, rng);
    path.values[i] = x;
  }
  path.crossed = path_crossed(path.values);
  return path;
}

/// Builds a GridPath from observed values on a uniform grid over [0, T].
inline GridPath make_path(std::vector<double> values, double T, double theta = 0.0) {
  if (values.size() < 2) throw DomainError("a path needs at least two grid values");
  GridPath path;
  path.params = {theta, values.front(), T, values.size() - 1};
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  path.crossed = path_crossed(values);
  path.values = std::move(values);
  return path;
}

/// Occupation-time estimate of the local time at zero over [0, T]:
/// sqrt(delta) / 2 * #{i < n : |X_i| <= sqrt(delta)}. The band (-eps, eps) with
/// eps = sqrt(delta) has width 2 eps, hence the factor 1/2.
inline double local_time_proxy(const GridPath& path) {
  const double band = std::sqrt(path.delta());
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i)
    if (std::abs(path.values[i]) <= band) ++count;
  return 0.5 * band * static_cast<double>(count);
}

}  // namespace sbm::sim
