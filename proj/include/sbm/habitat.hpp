#pragma once

// Diffusion across the boundary of two habitats with diffusivities a_+ on [0, inf) and
// a_- on (-inf, 0). Under Phi(x) = x / sqrt(a(x)) both candidate generators,
// L = (1/2) d/dx (a d/dx) and A = (a/2) d^2/dx^2, become skew Brownian motions whose
// skewness (sqrt(a_+) - sqrt(a_-)) / (sqrt(a_+) + sqrt(a_-)) has opposite signs.

#include <cmath>
#include <cstddef>
#include <string>

#include "sbm/core/error.hpp"
#include "sbm/core/random.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"

namespace sbm::habitat {

enum class Generator { L, A };

inline const char* to_string(Generator g) { return g == Generator::L ? "L" : "A"; }

inline Generator parse_generator(const std::string& s) {
  if (s == "L") return Generator::L;
  if (s == "A") return Generator::A;
  throw DomainError("generator must be L or A, got '" + s + "'");
}

struct HabitatModel {
  double a_plus = 1.0;
  double a_minus = 1.0;
  Generator generator = Generator::L;

  void validate() const {
    if (!(a_plus > 0.0) || !(a_minus > 0.0)) throw DomainError("diffusivities must be positive");
  }

  /// Skewness of Phi(X).
  double skewness() const {
    const double s = (std::sqrt(a_plus) - std::sqrt(a_minus)) / (std::sqrt(a_plus) + std::sqrt(a_minus));
    return generator == Generator::L ? s : -s;
  }
};

/// Phi with piecewise-constant diffusivity; continuous at 0 and strictly increasing.
inline double phi(double x, double a_plus, double a_minus) {
  return x >= 0.0 ? x / std::sqrt(a_plus) : x / std::sqrt(a_minus);
}

inline double phi_inverse(double z, double a_plus, double a_minus) {
  return z >= 0.0 ? z * std::sqrt(a_plus) : z * std::sqrt(a_minus);
}

/// Simulates the SBM Phi(X) exactly and maps it back through Phi^-1. The returned
/// path records the SBM skewness in params.theta.
inline sim::GridPath simulate_habitat(const HabitatModel& model, double x0, double T, std::size_t n,
                                      num::RngStream& rng) {
  model.validate();
  const sim::SbmParams params{model.skewness(), phi(x0, model.a_plus, model.a_minus), T, n};
  sim::GridPath path = sim::simulate_path(params, rng);
  for (double& v : path.values) v = phi_inverse(v, model.a_plus, model.a_minus);
  path.params.x0 = path.values.front();
  return path;
}

struct SideEstimate {
  double value = 0.0;       // realized variance per unit time
  std::size_t steps = 0;    // same-side steps used
  bool sufficient = false;  // at least kMinSideSteps steps

  double standard_error() const { return value * std::sqrt(2.0 / static_cast<double>(steps)); }
};

inline constexpr std::size_t kMinSideSteps = 10;

struct DiffusivityEstimate {
  SideEstimate plus;
  SideEstimate minus;
};

/// Realized quadratic variation over steps that stay strictly on one side of zero.
inline DiffusivityEstimate estimate_diffusivities(const sim::GridPath& path) {
  const double delta = path.delta();
  double ss_plus = 0.0, ss_minus = 0.0;
  std::size_t n_plus = 0, n_minus = 0;
  const auto& v = path.values;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double d = v[i + 1] - v[i];
    if (v[i] > 0.0 && v[i + 1] > 0.0) {
      ss_plus += d * d;
      ++n_plus;
    } else if (v[i] < 0.0 && v[i + 1] < 0.0) {
      ss_minus += d * d;
      ++n_minus;
    }
  }
  auto side = [delta](double ss, std::size_t count) {
    SideEstimate s;
    s.steps = count;
    s.sufficient = count >= kMinSideSteps;
    s.value = count > 0 ? ss / (delta * static_cast<double>(count)) : 0.0;
    return s;
  };
  return {side(ss_plus, n_plus), side(ss_minus, n_minus)};
}

struct HabitatDecision {
  double a_plus_hat = 0.0;
  double a_minus_hat = 0.0;
  double theta_hat = 0.0;  // MLE skewness of Phi(X)
  double alpha_scaled = 0.0;
  bool boundary = false;
  Generator decided = Generator::A;
  bool indeterminate = false;  // |a_+ - a_-| below two pooled standard errors
  double diffusivity_gap_se = 0.0;  // (a_+ - a_-) / pooled standard error
};

/// Decides L when sign(theta_n of Phi(X)) agrees with sign(a_+ - a_-), A otherwise.
inline HabitatDecision decide_generator(const sim::GridPath& path) {
  const DiffusivityEstimate est = estimate_diffusivities(path);
  if (!est.plus.sufficient) throw InsufficientData("habitat: too few steps on the positive side");
  if (!est.minus.sufficient) throw InsufficientData("habitat: too few steps on the negative side");
  HabitatDecision out;
  out.a_plus_hat = est.plus.value;
  out.a_minus_hat = est.minus.value;

  std::vector<double> transformed(path.values);
  for (double& v : transformed) v = phi(v, out.a_plus_hat, out.a_minus_hat);
  const sim::GridPath phi_path = sim::make_path(std::move(transformed), path.params.T);
  lik::MleOptions opts;
  opts.K = 3;
  opts.p = 1;
  const lik::EstimateReport r = lik::mle(phi_path, opts);
  out.theta_hat = r.theta_mle;
  out.alpha_scaled = r.alpha_scaled;
  out.boundary = r.boundary;

  const double gap = out.a_plus_hat - out.a_minus_hat;
  const double pooled = std::hypot(est.plus.standard_error(), est.minus.standard_error());
  out.diffusivity_gap_se = gap / pooled;
  out.indeterminate = std::abs(gap) < 2.0 * pooled || out.theta_hat == 0.0;
  out.decided = (out.theta_hat > 0.0) == (gap > 0.0) ? Generator::L : Generator::A;
  return out;
}

}  // namespace sbm::habitat
