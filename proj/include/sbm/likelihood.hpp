#pragma once

// Likelihood of a grid-observed skew Brownian motion as a function of the skewness.
//
// With Delta = T / n, step i contributes the factor 1 + theta * c_i to Z_n(theta), where
//   c_i = sgn(X_{i+1}) * exp(-2 (X_i X_{i+1})^+ / Delta)  in [-1, 1].
// Down-crossings give c_i = -1, up-crossings c_i = +1 and same-sign steps a damped
// weight. Every derivative of the log-likelihood is then a power sum of the c_i:
//   L_n^(k)(theta) = (-1)^(k-1) sum_i (c_i / (1 + theta c_i))^k,
// using the scaled derivatives (1/(k-1)!) d^k/dtheta^k log Z_n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "sbm/core/error.hpp"
#include "sbm/core/special.hpp"
#include "sbm/sim.hpp"

namespace sbm::lik {

/// q_theta(delta, x, y) = p(delta, y - x) + sgn(y) theta p(delta, |x| + |y|).
inline double transition_density(double theta, double delta, double x, double y) {
  return num::normal_pdf(y - x, delta) +
         num::sgn(y) * theta * num::normal_pdf(std::abs(x) + std::abs(y), delta);
}

/// h_k(x, y) = [sgn(x + y) exp(-(2/T) (x (x + y))^+)]^k.
inline double h_k(int k, double x, double y, double T) {
  if (k < 1) throw DomainError("h_k: order must be >= 1");
  if (!(T > 0.0)) throw DomainError("h_k: T must be positive");
  const double base = num::sgn(x + y) * std::exp(-(2.0 / T) * std::max(x * (x + y), 0.0));
  double out = 1.0;
  for (int j = 0; j < k; ++j) out *= base;
  return out;
}

/// Nonzero step weights c_i of a path. Steps whose weight underflows or whose endpoint
/// is exactly zero carry no information and are dropped.
struct StepWeights {
  std::size_t n = 0;
  std::vector<double> c;
};

inline StepWeights step_weights(const sim::GridPath& path) {
  StepWeights w;
  w.n = path.n();
  const double scale = 2.0 / path.delta();
  const auto& v = path.values;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const int s = num::sgn(v[i + 1]);
    if (s == 0) continue;
    const double e = scale * std::max(v[i] * v[i + 1], 0.0);
    if (e > 745.0) continue;
    w.c.push_back(s * std::exp(-e));
  }
  return w;
}

/// L_n^(k)(0) for k = 1..K.
struct DerivativeStack {
  std::size_t n = 0;
  double T = 1.0;
  std::vector<double> L;  // L[k - 1] holds L_n^(k)(0)

  std::size_t K() const { return L.size(); }
  double at(std::size_t k) const { return L.at(k - 1); }
};

inline DerivativeStack derivatives_from_weights(const StepWeights& w, double T, std::size_t K) {
  if (K < 2) throw DomainError("derivative stack needs K >= 2");
  DerivativeStack stack{w.n, T, std::vector<double>(K, 0.0)};
  for (double c : w.c) {
    double power = 1.0;
    for (std::size_t k = 1; k <= K; ++k) {
      power *= c;
      stack.L[k - 1] += power;
    }
  }
  for (std::size_t k = 2; k <= K; k += 2) stack.L[k - 1] = -stack.L[k - 1];
  return stack;
}

/// L_n^(k)(0) = (-1)^(k-1) sum_i h_k(sqrt(n) X_i, sqrt(n) (X_{i+1} - X_i)).
inline DerivativeStack log_likelihood_derivatives(const sim::GridPath& path, std::size_t K = 6) {
  return derivatives_from_weights(step_weights(path), path.params.T, K);
}

/// Same quantities through density ratios, sgn(X_{i+1})^k (p(Delta, |X_i| + |X_{i+1}|) /
/// q_0(Delta, X_i, X_{i+1}))^k, with the ratio taken in log space.
inline DerivativeStack log_likelihood_derivatives_by_ratio(const sim::GridPath& path,
                                                           std::size_t K = 6) {
  if (K < 2) throw DomainError("derivative stack needs K >= 2");
  const double delta = path.delta();
  DerivativeStack stack{path.n(), path.params.T, std::vector<double>(K, 0.0)};
  const auto& v = path.values;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const int s = num::sgn(v[i + 1]);
    if (s == 0) continue;
    const double log_ratio = num::normal_log_pdf(std::abs(v[i]) + std::abs(v[i + 1]), delta) -
                             num::normal_log_pdf(v[i + 1] - v[i], delta);
    for (std::size_t k = 1; k <= K; ++k) {
      const double sign = (k % 2 == 1) ? s : 1.0;
      const double alt = (k % 2 == 1) ? 1.0 : -1.0;
      stack.L[k - 1] += alt * sign * std::exp(static_cast<double>(k) * log_ratio);
    }
  }
  return stack;
}

/// log Z_n(theta) = sum_i log(1 + theta c_i); -inf when a factor vanishes.
inline double log_likelihood_ratio(const StepWeights& w, double theta) {
  if (!(std::abs(theta) <= 1.0)) throw DomainError("likelihood ratio: |theta| > 1");
  double acc = 0.0;
  for (double c : w.c) {
    const double f = 1.0 + theta * c;
    if (f <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log1p(theta * c);
  }
  return acc;
}

inline double log_likelihood_ratio(const sim::GridPath& path, double theta) {
  return log_likelihood_ratio(step_weights(path), theta);
}

/// Z_n(theta), a degree-n polynomial with Z_n(0) = 1.
inline double likelihood_ratio(const sim::GridPath& path, double theta) {
  return std::exp(log_likelihood_ratio(path, theta));
}

/// L_n^(k)(theta) away from the roots of Z_n.
inline double score_derivative(const StepWeights& w, double theta, int k) {
  double acc = 0.0;
  for (double c : w.c) acc += std::pow(c / (1.0 + theta * c), k);
  return (k % 2 == 1) ? acc : -acc;
}

inline double score(const StepWeights& w, double theta) {
  double acc = 0.0;
  for (double c : w.c) acc += c / (1.0 + theta * c);
  return acc;
}

/// alpha_n = -n^(1/4) L^(1)(0) / L^(2)(0); alpha_n / n^(1/4) estimates the skewness.
inline double alpha_n(const DerivativeStack& stack) {
  if (stack.at(2) == 0.0) {
    throw UndefinedEstimator("alpha_n: L^(2)(0) = 0, the path never comes near zero");
  }
  return -std::pow(static_cast<double>(stack.n), 0.25) * stack.at(1) / stack.at(2);
}

/// d^(1..p+1) of the expansion theta_n ~ sum_m d^(m) (alpha_n n^(-1/4))^m, from
///   d^(m+1) = -sum_{k=2}^{m+1} (L^(k+1) / L^(2)) sum_{i_1 + .. + i_k = m+1, 1 <= i_j <= m} d^(i_1)..d^(i_k).
/// The composition sums come from a table P[k][s] over (parts, total). Returned
/// vector index j holds d^(j+1).
inline std::vector<double> expansion_coefficients(const DerivativeStack& stack, std::size_t p) {
  if (stack.K() < p + 2) throw DomainError("expansion_coefficients: need K >= p + 2");
  const double l2 = stack.at(2);
  if (l2 == 0.0) throw UndefinedEstimator("expansion_coefficients: L^(2)(0) = 0");
  const std::size_t top = p + 1;
  std::vector<double> d(top + 1, 0.0);  // 1-based
  d[1] = 1.0;
  for (std::size_t m = 1; m < top; ++m) {
    const std::size_t target = m + 1;
    // compositions[k][s]: sum over ordered k-tuples of parts in [1, m] adding to s.
    std::vector<std::vector<double>> compositions(target + 1, std::vector<double>(target + 1, 0.0));
    for (std::size_t s = 1; s <= m; ++s) compositions[1][s] = d[s];
    for (std::size_t k = 2; k <= target; ++k)
      for (std::size_t s = k; s <= target; ++s)
        for (std::size_t j = 1; j <= std::min(m, s - 1); ++j)
          compositions[k][s] += d[j] * compositions[k - 1][s - j];
    double acc = 0.0;
    for (std::size_t k = 2; k <= target; ++k) acc += stack.at(k + 1) / l2 * compositions[k][target];
    d[target] = -acc;
  }
  return {d.begin() + 1, d.end()};
}

/// Theta_n = sum_{m=1}^{p+1} d^(m) alpha_n^m n^(-m/4).
inline double theta_expansion(const DerivativeStack& stack, std::size_t p) {
  const auto d = expansion_coefficients(stack, p);
  const double u = alpha_n(stack) / std::pow(static_cast<double>(stack.n), 0.25);
  double out = 0.0, power = 1.0;
  for (double dm : d) {
    power *= u;
    out += dm * power;
  }
  return out;
}

/// log Z_n(theta / n^(1/4)).
inline double contrast_log(const sim::GridPath& path, double theta) {
  const double arg = theta / std::pow(static_cast<double>(path.n()), 0.25);
  if (!(std::abs(arg) < 1.0)) throw DomainError("contrast_log: theta / n^(1/4) outside (-1, 1)");
  return log_likelihood_ratio(path, arg);
}

}  // namespace sbm::lik
