#pragma once

// Limit constants mu_k of the scaled score derivatives, and the mixed-normal limit
// Upsilon = W(l_1) / l_1 of n^(1/4) theta_n (x = 0, T = 1).
//
// l_1 has the law of sup_{[0,1]} B, i.e. |N(0,1)|, and Upsilon | l_1 = y ~ N(0, 1/y):
//   f(x) = int_0^inf sqrt(y / 2 pi) exp(-x^2 y / 2) f_l(y) dy,  f_l(y) = sqrt(2/pi) exp(-y^2/2).
// Var(Upsilon) = E[1 / l_1] is infinite; distributional comparisons use the CDF.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sbm/core/error.hpp"
#include "sbm/core/quadrature.hpp"
#include "sbm/core/random.hpp"
#include "sbm/core/special.hpp"

namespace sbm::limit {

struct MuValue {
  double value = 0.0;
  double err = 0.0;
};

/// Exponent coefficient c and prefactor 1/m in mu_k = sign * 2 int [1 + exp(c x^2) / m] Phi(-x) dx.
struct MuShape {
  double sign;
  double coefficient;
  double divisor;
};

inline MuShape mu_shape(int k) {
  if (k < 1) throw DomainError("mu_k: k must be >= 1");
  const double kk = k;
  if (k % 2 == 0) return {-1.0, 2.0 * kk * (kk - 1.0) / ((2.0 * kk - 1.0) * (2.0 * kk - 1.0)), 2.0 * kk - 1.0};
  // Odd k: the constant of h_k^2 = h_{2k}.
  return {1.0, 4.0 * kk * (2.0 * kk - 1.0) / ((4.0 * kk - 1.0) * (4.0 * kk - 1.0)), 4.0 * kk - 1.0};
}

inline MuValue mu_constant(int k, const num::QuadOptions& opts = {}) {
  const MuShape s = mu_shape(k);
  // int_0^inf Phi(-x) dx = E[N^+] = 1 / sqrt(2 pi)
  const double base = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const num::QuadResult q = num::integrate_gaussian_tail_product(s.coefficient, opts);
  return {s.sign * 2.0 * (base + q.value / s.divisor), 2.0 * q.abs_error_bound / s.divisor};
}

struct MuTable {
  std::vector<double> mu;   // mu[k - 1]
  std::vector<double> err;

  std::size_t K() const { return mu.size(); }
};

inline MuTable mu_table(int K) {
  MuTable t;
  for (int k = 1; k <= K; ++k) {
    const MuValue m = mu_constant(k);
    t.mu.push_back(m.value);
    t.err.push_back(m.err);
  }
  return t;
}

struct UpsilonSample {
  double value = 0.0;  // Upsilon
  double h = 0.0;      // local-time surrogate H
};

/// H = (U + sqrt(V + U^2)) / 2 with U ~ N(0,1), V ~ Exp(1/2); Upsilon = Z / sqrt(H).
inline UpsilonSample draw_upsilon(num::RngStream& rng) {
  const double u = num::draw_gaussian(rng);
  const double v = num::draw_exponential(rng, 0.5);
  const double root = std::sqrt(v + u * u);
  // For U < 0 the sum cancels; use the conjugate form.
  const double h = u >= 0.0 ? 0.5 * (u + root) : 0.5 * v / (root - u);
  const double z = num::draw_gaussian(rng);
  return {z / std::sqrt(h), h};
}

inline double local_time_density(double y) {
  return y > 0.0 ? std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * y * y) : 0.0;
}

inline num::QuadOptions upsilon_quad_options() {
  num::QuadOptions o;
  o.abs_tol = 1e-11;
  o.rel_tol = 1e-12;
  return o;
}

/// Density of Upsilon. With y = (t/m)^2, m = max(1, |x|):
///   f(x) = 2 / (pi m^3) int_0^inf t^2 exp(-(x/m)^2 t^2 / 2 - t^4 / (2 m^4)) dt.
inline double upsilon_density(double x) {
  const double m = std::max(1.0, std::abs(x));
  const double r2 = (x / m) * (x / m);
  const double m4 = m * m * m * m;
  // The integrand is below 2 exp(-t^2 / 4) in both regimes (|x| >= 1 and |x| < 1).
  const num::DecayCertificate cert{2.0, 0.25, 0.0};
  auto g = [=](double t) {
    const double t2 = t * t;
    return t2 * std::exp(-0.5 * r2 * t2 - 0.5 * t2 * t2 / m4);
  };
  const auto q = num::integrate_semi_infinite(g, cert, num::IntegrandForm::linear, upsilon_quad_options());
  return 2.0 / (std::numbers::pi * m * m * m) * q.value;
}

/// P(Upsilon > x) for x >= 0: int_0^inf f_l(y) Phi(-x sqrt(y)) dy, taken with y = s^2.
inline double upsilon_upper_tail(double x) {
  const num::DecayCertificate cert{0.8, 0.5, 0.0};
  auto g = [=](double s) {
    return 2.0 * s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * s * s * s * s) *
           num::normal_cdf(-x * s);
  };
  return num::integrate_semi_infinite(g, cert, num::IntegrandForm::linear, upsilon_quad_options()).value;
}

/// F(x) = int_{-inf}^x f, written as 1/2 + int_0^x f and exchanged with the y-integral.
inline double upsilon_cdf(double x) {
  if (x == 0.0) return 0.5;
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  const double tail = upsilon_upper_tail(std::abs(x));
  return x > 0.0 ? 1.0 - tail : tail;
}

/// Inverse of upsilon_cdf by bisection, to 1e-10 in x.
inline double upsilon_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("upsilon_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -upsilon_quantile(1.0 - p);
  double lo = 0.0, hi = 1.0;
  while (upsilon_cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (upsilon_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sbm::limit
