#pragma once

// Semi-infinite integrals with a caller-supplied Gaussian/exponential decay bound.
//
// The integral over [0, inf) is truncated at X_max, chosen so the certified tail is
// below QuadOptions::tail_tol, and the finite part is done by adaptive Gauss-Kronrod.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "sbm/core/error.hpp"
#include "sbm/core/special.hpp"

namespace sbm::num {

struct QuadResult {
  double value = 0.0;
  double abs_error_bound = 0.0;  // quadrature estimate + truncated tail + rounding
  std::size_t evaluations = 0;
};

/// |f(x)| <= amplitude * exp(-gauss_rate * x^2 - exp_rate * x) for every x >= 0.
struct DecayCertificate {
  double amplitude = 1.0;
  double gauss_rate = 0.0;
  double exp_rate = 0.0;
};

enum class IntegrandForm { linear, log };

struct QuadOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-12;
  double tail_tol = 1e-13;
  unsigned max_depth = 22;
};

namespace detail {

// Tail mass beyond x under the certificate. For convex g = a x^2 + b x with g'(x) > 0,
// exp(-g) lies below its tangent-line exponential, giving exp(-g(x)) / g'(x).
inline double certified_tail(const DecayCertificate& c, double x) {
  const double slope = 2.0 * c.gauss_rate * x + c.exp_rate;
  return c.amplitude * std::exp(-c.gauss_rate * x * x - c.exp_rate * x) / slope;
}

}  // namespace detail

/// Smallest cutoff (on a geometric grid) whose certified tail is below tail_tol.
inline double truncation_point(const DecayCertificate& cert, double tail_tol) {
  if (!(cert.gauss_rate > 0.0) && !(cert.exp_rate > 0.0)) {
    throw DivergenceError("integrate_semi_infinite: integrand has no certified decay");
  }
  if (cert.gauss_rate < 0.0 || cert.exp_rate < 0.0 || !(cert.amplitude >= 0.0)) {
    throw DomainError("integrate_semi_infinite: malformed decay certificate");
  }
  double x = 1.0;
  while (detail::certified_tail(cert, x) > tail_tol) {
    x *= 1.05;
    if (!std::isfinite(x)) throw DivergenceError("integrate_semi_infinite: no finite cutoff");
  }
  return x;
}

/// Integral of f over [0, inf). With IntegrandForm::log, f returns log of the (positive)
/// integrand and the certificate still bounds the integrand itself.
template <class F>
QuadResult integrate_semi_infinite(F&& f, const DecayCertificate& cert,
                                   IntegrandForm form = IntegrandForm::linear,
                                   const QuadOptions& opts = {}) {
  const double x_max = truncation_point(cert, opts.tail_tol);
  std::size_t evaluations = 0;
  auto integrand = [&](double x) {
    ++evaluations;
    const double v = f(x);
    return form == IntegrandForm::log ? std::exp(v) : v;
  };

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double quad_error = 0.0;
  double l1 = 0.0;
  const double value = GK::integrate(integrand, 0.0, x_max, opts.max_depth, opts.rel_tol,
                                     &quad_error, &l1);
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  const double bound = quad_error + detail::certified_tail(cert, x_max) + rounding;

  if (!std::isfinite(value) || bound > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
    throw AccuracyError("integrate_semi_infinite: requested accuracy not reached (error bound " +
                            std::to_string(bound) + ")",
                        value, bound);
  }
  return {value, bound, evaluations};
}

/// Integral of exp(c x^2) * Phi(-x) over [0, inf), evaluated as exp(c x^2 + log(1 - Phi(x))).
/// Requires c < 1/2.
inline QuadResult integrate_gaussian_tail_product(double c, const QuadOptions& opts = {}) {
  if (!(c < 0.5)) throw DivergenceError("exp(c x^2) Phi(-x) is not integrable for c >= 1/2");
  // Phi(-x) <= exp(-x^2/2) / 2 for x >= 0.
  const DecayCertificate cert{0.5, 0.5 - c, 0.0};
  return integrate_semi_infinite([c](double x) { return c * x * x + log_normal_sf(x); }, cert,
                                 IntegrandForm::log, opts);
}

}  // namespace sbm::num
