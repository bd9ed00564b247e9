#pragma once

// Kolmogorov-Smirnov statistics with asymptotic p-values.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "sbm/core/error.hpp"

namespace sbm::stats {

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
  double n_eff = 0.0;
};

/// P(K > lambda) for the Kolmogorov distribution, 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)
/// with 100 terms. Below lambda = 0.3 that alternating series is slow, and the
/// equivalent theta-function form 1 - sqrt(2 pi)/lambda sum_{j odd} exp(-j^2 pi^2 / (8 lambda^2))
/// is used instead.
inline double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double p = 0.0;
  if (lambda < 0.3) {
    double cdf = 0.0;
    for (int j = 1; j <= 199; j += 2)
      cdf += std::exp(-j * j * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * cdf;
  } else {
    for (int j = 1; j <= 100; ++j)
      p += (j % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * j * j * lambda * lambda);
  }
  return std::clamp(p, 0.0, 1.0);
}

template <class Cdf>
KsResult ks_one_sample(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d), n};
}

/// One-sample test against a CDF that is already tabulated at the sorted sample.
inline KsResult ks_one_sample_sorted(std::span<const double> sorted_cdf_values) {
  if (sorted_cdf_values.empty()) throw DomainError("ks_one_sample: empty sample");
  const double n = static_cast<double>(sorted_cdf_values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_cdf_values.size(); ++i) {
    const double f = sorted_cdf_values[i];
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d), n};
}

inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double n_eff = n * m / (n + m);
  return {d, kolmogorov_sf(std::sqrt(n_eff) * d), n_eff};
}

}  // namespace sbm::stats
