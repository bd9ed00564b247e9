#pragma once

// Small descriptive statistics and least squares.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "sbm/core/error.hpp"

namespace sbm::num {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased sample variance (divisor n - 1).
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("sample_variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double sample_std(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

/// Linear-interpolation quantile of an already sorted sample (the usual "type 7").
inline double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> xs, double p) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, p);
}

/// Moment skewness m3 / m2^(3/2).
inline double skewness(std::span<const double> xs) {
  const double m = mean(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(xs.size());
  m3 /= static_cast<double>(xs.size());
  return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. A constant y is a perfect fit (r2 = 1).
inline OlsFit ols_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DomainError("ols_slope: need two equally long samples of size >= 2");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("ols_slope: abscissae are all equal");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

/// Slope of log(values) against log(ns): the exponent of a power law values ~ C n^slope.
inline OlsFit power_law_fit(std::span<const double> ns, std::span<const double> values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0) || !(values.size() > i && values[i] > 0.0)) {
      throw DomainError("power_law_fit: needs positive abscissae and values");
    }
    lx.push_back(std::log(ns[i]));
    ly.push_back(std::log(values[i]));
  }
  return ols_slope(lx, ly);
}

}  // namespace sbm::num
