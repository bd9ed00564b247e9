#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "sbm/core/random.hpp"
#include "sbm/core/stats.hpp"
#include "sbm/likelihood.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"

using namespace sbm;

namespace {

sim::GridPath sample_path(double theta, std::size_t n, std::uint64_t seed, std::uint64_t id = 0, double x0 = 0.0) {
  num::RngStream rng(seed, id);
  return sim::simulate_path({theta, x0, 1.0, n}, rng);
}

lik::DerivativeStack stack_of(std::vector<double> L, std::size_t n = 100) { return {n, 1.0, std::move(L)}; }

// Naive recursive enumeration of compositions of `total` into parts from [1, max_part].
void compositions(int total, int max_part, std::vector<int>& prefix, const std::function<void(const std::vector<int>&)>& f) {
  if (total == 0) {
    f(prefix);
    return;
  }
  for (int part = 1; part <= std::min(total, max_part); ++part) {
    prefix.push_back(part);
    compositions(total - part, max_part, prefix, f);
    prefix.pop_back();
  }
}

std::vector<double> brute_force_expansion(const lik::DerivativeStack& s, int p) {
  std::vector<double> d(p + 2, 0.0);
  d[1] = 1.0;
  for (int m = 1; m <= p; ++m) {
    double acc = 0.0;
    std::vector<int> prefix;
    compositions(m + 1, m, prefix, [&](const std::vector<int>& parts) {
      double prod = 1.0;
      for (int i : parts) prod *= d[i];
      acc += s.at(parts.size() + 1) / s.at(2) * prod;
    });
    d[m + 1] = -acc;
  }
  return {d.begin() + 1, d.end()};
}

// Truncated power-series product.
std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

TEST(TransitionDensity, Examples) {
  EXPECT_DOUBLE_EQ(lik::transition_density(0.0, 0.7, 0.2, -0.4), num::normal_pdf(-0.6, 0.7));
  EXPECT_NEAR(lik::transition_density(1.0, 0.5, 1.0, -1.0), 0.0, 1e-18);
  EXPECT_NEAR(lik::transition_density(0.5, 1.0, 0.0, 1.0), 1.5 * std::exp(-0.5) / std::sqrt(2 * std::numbers::pi), 1e-16);
  EXPECT_NEAR(lik::transition_density(0.5, 1.0, 0.0, 1.0), 0.362956, 1e-6);
}

TEST(StepFunctionH, Examples) {
  EXPECT_DOUBLE_EQ(lik::h_k(1, 1.0, -3.0, 1.0), -1.0);
  EXPECT_NEAR(lik::h_k(1, 1.0, 1.0, 1.0), std::exp(-4.0), 1e-17);
  EXPECT_NEAR(lik::h_k(1, 1.0, 1.0, 1.0), 0.0183156, 1e-7);
  num::RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const double x = num::draw_gaussian(rng), y = num::draw_gaussian(rng);
    EXPECT_DOUBLE_EQ(lik::h_k(2, x, y, 1.3), std::pow(lik::h_k(1, x, y, 1.3), 2));
    EXPECT_LE(std::abs(lik::h_k(3, x, y, 1.3)), 1.0);
  }
  EXPECT_THROW(lik::h_k(0, 1.0, 1.0, 1.0), DomainError);
}

TEST(Derivatives, HSumDefinition) {
  const auto path = sample_path(0.3, 500, 2);
  const auto stack = lik::log_likelihood_derivatives(path, 5);
  const double rn = std::sqrt(500.0);
  for (int k = 1; k <= 5; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 500; ++i)
      acc += lik::h_k(k, rn * path.values[i], rn * (path.values[i + 1] - path.values[i]), 1.0);
    EXPECT_NEAR(stack.at(k), (k % 2 ? 1.0 : -1.0) * acc, 1e-12 * std::max(1.0, std::abs(acc)));
  }
}

TEST(Derivatives, TwoRoutesAgree) {
  for (double theta : {-0.7, 0.0, 0.4, 1.0})
    for (std::uint64_t id = 0; id < 5; ++id) {
      const auto path = sample_path(theta, 2000, 3, id, id % 2 ? 0.2 : 0.0);
      const auto a = lik::log_likelihood_derivatives(path, 6);
      const auto b = lik::log_likelihood_derivatives_by_ratio(path, 6);
      for (int k = 1; k <= 6; ++k) {
        const double scale = std::max({std::abs(a.at(k)), std::abs(b.at(k)), 1e-300});
        // Sums of order-one terms: compare relative to the sum of magnitudes.
        double mag = 0.0;
        for (double c : lik::step_weights(path).c) mag += std::pow(std::abs(c), k);
        EXPECT_LE(std::abs(a.at(k) - b.at(k)), 1e-12 * std::max(scale, mag)) << "k=" << k;
      }
    }
}

TEST(Derivatives, ExponentialKillOnFarPaths) {
  std::vector<double> v(51);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 5.0 + 0.01 * static_cast<double>(i % 3);
  const auto s = lik::log_likelihood_derivatives(sim::make_path(v, 1.0), 4);
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(s.at(k), 0.0);
  EXPECT_THROW(lik::alpha_n(s), UndefinedEstimator);
}

TEST(Derivatives, HandEvaluatedPaths) {
  const double r = 1.0 / std::sqrt(2.0);
  const auto s = lik::log_likelihood_derivatives(sim::make_path({r, -r, r}, 1.0), 3);
  EXPECT_DOUBLE_EQ(s.at(1), 0.0);
  EXPECT_DOUBLE_EQ(lik::alpha_n(s), 0.0);

  const auto one = lik::log_likelihood_derivatives(sim::make_path({0.5, -0.5}, 1.0), 2);
  EXPECT_DOUBLE_EQ(one.at(1), -1.0);
  EXPECT_DOUBLE_EQ(one.at(2), -1.0);
  EXPECT_DOUBLE_EQ(lik::alpha_n(one), -1.0);
}

TEST(Derivatives, BoundsAndSignPattern) {
  for (std::uint64_t id = 0; id < 20; ++id) {
    const auto path = sample_path(0.0, 300, 4, id);
    const auto s = lik::log_likelihood_derivatives(path, 6);
    for (int k = 1; k <= 6; ++k) EXPECT_LE(std::abs(s.at(k)), 300.0);
    EXPECT_LE(s.at(2), 0.0);
  }
  const auto pos = sample_path(1.0, 300, 4, 99, 0.1);
  ASSERT_FALSE(pos.crossed);
  const auto s = lik::log_likelihood_derivatives(pos, 6);
  for (int k = 1; k <= 6; ++k) EXPECT_GE((k % 2 ? 1.0 : -1.0) * s.at(k), 0.0);
}

TEST(Derivatives, SecondDerivativeScalesWithLocalTime) {
  // E[L^(2)(0) / sqrt(n)] -> mu_2 E[local time] = mu_2 sqrt(2 / pi).
  const double mu2 = -1.29514635781341347157;
  std::vector<double> v;
  for (std::uint64_t id = 0; id < 500; ++id)
    v.push_back(lik::log_likelihood_derivatives(sample_path(0.0, 100000, 5, id), 2).at(2) / std::sqrt(1e5));
  const double se = num::sample_std(v) / std::sqrt(500.0);
  EXPECT_NEAR(num::mean(v), mu2 * std::sqrt(2.0 / std::numbers::pi), 3.0 * se);
}

TEST(LikelihoodRatio, BasicProperties) {
  for (std::uint64_t id = 0; id < 10; ++id) {
    const auto path = sample_path(0.2, 200, 6, id);
    EXPECT_DOUBLE_EQ(lik::likelihood_ratio(path, 0.0), 1.0);
    for (double t : {-0.9, -0.3, 0.5, 0.95}) EXPECT_GT(lik::likelihood_ratio(path, t), 0.0);
  }
  const auto pos = sample_path(1.0, 200, 6, 50, 0.2);
  double prev = -1.0;
  for (double t = -1.0; t <= 1.0; t += 0.05) {
    const double z = lik::likelihood_ratio(pos, t);
    EXPECT_GE(z, prev);
    prev = z;
  }
  const auto both = sim::make_path({0.1, -0.2, 0.3, 0.2}, 1.0);
  EXPECT_EQ(lik::likelihood_ratio(both, 1.0), 0.0);
  EXPECT_EQ(lik::likelihood_ratio(both, -1.0), 0.0);
  EXPECT_THROW(lik::likelihood_ratio(both, 1.1), DomainError);
}

TEST(LikelihoodRatio, FourFactorProduct) {
  const auto path = sample_path(0.1, 50, 7, 0, 0.05);
  const double delta = path.delta();
  for (double t : {-0.6, 0.25, 0.8}) {
    double prod = 1.0;
    for (std::size_t i = 0; i < 50; ++i) {
      const double a = path.values[i], b = path.values[i + 1];
      if (a >= 0 && b < 0) prod *= 1.0 - t;
      else if (a < 0 && b > 0) prod *= 1.0 + t;
      else prod *= 1.0 + num::sgn(b) * t * std::exp(-2.0 * a * b / delta);
    }
    EXPECT_NEAR(lik::likelihood_ratio(path, t), prod, 1e-12 * prod);
  }
}

TEST(Expansion, LowOrderClosedForms) {
  const auto s = stack_of({0.3, -2.0, 0.5, -0.7, 0.2, -0.1});
  const auto d = lik::expansion_coefficients(s, 4);
  ASSERT_EQ(d.size(), 5u);
  EXPECT_DOUBLE_EQ(d[0], 1.0);
  const double d2 = -0.5 / -2.0;
  EXPECT_DOUBLE_EQ(d[1], d2);
  EXPECT_NEAR(d[2], -(-0.7 / -2.0) - (0.5 / -2.0) * 2.0 * d2, 1e-15);
}

TEST(Expansion, MatchesNaiveCompositionEnumeration) {
  num::RngStream rng(8, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> L(8);
    for (auto& l : L) l = num::draw_gaussian(rng);
    L[1] = -std::abs(L[1]) - 0.1;
    const auto s = stack_of(L);
    const auto dp = lik::expansion_coefficients(s, 6);
    const auto naive = brute_force_expansion(s, 6);
    for (std::size_t j = 0; j < dp.size(); ++j) EXPECT_NEAR(dp[j], naive[j], 1e-12 * std::max(1.0, std::abs(naive[j])));
  }
}

TEST(Expansion, InvertsTheScoreSeries) {
  // score(theta) = sum_k L[k+1] theta^k; substituting theta(u) = sum_m d_m u^m with
  // u = -L1/L2 must cancel every coefficient up to u^(p+1).
  num::RngStream rng(9, 0);
  const std::size_t p = 5;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> L(p + 2);
    for (auto& l : L) l = num::draw_gaussian(rng);
    L[1] = -std::abs(L[1]) - 0.5;
    const auto s = stack_of(L);
    const auto d = lik::expansion_coefficients(s, p);
    std::vector<double> theta(p + 2, 0.0);
    for (std::size_t m = 1; m <= p + 1; ++m) theta[m] = d[m - 1];
    std::vector<double> series(p + 2, 0.0), power(p + 2, 0.0);
    power[0] = 1.0;
    series[1] = -L[1];  // L1 = -L2 u
    for (std::size_t k = 1; k <= p + 1; ++k) {
      power = mul(power, theta);
      for (std::size_t j = 0; j < series.size(); ++j) series[j] += L[k] * power[j];
    }
    for (std::size_t j = 1; j <= p + 1; ++j) EXPECT_NEAR(series[j], 0.0, 1e-10) << "u^" << j;
  }
}

TEST(Expansion, VanishingHigherDerivatives) {
  const auto d = lik::expansion_coefficients(stack_of({0.4, -1.3, 0.0, 0.0, 0.0}), 3);
  EXPECT_EQ(d[0], 1.0);
  for (std::size_t j = 1; j < d.size(); ++j) EXPECT_EQ(d[j], 0.0);
  EXPECT_THROW(lik::expansion_coefficients(stack_of({0.4, -1.3, 0.1}), 2), DomainError);
  EXPECT_THROW(lik::expansion_coefficients(stack_of({0.4, 0.0, 0.1}), 1), UndefinedEstimator);
}

TEST(Expansion, OrderZeroIsAlphaScaled) {
  const auto path = sample_path(0.0, 1000, 10, 3);
  const auto s = lik::log_likelihood_derivatives(path, 6);
  EXPECT_DOUBLE_EQ(lik::theta_expansion(s, 0), lik::alpha_n(s) / std::pow(1000.0, 0.25));
}

TEST(Expansion, FullThirdOrderImprovesMedianError) {
  // d^(2) u^2 and d^(3) u^3 are both of order n^(-3/4), so only the pair beats p = 0;
  // each further pair of terms gains another factor of roughly n^(-1/4).
  std::vector<double> e0, e1, e2, e4;
  for (std::uint64_t id = 0; id < 300; ++id) {
    const auto path = sample_path(0.0, 10000, 11, id);
    const auto r = lik::mle(path);
    if (r.boundary || !std::isfinite(r.alpha_n)) continue;
    const auto s = lik::log_likelihood_derivatives(path, 6);
    e0.push_back(std::abs(r.theta_mle - lik::theta_expansion(s, 0)));
    e1.push_back(std::abs(r.theta_mle - lik::theta_expansion(s, 1)));
    e2.push_back(std::abs(r.theta_mle - lik::theta_expansion(s, 2)));
    e4.push_back(std::abs(r.theta_mle - lik::theta_expansion(s, 4)));
  }
  const double m0 = num::quantile(e0, 0.5), m1 = num::quantile(e1, 0.5);
  const double m2 = num::quantile(e2, 0.5), m4 = num::quantile(e4, 0.5);
  EXPECT_LT(m2, m0 / 10.0);
  EXPECT_LT(m2, m1 / 10.0);
  EXPECT_LT(m4, m2);
}

TEST(Mle, ClosedFormTwoFactorCases) {
  // Z = (1 + theta)(1 - theta): maximum at 0.
  const auto flat = lik::mle(sim::make_path({0.0, 0.5, -0.5}, 2.0));
  EXPECT_NEAR(flat.theta_mle, 0.0, 1e-12);
  EXPECT_FALSE(flat.boundary);
  // Z = (1 + theta e^-2)(1 - theta): stationary point below -1, so the maximum is at -1.
  const auto edge = lik::mle(sim::make_path({1.0, 1.0, -1.0}, 2.0));
  EXPECT_EQ(edge.theta_mle, -1.0);
  EXPECT_TRUE(edge.boundary);
  double best = -2.0, best_z = -1.0;
  for (double t = -1.0; t <= 1.0; t += 1e-4) {
    const double z = (1.0 + t * std::exp(-2.0)) * (1.0 - t);
    if (z > best_z) best_z = z, best = t;
  }
  EXPECT_NEAR(best, -1.0, 1e-9);
}

TEST(Mle, NoCrossingPathGivesBoundaryOne) {
  const auto path = sample_path(1.0, 1000, 12, 0, 0.5);
  ASSERT_FALSE(path.crossed);
  const auto r = lik::mle(path);
  EXPECT_EQ(r.theta_mle, 1.0);
  EXPECT_TRUE(r.boundary);
  EXPECT_FALSE(r.crossed);
}

TEST(Mle, ScoreResidualAndConcavity) {
  for (std::uint64_t id = 0; id < 200; ++id) {
    const double theta = -0.9 + 0.009 * static_cast<double>(id);
    const std::size_t n = 50 + 20 * id;
    const auto path = sample_path(theta, n, 13, id);
    const auto r = lik::mle(path);
    ASSERT_GE(r.theta_mle, -1.0);
    ASSERT_LE(r.theta_mle, 1.0);
    if (r.boundary) continue;
    EXPECT_LE(std::abs(r.score_residual), 1e-10);
    const auto w = lik::step_weights(path);
    EXPECT_LT(lik::score_derivative(w, r.theta_mle, 2), 0.0);
    EXPECT_LE(r.solver_iters, 200);
  }
}

TEST(Mle, MatchesGridSearchOnShortPaths) {
  for (std::uint64_t id = 0; id < 50; ++id) {
    const auto path = sample_path(0.0, 3, 14, id);
    const auto w = lik::step_weights(path);
    double best = 0.0, best_ll = -INFINITY;
    for (long j = -1000000; j <= 1000000; ++j) {
      const double t = static_cast<double>(j) * 1e-6;
      const double ll = lik::log_likelihood_ratio(w, t);
      if (ll > best_ll) best_ll = ll, best = t;
    }
    EXPECT_NEAR(lik::mle(path).theta_mle, best, 1e-4) << "path " << id;
  }
}

TEST(TaylorControl, RemainderBound) {
  const auto path = sample_path(0.0, 2000, 15, 0);
  const auto w = lik::step_weights(path);
  const auto s = lik::log_likelihood_derivatives(path, 8);
  for (double t : {-0.5, -0.2, 0.1, 0.5})
    for (int m = 0; m <= 5; ++m) {
      double poly = 0.0;
      for (int k = 0; k <= m; ++k) poly += s.at(k + 1) * std::pow(t, k);
      const double bound = 2000.0 / std::pow(1.0 - std::abs(t), m + 2) * std::pow(std::abs(t), m + 1);
      EXPECT_LE(std::abs(lik::score(w, t) - poly), bound);
    }
}

TEST(Contrast, MatchesTaylorSeries) {
  const auto path = sample_path(0.0, 10000, 16, 1);
  EXPECT_EQ(lik::contrast_log(path, 0.0), 0.0);
  // log Z_n(t) = sum_k L[k] t^k / k, and |L[k]| <= n, so 14 terms leave < 1e4 * 0.05^15.
  const auto s = lik::log_likelihood_derivatives(path, 14);
  const double q = std::pow(10000.0, 0.25);
  for (double th : {-0.5, -0.2, 0.1, 0.4}) {
    double series = 0.0;
    for (std::size_t k = 1; k <= 14; ++k) series += s.at(k) * std::pow(th / q, double(k)) / double(k);
    EXPECT_NEAR(lik::contrast_log(path, th), series, 1e-9) << "theta=" << th;
  }
  // Near zero the remainder after the quadratic is the cubic term.
  const double th = 0.002;
  const double rem = lik::contrast_log(path, th) - (th / q * s.at(1) + 0.5 * th * th / (q * q) * s.at(2));
  EXPECT_NEAR(rem / (s.at(3) * std::pow(th / q, 3.0) / 3.0), 1.0, 0.05);
  // Concave around zero.
  EXPECT_LT(lik::contrast_log(path, 0.5) + lik::contrast_log(path, -0.5), 0.0);
  EXPECT_THROW(lik::contrast_log(path, q), DomainError);
}

TEST(Alpha, UndefinedWhenSecondDerivativeVanishes) {
  EXPECT_THROW(lik::alpha_n(stack_of({0.0, 0.0})), UndefinedEstimator);
}
