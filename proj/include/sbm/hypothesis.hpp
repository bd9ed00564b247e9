#pragma once

// Test of theta = 0 against theta != 0 from one grid-observed path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sbm/core/parallel.hpp"
#include "sbm/core/stats.hpp"
#include "sbm/experiment.hpp"
#include "sbm/limit_dist.hpp"
#include "sbm/mle.hpp"

namespace sbm::stats {

enum class Calibration { monte_carlo, asymptotic };

/// Null distribution of the test statistics at one grid size (x0 = 0).
struct NullCalibration {
  std::size_t n = 0;
  double T = 1.0;
  std::vector<double> theta_stat;  // +-n^(1/4) theta_n, sorted (symmetrised)
  std::vector<double> alpha_stat;  // +-alpha_n, sorted (symmetrised)
  double var_alpha = 0.0;
  double var_upsilon = 0.0;
};

inline NullCalibration calibrate_null(std::size_t n, double T, std::size_t reps, std::uint64_t seed,
                                      unsigned workers, std::size_t upsilon_pool_size = 10000) {
  StudyConfig cfg;
  cfg.n_list = {n};
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.T = T;
  cfg.workers = workers;
  const auto reps_out = run_replicates(cfg, n, 0.0);
  NullCalibration cal{n, T, {}, {}, 0.0, 0.0};
  const double q = std::pow(static_cast<double>(n), 0.25);
  for (const auto& r : reps_out) {
    cal.theta_stat.push_back(q * r.theta_mle);
    cal.theta_stat.push_back(-q * r.theta_mle);
    if (std::isfinite(r.alpha_n)) {
      cal.alpha_stat.push_back(r.alpha_n);
      cal.alpha_stat.push_back(-r.alpha_n);
    }
  }
  std::sort(cal.theta_stat.begin(), cal.theta_stat.end());
  std::sort(cal.alpha_stat.begin(), cal.alpha_stat.end());
  cal.var_alpha = num::sample_variance(defined_alphas(reps_out));
  cal.var_upsilon = num::sample_variance(upsilon_pool(seed, upsilon_pool_size, workers));
  return cal;
}

struct TestOutcome {
  bool reject = false;
  double statistic = 0.0;
  double threshold = 0.0;
  bool used_alpha = false;  // the MLE sat on the boundary, alpha_n was tested instead
};

/// Two-sided test at the given level. The statistic is n^(1/4) theta_n, or alpha_n when
/// theta_n is a boundary estimate. Monte Carlo mode compares |statistic| with the
/// (1 - level/2) quantile of the symmetrised null sample; asymptotic mode uses the
/// Upsilon quantile rescaled by sqrt(Var(alpha_n) / Var(Upsilon)).
inline TestOutcome hypothesis_test(const sim::GridPath& path, double level, Calibration mode,
                                   const NullCalibration& cal) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("hypothesis_test: level must lie in (0, 1)");
  if (path.n() != cal.n) throw DomainError("hypothesis_test: calibration was built for another grid size");
  lik::MleOptions opts;
  opts.K = 3;
  opts.p = 1;
  const lik::EstimateReport est = lik::mle(path, opts);
  TestOutcome out;
  out.used_alpha = est.boundary;
  if (est.boundary) {
    if (!std::isfinite(est.alpha_n)) {
      throw UndefinedEstimator("hypothesis_test: boundary MLE and undefined alpha_n");
    }
    out.statistic = est.alpha_n;
  } else {
    out.statistic = std::pow(static_cast<double>(path.n()), 0.25) * est.theta_mle;
  }
  const double p = 1.0 - level / 2.0;
  if (mode == Calibration::monte_carlo) {
    out.threshold = num::sorted_quantile(est.boundary ? cal.alpha_stat : cal.theta_stat, p);
  } else {
    out.threshold = limit::upsilon_quantile(p) * std::sqrt(cal.var_alpha / cal.var_upsilon);
  }
  out.reject = std::abs(out.statistic) > out.threshold;
  return out;
}

}  // namespace sbm::stats
