#pragma once

// Monte Carlo studies of the skewness estimators under the null (theta = 0) and nearby
// alternatives. Replication r at grid size n always draws from the stream
// (derive_seed(seed, n), r), and results are aggregated in index order, so every study
// is reproducible regardless of how many workers run it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbm/core/parallel.hpp"
#include "sbm/core/random.hpp"
#include "sbm/core/stats.hpp"
#include "sbm/ks.hpp"
#include "sbm/limit_dist.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"

namespace sbm::stats {

using json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  std::string name;
  json config;
  Table records;  // one row per (n, replication)
  Table summary;  // one row per n (or per histogram bin)
  json stats = json::object();
};

struct StudyConfig {
  std::vector<std::size_t> n_list{100, 1000};
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  double theta = 0.0;
  double x0 = 0.0;
  double T = 1.0;
  unsigned workers = 1;

  json to_json() const {
    return json{{"n", n_list}, {"reps", reps}, {"seed", seed},
                {"theta", theta}, {"x0", x0}, {"T", T}};
  }
};

inline constexpr std::uint64_t kUpsilonPoolTag = 0x5570'5369'6c6f'6e00ull;

inline num::RngStream replication_stream(std::uint64_t seed, std::size_t n, std::size_t rep) {
  return num::RngStream(num::derive_seed(seed, n), rep);
}

struct Replicate {
  double theta_mle = 0.0;
  double alpha_n = std::numeric_limits<double>::quiet_NaN();
  double alpha_scaled = std::numeric_limits<double>::quiet_NaN();
  double theta_expansion1 = std::numeric_limits<double>::quiet_NaN();  // with d^(2)
  double theta_expansion2 = std::numeric_limits<double>::quiet_NaN();  // with d^(2) and d^(3)
  bool boundary = false;
};

inline Replicate estimate_replicate(const sim::SbmParams& params, num::RngStream rng) {
  const sim::GridPath path = sim::simulate_path(params, rng);
  lik::MleOptions opts;
  opts.K = 4;
  opts.p = 2;
  const lik::EstimateReport r = lik::mle(path, opts);
  Replicate out{r.theta_mle, r.alpha_n, r.alpha_scaled};
  out.boundary = r.boundary;
  if (!r.expansion.empty()) {
    const double u = r.alpha_scaled;
    out.theta_expansion1 = u + r.expansion[0] * u * u;
    out.theta_expansion2 = r.theta_expansion;
  }
  return out;
}

inline std::vector<Replicate> run_replicates(const StudyConfig& cfg, std::size_t n, double theta) {
  const sim::SbmParams params{theta, cfg.x0, cfg.T, n};
  params.validate();
  return num::parallel_map(cfg.reps, cfg.workers, [&](std::size_t r) {
    return estimate_replicate(params, replication_stream(cfg.seed, n, r));
  });
}

/// Boundary estimates and alpha_n / n^(1/4) outside (-1, 1) are left out of table 1.
inline bool excluded_from_table(const Replicate& r) {
  return r.boundary || !std::isfinite(r.alpha_scaled) || std::abs(r.alpha_scaled) >= 1.0;
}

/// |theta_n - alpha_n / n^(1/4)| at each n.
inline ExperimentResult table1_study(const StudyConfig& cfg) {
  if (cfg.reps < 2) throw DomainError("table1 needs at least two replications");
  ExperimentResult out{"table1", cfg.to_json(), {}, {}};
  out.records.columns = {"n", "rep", "theta_mle", "alpha_scaled", "abs_diff", "excluded"};
  out.summary.columns = {"n", "mean", "mean_n12", "mean_n34", "std", "q90", "boundary_count"};
  for (std::size_t n : cfg.n_list) {
    const auto reps = run_replicates(cfg, n, cfg.theta);
    std::vector<double> diffs;
    double excluded = 0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const bool skip = excluded_from_table(reps[r]);
      const double diff = std::abs(reps[r].theta_mle - reps[r].alpha_scaled);
      out.records.rows.push_back({double(n), double(r), reps[r].theta_mle, reps[r].alpha_scaled,
                                  diff, skip ? 1.0 : 0.0});
      if (skip) ++excluded; else diffs.push_back(diff);
    }
    if (diffs.size() < 2) throw DomainError("table1: fewer than two usable replications at n = " + std::to_string(n));
    const double m = num::mean(diffs);
    const double dn = static_cast<double>(n);
    out.summary.rows.push_back({dn, m, std::sqrt(dn) * m, std::pow(dn, 0.75) * m,
                                num::sample_std(diffs), num::quantile(diffs, 0.9), excluded});
  }
  return out;
}

/// Medians of |theta_n - Theta_n(p)| per n for p = 0, 1, 2. Theta_n(0) = alpha_n / n^(1/4).
/// The d^(2) and d^(3) terms are both of order n^(-3/4) and tend to have opposite signs at
/// theta = 0, so p = 1 alone need not beat p = 0 while p = 2 does.
inline ExperimentResult expansion_study(const StudyConfig& cfg) {
  ExperimentResult out{"expansion", cfg.to_json(), {}, {}};
  out.records.columns = {"n", "rep", "err_p0", "err_p1", "err_p2", "excluded"};
  out.summary.columns = {"n", "median_err_p0", "median_err_p1", "median_err_p2"};
  std::vector<double> ns, med0;
  for (std::size_t n : cfg.n_list) {
    const auto reps = run_replicates(cfg, n, cfg.theta);
    std::vector<double> e0, e1, e2;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const bool skip = excluded_from_table(reps[r]);
      const double a = std::abs(reps[r].theta_mle - reps[r].alpha_scaled);
      const double b = std::abs(reps[r].theta_mle - reps[r].theta_expansion1);
      const double c = std::abs(reps[r].theta_mle - reps[r].theta_expansion2);
      out.records.rows.push_back({double(n), double(r), a, b, c, skip ? 1.0 : 0.0});
      if (!skip) {
        e0.push_back(a);
        e1.push_back(b);
        e2.push_back(c);
      }
    }
    if (e0.empty()) throw DomainError("expansion study: no usable replications");
    out.summary.rows.push_back(
        {double(n), num::quantile(e0, 0.5), num::quantile(e1, 0.5), num::quantile(e2, 0.5)});
    ns.push_back(double(n));
    med0.push_back(out.summary.rows.back()[1]);
  }
  if (ns.size() >= 2) out.stats["slope_p0"] = num::power_law_fit(ns, med0).slope;
  return out;
}

inline std::vector<double> upsilon_pool(std::uint64_t seed, std::size_t size, unsigned workers) {
  const std::uint64_t pool_seed = num::derive_seed(seed, kUpsilonPoolTag);
  return num::parallel_map(size, workers, [&](std::size_t i) {
    num::RngStream rng(pool_seed, i);
    return limit::draw_upsilon(rng).value;
  });
}

inline std::vector<double> defined_alphas(const std::vector<Replicate>& reps) {
  std::vector<double> a;
  for (const auto& r : reps)
    if (std::isfinite(r.alpha_n)) a.push_back(r.alpha_n);
  return a;
}

/// KS distance of alpha_n against Upsilon rescaled to the sample variance of alpha_n,
/// and against the centred normal with that variance. d_limit compares alpha_n with the
/// exact CDF of Upsilon / sqrt(-mu_2), its asymptotic law; the variance match above is
/// unstable because Var(Upsilon) is infinite.
inline ExperimentResult table2_study(const StudyConfig& cfg, std::size_t pool_size) {
  if (cfg.reps < 100) throw DomainError("table2 needs at least 100 replications");
  ExperimentResult out{"table2", cfg.to_json(), {}, {}};
  out.config["pool"] = pool_size;
  out.records.columns = {"n", "rep", "alpha_n"};
  out.summary.columns = {"n", "d_upsilon", "p_upsilon", "d_normal", "p_normal",
                         "var_alpha", "var_upsilon", "inside_fraction", "undefined_count",
                         "d_limit", "p_limit"};
  const double limit_scale = std::sqrt(-limit::mu_constant(2).value);
  const std::vector<double> pool = upsilon_pool(cfg.seed, pool_size, cfg.workers);
  const double var_pool = num::sample_variance(pool);
  for (std::size_t n : cfg.n_list) {
    const auto reps = run_replicates(cfg, n, cfg.theta);
    double inside = 0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      out.records.rows.push_back({double(n), double(r), reps[r].alpha_n});
      if (std::abs(reps[r].alpha_scaled) < 1.0) ++inside;
    }
    const std::vector<double> alphas = defined_alphas(reps);
    const double var_alpha = num::sample_variance(alphas);
    std::vector<double> scaled(pool);
    const double factor = std::sqrt(var_alpha / var_pool);
    for (double& v : scaled) v *= factor;
    const KsResult vs_upsilon = ks_two_sample(alphas, scaled);
    const double sd = std::sqrt(var_alpha);
    const KsResult vs_normal = ks_one_sample(alphas, [sd](double x) { return num::normal_cdf(x / sd); });
    const KsResult vs_limit =
        ks_one_sample(alphas, [limit_scale](double x) { return limit::upsilon_cdf(x * limit_scale); });
    out.summary.rows.push_back({double(n), vs_upsilon.d, vs_upsilon.p_value, vs_normal.d,
                                vs_normal.p_value, var_alpha, var_pool,
                                inside / static_cast<double>(reps.size()),
                                static_cast<double>(reps.size() - alphas.size()), vs_limit.d,
                                vs_limit.p_value});
  }
  return out;
}

/// Exponent delta in std(theta_n) ~ C n^delta.
inline ExperimentResult rate_regression(const StudyConfig& cfg) {
  if (cfg.n_list.size() < 3) throw DomainError("rate regression needs at least three grid sizes");
  ExperimentResult out{"rate", cfg.to_json(), {}, {}};
  out.records.columns = {"n", "rep", "theta_mle"};
  out.summary.columns = {"n", "std_theta"};
  std::vector<double> ns, sds;
  for (std::size_t n : cfg.n_list) {
    const auto reps = run_replicates(cfg, n, cfg.theta);
    std::vector<double> thetas;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      out.records.rows.push_back({double(n), double(r), reps[r].theta_mle});
      thetas.push_back(reps[r].theta_mle);
    }
    ns.push_back(double(n));
    sds.push_back(num::sample_std(thetas));
    out.summary.rows.push_back({ns.back(), sds.back()});
  }
  const num::OlsFit fit = num::power_law_fit(ns, sds);
  out.stats = json{{"delta", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
  return out;
}

/// Exponent beta in Var(alpha_n) ~ C n^beta.
inline ExperimentResult variance_scaling(const StudyConfig& cfg) {
  if (cfg.n_list.size() < 3) throw DomainError("variance scaling needs at least three grid sizes");
  ExperimentResult out{"var-scaling", cfg.to_json(), {}, {}};
  out.records.columns = {"n", "rep", "alpha_n"};
  out.summary.columns = {"n", "var_alpha"};
  std::vector<double> ns, vars;
  for (std::size_t n : cfg.n_list) {
    const auto reps = run_replicates(cfg, n, cfg.theta);
    for (std::size_t r = 0; r < reps.size(); ++r)
      out.records.rows.push_back({double(n), double(r), reps[r].alpha_n});
    ns.push_back(double(n));
    vars.push_back(num::sample_variance(defined_alphas(reps)));
    out.summary.rows.push_back({ns.back(), vars.back()});
  }
  const num::OlsFit fit = num::power_law_fit(ns, vars);
  out.stats = json{{"beta", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
  return out;
}

struct Histogram {
  double lo = -2.0;
  double hi = 2.0;
  std::size_t bins = 40;

  double width() const { return (hi - lo) / static_cast<double>(bins); }
  double center(std::size_t b) const { return lo + (static_cast<double>(b) + 0.5) * width(); }

  /// Densities normalised by the total sample count (values outside [lo, hi) are counted but not binned).
  std::vector<double> density(const std::vector<double>& xs) const {
    std::vector<double> d(bins, 0.0);
    for (double x : xs) {
      if (!(x >= lo && x < hi)) continue;
      d[std::min(bins - 1, static_cast<std::size_t>((x - lo) / width()))] += 1.0;
    }
    for (double& v : d) v /= static_cast<double>(xs.size()) * width();
    return d;
  }

  double mode(const std::vector<double>& density) const {
    return center(static_cast<std::size_t>(std::max_element(density.begin(), density.end()) - density.begin()));
  }
};

/// Histogram of alpha_n / n^(1/4) under theta next to the theta = 0 reference.
inline ExperimentResult power_histogram(const StudyConfig& cfg, const Histogram& hist) {
  if (cfg.n_list.size() != 1) throw DomainError("power histogram takes exactly one grid size");
  const std::size_t n = cfg.n_list.front();
  ExperimentResult out{"power", cfg.to_json(), {}, {}};
  out.config["bins"] = hist.bins;
  out.config["range"] = {hist.lo, hist.hi};
  out.records.columns = {"rep", "scaled_theta", "scaled_null"};
  out.summary.columns = {"center", "density_theta", "density_null"};
  StudyConfig null_cfg = cfg;
  null_cfg.theta = 0.0;
  null_cfg.seed = num::derive_seed(cfg.seed, 0x6e756c6cull);
  const auto alt = run_replicates(cfg, n, cfg.theta);
  const auto null = run_replicates(null_cfg, n, 0.0);
  std::vector<double> a, b;
  for (std::size_t r = 0; r < alt.size(); ++r) {
    out.records.rows.push_back({double(r), alt[r].alpha_scaled, null[r].alpha_scaled});
    if (std::isfinite(alt[r].alpha_scaled)) a.push_back(alt[r].alpha_scaled);
    if (std::isfinite(null[r].alpha_scaled)) b.push_back(null[r].alpha_scaled);
  }
  const auto da = hist.density(a);
  const auto db = hist.density(b);
  for (std::size_t k = 0; k < hist.bins; ++k) out.summary.rows.push_back({hist.center(k), da[k], db[k]});
  std::vector<double> b_inside;
  for (double v : b)
    if (std::abs(v) < 1.0) b_inside.push_back(v);
  out.stats = json{{"mode_theta", hist.mode(da)}, {"mode_null", hist.mode(db)},
                   {"skewness_null", num::skewness(b_inside)}};
  return out;
}

}  // namespace sbm::stats
