#pragma once

// Command-line front end. Exit codes: 0 success, 1 domain error, 2 I/O error, 64 usage.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbm/core/error.hpp"
#include "sbm/core/parallel.hpp"
#include "sbm/core/random.hpp"
#include "sbm/experiment.hpp"
#include "sbm/habitat.hpp"
#include "sbm/hypothesis.hpp"
#include "sbm/io.hpp"
#include "sbm/limit_dist.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"

namespace sbm::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  unsigned threads = num::default_workers();
  std::string output_dir = ".";
  std::string out;  // single-file commands; empty means stdout
  std::string config_file;

  double theta = 0.0;
  double x0 = 0.0;
  double T = 1.0;
  std::size_t n = 1000;
  std::string n_list;
  std::size_t reps = 0;
  std::size_t pool = 10000;
  std::size_t bins = 40;
  double hist_lo = -2.0;
  double hist_hi = 2.0;
  double level = 0.05;
  std::string calibration = "mc";
  std::size_t cal_reps = 2000;
  double a_plus = 1.0;
  double a_minus = 1.0;
  std::string generator = "L";
  std::size_t K = 6;
  std::size_t p = 4;
  std::size_t count = 10000;
  std::string path;
  std::string kind;
};

inline std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::logic_error&) {
      throw DomainError("bad grid size '" + item + "'");
    }
    if (pos != item.size() || v == 0) throw DomainError("bad grid size '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw DomainError("empty grid-size list");
  return out;
}

namespace detail {

// Turns a flat JSON object into "--key value" tokens. Multi-valued entries (n lists)
// are joined with commas.
inline std::vector<std::string> config_tokens(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config '" + file + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw IoError("config must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || key == "kind") continue;
    tokens.push_back("--" + key);
    if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      tokens.push_back(joined);
    } else {
      tokens.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return tokens;
}

class Output {
 public:
  Output(const std::string& file, std::ostream& fallback) {
    if (file.empty() || file == "-") {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(file, std::ios::binary);
      if (!*file_) throw IoError("cannot write '" + file + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }
  void finish() {
    os_->flush();
    if (!*os_) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

inline void write_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw IoError("cannot write '" + file.string() + "'");
  f << content;
  if (!f) throw IoError("write failed for '" + file.string() + "'");
}

inline std::string table_text(const stats::Table& t, const json& config) {
  std::ostringstream os;
  io::write_table_csv(os, t, config);
  return os.str();
}

}  // namespace detail

inline int run_simulate(const RunConfig& c, std::ostream& out) {
  const sim::SbmParams params{c.theta, c.x0, c.T, c.n};
  num::RngStream rng(c.seed, 0);
  const sim::GridPath path = sim::simulate_path(params, rng);
  detail::Output o(c.out, out);
  io::write_path_csv(o.stream(), path,
                     json{{"command", "simulate"}, {"theta", c.theta}, {"x0", c.x0}, {"T", c.T},
                          {"n", c.n}, {"seed", c.seed}});
  o.finish();
  return kExitOk;
}

inline int run_estimate(const RunConfig& c, std::ostream& out) {
  const sim::GridPath path = io::read_path_file(c.path);
  lik::MleOptions opts;
  opts.K = c.K;
  opts.p = c.p;
  if (opts.K < opts.p + 2) throw DomainError("estimate: need K >= p + 2");
  json j = io::to_json(lik::mle(path, opts));
  j["config"] = json{{"command", "estimate"}, {"path", c.path}, {"K", c.K}, {"p", c.p}};
  detail::Output o(c.out, out);
  o.stream() << j.dump(2) << '\n';
  o.finish();
  return kExitOk;
}

inline int run_mu_table(const RunConfig& c, std::ostream& out) {
  if (c.K < 1) throw DomainError("mu-table: K must be >= 1");
  detail::Output o(c.out, out);
  io::write_mu_table_csv(o.stream(), limit::mu_table(static_cast<int>(c.K)),
                         json{{"command", "mu-table"}, {"K", c.K}});
  o.finish();
  return kExitOk;
}

inline int run_limit_sample(const RunConfig& c, std::ostream& out) {
  const auto samples = num::parallel_map(c.count, c.threads, [&](std::size_t i) {
    num::RngStream rng(c.seed, i);
    return limit::draw_upsilon(rng);
  });
  detail::Output o(c.out, out);
  io::write_comment(o.stream(), json{{"command", "limit-sample"}, {"count", c.count}, {"seed", c.seed}});
  o.stream() << "i,upsilon,h\n";
  for (std::size_t i = 0; i < samples.size(); ++i)
    o.stream() << i << ',' << io::format_real(samples[i].value) << ',' << io::format_real(samples[i].h) << '\n';
  o.finish();
  return kExitOk;
}

inline stats::StudyConfig study_config(const RunConfig& c, const std::string& default_n,
                                       std::size_t default_reps) {
  stats::StudyConfig s;
  s.n_list = parse_n_list(c.n_list.empty() ? default_n : c.n_list);
  s.reps = c.reps ? c.reps : default_reps;
  s.seed = c.seed;
  s.theta = c.theta;
  s.x0 = c.x0;
  s.T = c.T;
  s.workers = c.threads;
  return s;
}

inline int run_study(const RunConfig& c, std::ostream& out) {
  stats::ExperimentResult result;
  if (c.kind == "table1") {
    result = stats::table1_study(study_config(c, "100,1000,10000", 100));
  } else if (c.kind == "expansion") {
    result = stats::expansion_study(study_config(c, "100,1000,10000", 500));
  } else if (c.kind == "table2") {
    result = stats::table2_study(study_config(c, "1000", 10000), c.pool);
  } else if (c.kind == "rate") {
    result = stats::rate_regression(study_config(c, "100,316,1000,3162,10000,31623,100000", 500));
  } else if (c.kind == "var-scaling") {
    result = stats::variance_scaling(
        study_config(c, "50,100,200,500,1000,2000,5000,10000,20000,50000,100000", 10000));
  } else if (c.kind == "power") {
    stats::StudyConfig s = study_config(c, "1000", 10000);
    if (c.theta == 0.0 && c.config_file.empty()) s.theta = 0.5;
    result = stats::power_histogram(s, stats::Histogram{c.hist_lo, c.hist_hi, c.bins});
  } else {
    throw DomainError("unknown study '" + c.kind + "'");
  }
  result.config["study"] = result.name;
  const std::filesystem::path dir(c.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "'");
  const std::string stem = result.name;
  detail::write_file(dir / (stem + ".csv"), detail::table_text(result.summary, result.config));
  detail::write_file(dir / (stem + "_records.csv"), detail::table_text(result.records, result.config));
  detail::write_file(dir / (stem + ".json"), io::summary_json(result).dump(2) + "\n");
  out << (dir / (stem + ".csv")).string() << '\n';
  return kExitOk;
}

inline int run_test(const RunConfig& c, std::ostream& out) {
  const sim::GridPath path = io::read_path_file(c.path);
  stats::Calibration mode;
  if (c.calibration == "mc") mode = stats::Calibration::monte_carlo;
  else if (c.calibration == "asymptotic") mode = stats::Calibration::asymptotic;
  else throw DomainError("calibration must be 'mc' or 'asymptotic'");
  const auto cal = stats::calibrate_null(path.n(), path.params.T, c.cal_reps, c.seed, c.threads);
  const stats::TestOutcome t = stats::hypothesis_test(path, c.level, mode, cal);
  json j{{"reject", t.reject}, {"statistic", t.statistic}, {"threshold", t.threshold},
         {"used_alpha", t.used_alpha}};
  j["config"] = json{{"command", "test"}, {"path", c.path}, {"level", c.level},
                     {"calibration", c.calibration}, {"cal_reps", c.cal_reps}, {"seed", c.seed}};
  detail::Output o(c.out, out);
  o.stream() << j.dump(2) << '\n';
  o.finish();
  return kExitOk;
}

inline int run_habitat_simulate(const RunConfig& c, std::ostream& out) {
  const habitat::HabitatModel model{c.a_plus, c.a_minus, habitat::parse_generator(c.generator)};
  num::RngStream rng(c.seed, 0);
  const sim::GridPath path = habitat::simulate_habitat(model, c.x0, c.T, c.n, rng);
  detail::Output o(c.out, out);
  io::write_path_csv(o.stream(), path,
                     json{{"command", "habitat-simulate"}, {"a_plus", c.a_plus}, {"a_minus", c.a_minus},
                          {"generator", c.generator}, {"x0", c.x0}, {"T", c.T}, {"n", c.n},
                          {"seed", c.seed}});
  o.finish();
  return kExitOk;
}

inline int run_habitat_decide(const RunConfig& c, std::ostream& out) {
  const sim::GridPath path = io::read_path_file(c.path);
  json j = io::to_json(habitat::decide_generator(path));
  j["config"] = json{{"command", "habitat-decide"}, {"path", c.path}};
  detail::Output o(c.out, out);
  o.stream() << j.dump(2) << '\n';
  o.finish();
  return kExitOk;
}

/// Parses argv, runs the command and maps failures to exit codes.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);

  // `--config file.json` supplies defaults; explicit flags come later and win.
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        const auto tokens = detail::config_tokens(args[i + 1]);
        if (!args.empty()) args.insert(args.begin() + 1, tokens.begin(), tokens.end());
        break;
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  RunConfig c;
  CLI::App app{"Skew Brownian motion: simulation and skewness estimation", "sbm"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto common = [&c](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output file (default stdout)");
    sub->add_option("--output-dir", c.output_dir, "Output directory for studies");
    sub->add_option("--config", c.config_file, "JSON file with default option values");
  };
  auto sbm_params = [&c](CLI::App* sub) {
    sub->add_option("--theta", c.theta, "Skewness");
    sub->add_option("--x0", c.x0, "Initial condition");
    sub->add_option("--T", c.T, "Horizon");
    sub->add_option("--n", c.n, "Grid steps");
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate a path (CSV i,t,x)");
  common(simulate);
  sbm_params(simulate);

  auto* estimate = app.add_subcommand("estimate", "Estimate the skewness of a path CSV (JSON)");
  common(estimate);
  estimate->add_option("--path,path", c.path, "Path CSV")->required();
  estimate->add_option("--K", c.K, "Derivative orders");
  estimate->add_option("--p", c.p, "Expansion order");

  auto* mu = app.add_subcommand("mu-table", "Limit constants mu_k (CSV k,mu,err)");
  common(mu);
  mu->add_option("--K", c.K, "Largest k");

  auto* limit_sample = app.add_subcommand("limit-sample", "Samples of the limit law (CSV i,upsilon,h)");
  common(limit_sample);
  limit_sample->add_option("--count", c.count, "Number of samples");

  auto* study = app.add_subcommand("study", "Monte Carlo study: table1 | expansion | table2 | rate | var-scaling | power");
  common(study);
  study->add_option("kind", c.kind, "Study name")
      ->required()
      ->check(CLI::IsMember({"table1", "expansion", "table2", "rate", "var-scaling", "power"}));
  study->add_option("--n", c.n_list, "Comma-separated grid sizes");
  study->add_option("--reps", c.reps, "Replications per grid size");
  study->add_option("--pool", c.pool, "Upsilon pool size (table2)");
  study->add_option("--theta", c.theta, "Skewness of the simulated paths");
  study->add_option("--x0", c.x0, "Initial condition");
  study->add_option("--T", c.T, "Horizon");
  study->add_option("--bins", c.bins, "Histogram bins (power)");
  study->add_option("--lo", c.hist_lo, "Histogram lower edge (power)");
  study->add_option("--hi", c.hist_hi, "Histogram upper edge (power)");

  auto* test = app.add_subcommand("test", "Test theta = 0 on a path CSV (JSON)");
  common(test);
  test->add_option("--path,path", c.path, "Path CSV")->required();
  test->add_option("--level", c.level, "Test level");
  test->add_option("--calibration", c.calibration, "mc | asymptotic");
  test->add_option("--cal-reps", c.cal_reps, "Null replications for calibration");

  auto* hsim = app.add_subcommand("habitat-simulate", "Simulate a two-habitat path (CSV i,t,x)");
  common(hsim);
  hsim->add_option("--a-plus", c.a_plus, "Diffusivity on [0, inf)");
  hsim->add_option("--a-minus", c.a_minus, "Diffusivity on (-inf, 0)");
  hsim->add_option("--generator", c.generator, "L | A");
  hsim->add_option("--x0", c.x0, "Initial condition");
  hsim->add_option("--T", c.T, "Horizon");
  hsim->add_option("--n", c.n, "Grid steps");

  auto* hdecide = app.add_subcommand("habitat-decide", "Decide between generators L and A (JSON)");
  common(hdecide);
  hdecide->add_option("--path,path", c.path, "Path CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(c, out);
    if (estimate->parsed()) return run_estimate(c, out);
    if (mu->parsed()) return run_mu_table(c, out);
    if (limit_sample->parsed()) return run_limit_sample(c, out);
    if (study->parsed()) return run_study(c, out);
    if (test->parsed()) return run_test(c, out);
    if (hsim->parsed()) return run_habitat_simulate(c, out);
    if (hdecide->parsed()) return run_habitat_decide(c, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const AccuracyError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace sbm::cli
