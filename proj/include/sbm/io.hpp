#pragma once

// CSV and JSON formats: comma separated, '.' decimal, 17 significant digits, LF endings.
// Every CSV starts with one '#' comment line carrying the resolved run configuration.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbm/core/error.hpp"
#include "sbm/experiment.hpp"
#include "sbm/habitat.hpp"
#include "sbm/limit_dist.hpp"
#include "sbm/mle.hpp"
#include "sbm/sim.hpp"

namespace sbm::io {

using json = nlohmann::ordered_json;

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_comment(std::ostream& os, const json& config) {
  if (!config.is_null()) os << "# " << config.dump() << '\n';
}

inline void write_path_csv(std::ostream& os, const sim::GridPath& path, const json& config = nullptr) {
  write_comment(os, config);
  os << "i,t,x\n";
  const double n = static_cast<double>(path.n());
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    os << i << ',' << format_real(path.params.T * static_cast<double>(i) / n) << ','
       << format_real(path.values[i]) << '\n';
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

/// Reads an `i,t,x` path. T is the time of the last row; the grid must be uniform.
inline sim::GridPath read_path_csv(std::istream& is) {
  std::string line;
  bool header = false;
  std::vector<double> ts, xs;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "i,t,x") throw IoError("path CSV: expected header 'i,t,x', got '" + line + "'");
      header = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw IoError("path CSV: malformed row '" + line + "'");
    try {
      if (std::stoull(cells[0]) != xs.size()) throw IoError("path CSV: rows out of order");
      ts.push_back(std::stod(cells[1]));
      xs.push_back(std::stod(cells[2]));
    } catch (const std::logic_error&) {
      throw IoError("path CSV: unparsable row '" + line + "'");
    }
  }
  if (!header) throw IoError("path CSV: missing header");
  if (xs.size() < 2) throw IoError("path CSV: need at least two rows");
  const double T = ts.back();
  const double step = T / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::abs(ts[i] - step * static_cast<double>(i)) > 1e-9 * std::max(1.0, T)) {
      throw IoError("path CSV: time grid is not uniform");
    }
  }
  return sim::make_path(std::move(xs), T);
}

inline sim::GridPath read_path_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file + "'");
  return read_path_csv(in);
}

inline json to_json(const lik::EstimateReport& r) {
  return json{{"theta_mle", r.theta_mle},       {"alpha_scaled", r.alpha_scaled},
              {"alpha_n", r.alpha_n},           {"expansion", r.expansion},
              {"theta_expansion", r.theta_expansion}, {"crossed", r.crossed},
              {"boundary", r.boundary},         {"solver_iters", r.solver_iters},
              {"score_residual", r.score_residual}};
}

inline json to_json(const habitat::HabitatDecision& d) {
  return json{{"a_plus_hat", d.a_plus_hat},
              {"a_minus_hat", d.a_minus_hat},
              {"theta_hat", d.theta_hat},
              {"decided", habitat::to_string(d.decided)},
              {"indeterminate", d.indeterminate},
              {"test", {{"alpha_scaled", d.alpha_scaled},
                        {"boundary", d.boundary},
                        {"diffusivity_gap_se", d.diffusivity_gap_se}}}};
}

inline void write_mu_table_csv(std::ostream& os, const limit::MuTable& t, const json& config = nullptr) {
  write_comment(os, config);
  os << "k,mu,err\n";
  for (std::size_t k = 1; k <= t.K(); ++k)
    os << k << ',' << format_real(t.mu[k - 1]) << ',' << format_real(t.err[k - 1]) << '\n';
}

inline void write_table_csv(std::ostream& os, const stats::Table& table, const json& config = nullptr) {
  write_comment(os, config);
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_real(row[c]);
    os << '\n';
  }
}

inline json summary_json(const stats::ExperimentResult& r) {
  json rows = json::array();
  for (const auto& row : r.summary.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < r.summary.columns.size(); ++c) obj[r.summary.columns[c]] = row[c];
    rows.push_back(obj);
  }
  return json{{"name", r.name}, {"config", r.config}, {"summary", rows}, {"stats", r.stats}};
}

}  // namespace sbm::io
