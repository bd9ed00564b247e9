#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sbm/cli.hpp"
#include "sbm/io.hpp"

using namespace sbm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sbm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sbm_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, SimulateIsDeterministic) {
  const auto a = run({"simulate", "--theta", "0", "--n", "1000", "--seed", "1"});
  const auto b = run({"simulate", "--theta", "0", "--n", "1000", "--seed", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# {", 0), 0u);
  EXPECT_NE(a.out.find("\ni,t,x\n0,0,0\n"), std::string::npos);
  const auto c = run({"simulate", "--theta", "0", "--n", "1000", "--seed", "2"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, EstimateOnReflectedPathHitsBoundary) {
  const auto file = scratch("reflected.csv");
  ASSERT_EQ(run({"simulate", "--theta", "1", "--x0", "0.5", "--n", "500", "--out", file.string()}).code, 0);
  const auto r = run({"estimate", "--path", file.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["theta_mle"].get<double>(), 1.0);
  EXPECT_TRUE(j["boundary"].get<bool>());
  EXPECT_FALSE(j["crossed"].get<bool>());
  // Fixed key order.
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(r.out.find("\"theta_mle\""), r.out.find('"'));
  EXPECT_LT(r.out.find("\"alpha_scaled\""), r.out.find("\"score_residual\""));
}

TEST(Cli, PathRoundTrip) {
  num::RngStream rng(3, 0);
  const auto path = sim::simulate_path({0.2, 0.1, 2.0, 300}, rng);
  std::stringstream ss;
  io::write_path_csv(ss, path, nlohmann::ordered_json{{"x", 1}});
  const auto back = io::read_path_csv(ss);
  EXPECT_EQ(back.values, path.values);
  EXPECT_DOUBLE_EQ(back.params.T, 2.0);
  EXPECT_EQ(back.crossed, path.crossed);
}

TEST(Cli, MuTable) {
  const auto r = run({"mu-table", "--K", "4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k,mu,err\n1,1.29514635781341"), std::string::npos);
  EXPECT_NE(r.out.find("\n4,-1.10121872646126"), std::string::npos);
}

TEST(Cli, LimitSampleIndependentOfThreads) {
  const auto a = run({"limit-sample", "--count", "500", "--threads", "1"});
  const auto b = run({"limit-sample", "--count", "500", "--threads", "3"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("i,upsilon,h\n"), std::string::npos);
}

TEST(Cli, Table1StudyWritesFiles) {
  const auto dir = scratch("study");
  const auto r = run({"study", "table1", "--n", "100,1000", "--reps", "100", "--seed", "7", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = slurp(dir / "table1.csv");
  EXPECT_EQ(summary.rfind("# {", 0), 0u);
  EXPECT_NE(summary.find("\nn,mean,mean_n12,mean_n34,std,q90,boundary_count\n"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "table1_records.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "table1.json"));
  EXPECT_EQ(j["config"]["seed"].get<int>(), 7);
}

TEST(Cli, ExpansionStudyColumns) {
  const auto dir = scratch("expansion");
  const auto r = run({"study", "expansion", "--n", "100,400", "--reps", "20", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(dir / "expansion.csv").find("\nn,median_err_p0,median_err_p1,median_err_p2\n"),
            std::string::npos);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = scratch("run.json");
  std::ofstream(cfg) << R"({"theta": 0.5, "n": 50, "seed": 4})";
  const auto from_file = run({"simulate", "--config", cfg.string()});
  const auto explicit_flags = run({"simulate", "--theta", "0.5", "--n", "50", "--seed", "4"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, explicit_flags.out);
  const auto overridden = run({"simulate", "--config", cfg.string(), "--seed", "5"});
  const auto seed5 = run({"simulate", "--theta", "0.5", "--n", "50", "--seed", "5"});
  EXPECT_EQ(overridden.out, seed5.out);
}

TEST(Cli, HabitatRoundTrip) {
  const auto file = scratch("habitat.csv");
  ASSERT_EQ(run({"habitat-simulate", "--a-plus", "4", "--a-minus", "1", "--generator", "L", "--n", "10000", "--seed",
                 "2", "--out", file.string()})
                .code,
            0);
  const auto r = run({"habitat-decide", "--path", file.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("decided"));
  EXPECT_TRUE(j.contains("indeterminate"));
}

TEST(Cli, TestCommand) {
  const auto file = scratch("null.csv");
  ASSERT_EQ(run({"simulate", "--n", "300", "--seed", "9", "--out", file.string()}).code, 0);
  const auto r = run({"test", "--path", file.string(), "--cal-reps", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("reject"));
  EXPECT_GT(j["threshold"].get<double>(), 0.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"simulate", "--bogus", "1"}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"simulate", "--theta", "2"}).code, 1);
  EXPECT_EQ(run({"estimate", "--path", "/nonexistent/path.csv"}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", "/nonexistent/run.json"}).code, 2);
  EXPECT_EQ(run({"simulate", "--help"}).code, 0);
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "i,t,x\n0,0,1\n1,0.5,2\n2,0.7,1\n";
  EXPECT_EQ(run({"estimate", "--path", bad.string()}).code, 2);
}
