#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "codedmr/commands.hpp"
#include "codedmr/config.hpp"

using namespace codedmr;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(CODEDMR_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("codedmr_test_" + name + ".json");
  std::ofstream(path) << body;
  return path.string();
}

std::string config(const char* name) { return std::string(CODEDMR_CONFIG_DIR) + "/" + name; }

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, AnalyzeK30Table) {
  const auto r = run_cli("analyze --config " + config("q_curve.json"));
  ASSERT_EQ(r.status, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 30u);
  std::ostringstream header;
  header << kAnalyzeHeader;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), header.str());
  EXPECT_EQ(rows[1][0], "2");
  EXPECT_EQ(rows[29][0], "30");
  for (std::size_t i = 1; i < rows.size(); ++i) ASSERT_EQ(rows[i].size(), 14u);
}

TEST(Cli, DeterministicOutput) {
  const auto a = run_cli("analyze --config " + config("q_curve.json"));
  const auto b = run_cli("analyze --config " + config("q_curve.json"));
  EXPECT_EQ(a.out, b.out);
  const auto s1 = run_cli("simulate --config " + config("small_e2e.json") + " --format json --trials 20");
  const auto s2 = run_cli("simulate --config " + config("small_e2e.json") + " --format json --trials 20");
  EXPECT_EQ(s1.out, s2.out);
}

TEST(Cli, GammaZeroTotalsEqualShuffle) {
  const auto path = write_temp("gamma0", R"({"K": 30, "mu": "1/2", "N": 120, "m": 600, "d": 1, "gamma": 0,
    "alpha": "3/4", "scheme": "all", "mode": "analytic", "prime": 2147483647, "seed": 1, "trials": 1})");
  const auto r = run_cli("analyze --config " + path);
  ASSERT_EQ(r.status, 0);
  const auto rows = csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(rows[i][2 + k], rows[i][5 + k]);
}

TEST(Cli, SmallAnalyzeRow) {
  const auto path = write_temp("k4", R"({"K": 4, "mu": "1/2", "N": 3, "m": 3, "d": 2, "gamma": 1,
    "alpha": "3/4", "scheme": "all", "mode": "analytic", "prime": 101, "seed": 1, "trials": 1})");
  const auto r = run_cli("analyze --config " + path);
  ASSERT_EQ(r.status, 0);
  bool found = false;
  for (const auto& row : csv(r.out))
    if (row[0] == "3") {
      found = true;
      EXPECT_EQ(row[2], "0.416666666667");
      EXPECT_EQ(row[8], "1");
      EXPECT_EQ(row[9], "2");
    }
  EXPECT_TRUE(found);
}

TEST(Cli, SimulateSmallInstance) {
  const auto r = run_cli("simulate --config " + config("small_e2e.json") + " --format json");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("all_correct").get<bool>());
  for (const auto& [name, s] : j.at("end_to_end").items()) {
    EXPECT_EQ(s.at("residual"), "0") << name;
    EXPECT_EQ(s.at("runs"), 100) << name;
  }
}

TEST(Cli, SimulateZeroTrials) {
  const auto r = run_cli("simulate --config " + config("small_e2e.json") + " --trials 0 --format json");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("trials"), 0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("analyze --config " + write_temp("bad", R"({"K": 4, "mu": 2, "N": 1, "m": 1, "d": 1})")).status,
            2);
  EXPECT_EQ(run_cli("analyze --config " + write_temp("unknown", R"({"K": 4, "nope": 1})")).status, 2);
  EXPECT_EQ(run_cli("analyze --config " + write_temp("garbage", "{not json")).status, 2);
  // q = 3 does not divide N = 4.
  const auto nodiv = write_temp("nodiv", R"({"K": 4, "mu": 1, "N": 4, "m": 3, "d": 2, "mode": "concrete",
    "q": 3, "trials": 5})");
  EXPECT_EQ(run_cli("simulate --config " + nodiv).status, 2);
  EXPECT_EQ(run_cli("frobnicate").status, 2);
}

TEST(Cli, OptimizeAndOutputFile) {
  const auto out = (std::filesystem::temp_directory_path() / "codedmr_test_opt.csv").string();
  const auto r = run_cli("optimize --config " + config("q_curve.json") + " --output " + out);
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto rows = csv(ss.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3][0], "sc");
}

TEST(Cli, SweepRows) {
  const auto r = run_cli("sweep --config " + config("degree_sweep_q10.json"));
  ASSERT_EQ(r.status, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0][0], "d");
  EXPECT_EQ(rows[6][9], "inf");
}

TEST(Commands, RowsSatisfyAdditivity) {
  auto cfg = load_config(config("q_curve.json"));
  for (const auto& row : analyze_rows(cfg))
    for (const auto& d : row.schemes)
      EXPECT_EQ(d.total_delay, ExtRational(cfg.system.gamma * d.map_delay) + d.shuffle_delay);
}
