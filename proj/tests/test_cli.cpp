#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string output;
};

// Runs the CLI with stderr folded into the captured output.
Outcome cli(const std::string& args) {
  const std::string cmd = std::string(PERCH_CLI) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) o.output += buf.data();
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("perch_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string scenario(const std::string& file) { return std::string(PERCH_SCENARIO_DIR) + "/" + file; }

}  // namespace

TEST(Cli, RunWritesTrace) {
  const fs::path out = scratch("run");
  const Outcome o = cli("run --scenario " + scenario("static_47.ini") + " --seed 3 --out " + out.string());
  EXPECT_EQ(o.status, 0) << o.output;
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
  EXPECT_TRUE(fs::exists(out / "result.csv"));
  std::ifstream in(out / "result.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(row.rfind("3,", 0), 0u);
}

TEST(Cli, MalformedConfigNamesKey) {
  const fs::path dir = scratch("bad");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ini") << "[surface]\ninclination_deg = 47\nwobble = 3\n";
  const Outcome o = cli("run --scenario " + (dir / "bad.ini").string() + " --out " + dir.string());
  EXPECT_NE(o.status, 0);
  EXPECT_NE(o.output.find("surface.wobble"), std::string::npos) << o.output;
}

TEST(Cli, MissingFileFails) {
  const Outcome o = cli("run --scenario /nonexistent/x.ini");
  EXPECT_NE(o.status, 0);
  EXPECT_NE(cli("batch --scenario /nonexistent/x.ini --n 2").status, 0);
  EXPECT_NE(cli("bench --scenario /nonexistent/x.ini").status, 0);
}

TEST(Cli, BatchWritesSummary) {
  const fs::path out = scratch("batch");
  const Outcome o = cli("batch --scenario " + scenario("static_47.ini") + " " + scenario("static_70.ini") +
                        " --n 2 --out " + out.string());
  EXPECT_EQ(o.status, 0) << o.output;
  std::ifstream in(out / "summary.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_TRUE(fs::exists(out / "results.csv"));
  EXPECT_TRUE(fs::exists(out / "solve_hist.csv"));
  EXPECT_TRUE(fs::exists(out / "static_47_impacts.csv"));
  EXPECT_NE(cli("batch --scenario " + scenario("static_47.ini") + " --n 0").status, 0);
}

TEST(Cli, BenchReportsPercentiles) {
  const Outcome o = cli("bench --scenario " + scenario("static_47.ini") + " --iterations 2");
  EXPECT_EQ(o.status, 0) << o.output;
  EXPECT_NE(o.output.find("p73"), std::string::npos);
  EXPECT_NE(o.output.find("below 10 ms"), std::string::npos);
  const Outcome zero = cli("bench --scenario " + scenario("static_47.ini") + " --iterations 0");
  EXPECT_NE(zero.status, 0);
}

TEST(Cli, OracleSuites) {
  const Outcome o = cli("oracle all --n 20");
  EXPECT_EQ(o.status, 0) << o.output;
  EXPECT_NE(o.output.find("PASS minjerk"), std::string::npos);
  EXPECT_NE(o.output.find("PASS timesearch"), std::string::npos);
  EXPECT_NE(o.output.find("PASS flatness"), std::string::npos);
  EXPECT_NE(cli("oracle nonsense").status, 0);
}

TEST(Cli, FormatIsCsvOnly) {
  EXPECT_NE(cli("run --scenario " + scenario("static_47.ini") + " --format json").status, 0);
}
