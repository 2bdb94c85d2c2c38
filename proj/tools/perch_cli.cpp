#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "perch/oracle.hpp"
#include "perch/scenario_config.hpp"
#include "perch/sim_harness.hpp"

namespace fs = std::filesystem;
using namespace perch;

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& file) {
  fs::create_directories(dir);
  std::ofstream os(dir / file);
  if (!os) throw PerchError(ErrorKind::kConfig, "cannot write " + (dir / file).string());
  return os;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const fs::path& out) {
  Scenario sc = load_scenario(path);
  if (seed) sc.seed = *seed;
  const EpisodeResult r = run_episode(sc);
  auto trace = open_out(out, "trace.csv");
  write_trace_csv(trace, r);
  auto result = open_out(out, "result.csv");
  write_result_csv(result, r);
  std::printf("%s seed %llu: %s", sc.name.c_str(), static_cast<unsigned long long>(r.seed),
              r.success ? "success" : std::string(to_string(r.failure)).c_str());
  if (r.contact) {
    std::printf("  phi_e %.2f deg  dV_Ys %.3f  dV_Zs %.3f  nu_s %.3f", rad2deg(r.angle_error),
                r.tangential_velocity, r.normal_velocity, r.surface_speed);
  }
  std::printf("\n");
  return 0;
}

int cmd_batch(const std::vector<std::string>& paths, int n, std::optional<std::uint64_t> seed,
              const fs::path& out) {
  std::vector<BatchSummary> rows;
  auto results = open_out(out, "results.csv");
  results << "scenario,seed,contact,success,failure,impact_time,phi_e_deg,dv_ys,dv_zs,nu_s\n";
  std::vector<double> all_solves;
  for (const auto& path : paths) {
    Scenario sc = load_scenario(path);
    if (seed) sc.seed = *seed;
    BatchSummary s = run_batch(sc, n);
    for (const auto& r : s.episodes_detail) {
      results << s.name << ',' << r.seed << ',' << r.contact << ',' << r.success << ','
              << to_string(r.failure) << ',' << r.impact_time << ',' << rad2deg(r.angle_error) << ','
              << r.tangential_velocity << ',' << r.normal_velocity << ',' << r.surface_speed << '\n';
    }
    auto scatter = open_out(out, s.name + "_impacts.csv");
    write_impact_scatter_csv(scatter, s);
    all_solves.insert(all_solves.end(), s.solve_times.begin(), s.solve_times.end());
    std::printf("%-14s %2d/%-2d  avg nu_s %6.3f  A %d  V %d  none %d  detached %d\n", s.name.c_str(),
                s.successes, s.episodes, s.mean_surface_speed, s.angle_failures, s.velocity_failures,
                s.no_contact, s.detached);
    rows.push_back(std::move(s));
  }
  auto summary = open_out(out, "summary.csv");
  write_batch_summary_csv(summary, rows);
  auto hist = open_out(out, "solve_hist.csv");
  write_solve_histogram_csv(hist, all_solves);
  return 0;
}

int cmd_bench(const std::string& path, int iterations, std::optional<std::uint64_t> seed,
              const fs::path* out) {
  if (iterations <= 0) throw PerchError(ErrorKind::kInvalidArgument, "iterations must be positive");
  Scenario sc = load_scenario(path);
  if (seed) sc.seed = *seed;
  const EpisodeResult ep = run_episode(sc);
  ManualClock clock;
  const MinTimePlanner planner(clock, sc.search);
  std::vector<double> times;
  for (int it = 0; it < iterations; ++it) {
    for (const auto& rec : ep.plans) {
      if (rec.initial_scan || !rec.state_before.initialized) continue;
      clock.set(rec.t);
      SearchState s = rec.state_before;
      times.push_back(planner.plan(s, rec.problem).solve_time);
    }
  }
  if (times.empty()) throw PerchError(ErrorKind::kInvalidArgument, "episode produced no plan() calls");
  const auto below = std::count_if(times.begin(), times.end(), [](double t) { return t < 0.010; });
  std::printf("%s: %zu plan() calls over %d passes\n", sc.name.c_str(), times.size(), iterations);
  std::printf("p50 %.4f ms  p73 %.4f ms  p95 %.4f ms  below 10 ms %.3f\n", 1e3 * percentile(times, 0.50),
              1e3 * percentile(times, 0.73), 1e3 * percentile(times, 0.95),
              static_cast<double>(below) / static_cast<double>(times.size()));
  if (out) {
    auto hist = open_out(*out, "bench_hist.csv");
    write_solve_histogram_csv(hist, times);
  }
  return 0;
}

int cmd_oracle(const std::string& suite, int n, std::uint64_t seed) {
  std::vector<oracle::SuiteReport> reports;
  const bool all = suite == "all";
  if (all || suite == "minjerk") reports.push_back(oracle::minjerk_suite(n > 0 ? n : 1000, seed));
  if (all || suite == "timesearch") reports.push_back(oracle::timesearch_suite(n > 0 ? n : 100, seed));
  if (all || suite == "flatness") reports.push_back(oracle::flatness_suite(n > 0 ? n : 100, seed));
  if (reports.empty()) throw PerchError(ErrorKind::kInvalidArgument, "unknown oracle suite '" + suite + "'");
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("%s %-10s %4d cases  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.cases,
                r.detail.c_str());
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perching planner simulation and cross-checks"};
  app.require_subcommand(1);

  std::string scenario;
  std::vector<std::string> scenarios;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string format = "csv";
  int n = 10;
  int iterations = 20;
  std::string suite = "all";
  int oracle_n = 0;

  auto* run = app.add_subcommand("run", "Run one episode and write trace.csv and result.csv");
  run->add_option("--scenario", scenario, "Scenario INI file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));

  auto* batch = app.add_subcommand("batch", "Run seeded batches and write the summary table");
  batch->add_option("--scenario", scenarios, "Scenario INI files")->required();
  batch->add_option("--n", n, "Episodes per scenario")->check(CLI::PositiveNumber);
  batch->add_option("--seed", seed, "First seed");
  batch->add_option("--out", out, "Output directory");
  batch->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));

  auto* bench = app.add_subcommand("bench", "Replay an episode's planner calls and time them");
  bench->add_option("--scenario", scenario, "Scenario INI file")->required();
  bench->add_option("--iterations", iterations, "Passes over the recorded plan() calls");
  bench->add_option("--seed", seed, "Override the scenario seed");
  auto* bench_out = bench->add_option("--out", out, "Write bench_hist.csv here");

  auto* orc = app.add_subcommand("oracle", "Cross-check against the independent oracles");
  orc->add_option("suite", suite, "minjerk, timesearch, flatness or all")
      ->check(CLI::IsMember({"minjerk", "timesearch", "flatness", "all"}));
  orc->add_option("--n", oracle_n, "Instances per suite (suite default when 0)");
  std::uint64_t oracle_seed = 1;
  orc->add_option("--seed", oracle_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, seed, out);
    if (*batch) return cmd_batch(scenarios, n, seed, out);
    if (*bench) {
      const fs::path dir = out;
      return cmd_bench(scenario, iterations, seed, bench_out->count() ? &dir : nullptr);
    }
    if (*orc) return cmd_oracle(suite, oracle_n, oracle_seed);
  } catch (const PerchError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
