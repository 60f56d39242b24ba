// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "streamgain/streamgain.hpp"

#ifndef STREAMGAIN_CLI
#error "STREAMGAIN_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;
using namespace streamgain;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << detail << std::endl;
  failures += !ok;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SeedRun {
  std::map<int, double> gain;  // delta -> gain, NaN when the cell was skipped
  std::vector<CellResult> cells;
  CoefficientTable coefficients;
  double seconds = 0.0;
};

const std::vector<int> kDeltas{2, 4, 6};

SeedRun planted_run(std::uint64_t seed, double beta, bool coefficients) {
  const auto t0 = std::chrono::steady_clock::now();
  SynthConfig c;
  c.seed = seed;
  c.behavior_effect = beta;
  const Dataset ds = generate(c);
  ExperimentContext ctx(ds, split_streamers(ds.streamers.size(), seed));
  CellOptions opt;
  opt.split_seed = seed;
  opt.bootstrap_resamples = 20;
  SeedRun r;
  auto curve = run_interval_sweep(ctx, Task::relative_growth, Measure::followers, kDeltas, opt);
  for (const auto& p : curve.points) r.gain[p.key.delta] = p.ok() ? p.gain() : kNaN;
  r.cells = std::move(curve.points);
  if (coefficients) r.coefficients = coefficient_table(ctx, {Measure::followers}, 2, opt);
  r.seconds = seconds_since(t0);
  return r;
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return rc;
}

}  // namespace

int main() {
  const auto oracles = oracle::run_suite(1);
  const char* oracle_names[] = {"auc oracle", "gradient", "intercept closed form",
                                "cutoff oracle", "schedule regularity", "welch test"};
  for (std::size_t i = 0; i < oracles.size(); ++i)
    report(static_cast<int>(i + 1), oracles[i].passed, oracle_names[i], oracles[i].detail);

  // planted effect and coefficient recovery share the beta = 0.8 runs
  std::vector<SeedRun> planted, null_runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) planted.push_back(planted_run(seed, 0.8, true));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) null_runs.push_back(planted_run(seed, 0.0, false));
  {
    bool ok = true;
    std::string detail;
    double slowest = 0.0;
    for (int d : kDeltas) {
      double g8 = 0.0, g0 = 0.0;
      for (const auto& r : planted) g8 += r.gain.at(d) / 5.0;
      for (const auto& r : null_runs) g0 += r.gain.at(d) / 5.0;
      ok = ok && g8 >= 0.05 && std::abs(g0) <= 0.02;
      detail += "d" + std::to_string(d) + " gain " + num(g8) + " (null " + num(g0) + "); ";
    }
    for (const auto& r : planted) slowest = std::max(slowest, r.seconds);
    for (const auto& r : null_runs) slowest = std::max(slowest, r.seconds);
    ok = ok && slowest < 120.0;
    report(7, ok, "planted effect", detail + "slowest seed " + num(slowest) + " s");
  }
  {
    const auto drivers = driving_features(SynthConfig{});
    std::map<std::string, double> mean_abs;
    std::map<std::string, int> significant;
    bool all_fitted = true;
    for (const auto& r : planted) {
      const auto& mc = r.coefficients.measures.at(0);
      all_fitted = all_fitted && mc.status == "ok";
      for (const auto& row : mc.rows) {
        if (!row.present) continue;
        mean_abs[row.feature] += std::abs(row.coefficient) / 5.0;
        significant[row.feature] += row.p_value < 0.05;
      }
    }
    bool ok = all_fitted;
    double min_driver = INFINITY, max_other = 0.0;
    std::string worst_other;
    for (const auto& f : drivers) {
      ok = ok && significant[f] == 5;
      min_driver = std::min(min_driver, mean_abs[f]);
    }
    for (const auto& [f, v] : mean_abs)
      if (std::find(drivers.begin(), drivers.end(), f) == drivers.end() && v > max_other) {
        max_other = v;
        worst_other = f;
      }
    ok = ok && max_other <= 0.5 * min_driver;
    std::string detail;
    for (const auto& f : drivers) detail += f + " " + std::to_string(significant[f]) + "/5 |b| " + num(mean_abs[f]) + "; ";
    report(8, ok, "coefficient recovery",
           detail + "largest other " + worst_other + " |b| " + num(max_other) + " vs bound " + num(0.5 * min_driver));
  }

  // determinism through the command-line tool, then nesting and leakage on its report
  const fs::path root = fs::temp_directory_path() / "streamgain_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cli = STREAMGAIN_CLI;
  write_text_file(root / "synth.conf", "seed = 11\nn_streamers = 600\nbehavior_effect = 0.8\n");
  write_text_file(root / "analysis.conf", "bootstrap = 20\n");
  bool cli_ok = true;
  for (int jobs : {1, 2}) {
    const std::string j = std::to_string(jobs);
    const auto data = root / ("data" + j), out = root / ("report" + j);
    cli_ok = cli_ok && run(cli + " synth --config " + (root / "synth.conf").string() + " --out " + data.string() +
                           " --jobs " + j) == 0;
    cli_ok = cli_ok && run(cli + " analyze --dataset " + data.string() + " --out " + out.string() + " --config " +
                           (root / "analysis.conf").string() + " --jobs " + j) == 0;
  }
  {
    bool ok = cli_ok;
    std::string detail = cli_ok ? "" : "command failed; ";
    if (cli_ok) {
      const bool data_same = read_text_file(root / "data1" / "manifest.txt") == read_text_file(root / "data2" / "manifest.txt");
      const bool report_same =
          read_text_file(root / "report1" / "manifest.txt") == read_text_file(root / "report2" / "manifest.txt");
      ok = data_same && report_same;
      detail = std::string("dataset manifests ") + (data_same ? "equal" : "differ") + ", report manifests " +
               (report_same ? "equal" : "differ") + " for --jobs 1 vs 2";
    }
    // criterion 11 is printed in order below
    std::size_t fitted = 0, violations = 0;
    for (const auto& runs : {&planted, &null_runs})
      for (const auto& r : *runs)
        for (const auto& c : r.cells)
          if (c.fitted) {
            ++fitted;
            violations += c.fit_curb.log_likelihood < c.fit_cur.log_likelihood;
          }
    if (cli_ok) {
      const Dataset ds = load_dataset(root / "data1");
      AnalysisConfig cfg;
      cfg.bootstrap = 20;
      for (const auto& c : run_analysis(ds, cfg).cells)
        if (c.fitted) {
          ++fitted;
          violations += c.fit_curb.log_likelihood < c.fit_cur.log_likelihood;
        }
    }
    report(9, cli_ok && fitted > 0 && violations == 0, "nesting",
           std::to_string(fitted) + " fitted cells, " + std::to_string(violations) + " with lower augmented log-likelihood");
    if (cli_ok) {
      const auto audit = audit_leakage(load_dataset(root / "data1"), root / "report1");
      report(10, audit.passed(), "leakage audit",
             std::to_string(audit.cutoff_tables) + " cutoff tables, " + std::to_string(audit.zscore_columns) +
                 " z-score columns over " + std::to_string(audit.zscore_cells) + " cells, " +
                 std::to_string(audit.mismatches.size()) + " mismatches");
    } else {
      report(10, false, "leakage audit", "no report to audit");
    }
    report(11, ok, "determinism", detail);
  }

  {
    const Dataset ds = generate(SynthConfig{});
    const int final_month = ds.streamers.front().last_month();
    const double share_final = population_stats(ds, final_month).measures[0].top_decile_share;
    const double share_12 = population_stats(ds, kHorizonMonths).measures[0].top_decile_share;
    std::size_t zero = 0;
    for (const auto& s : ds.streamers) zero += s.snapshots.back().cheers == 0;
    const double zero_frac = static_cast<double>(zero) / static_cast<double>(ds.streamers.size());
    const bool ok = share_final >= 0.7 && share_final <= 0.9 && share_12 >= 0.7 && share_12 <= 0.9 &&
                    zero_frac >= 0.4 && zero_frac <= 0.5;
    report(12, ok, "skew calibration",
           "top-decile follower share " + num(share_final) + " at month " + std::to_string(final_month) + ", " +
               num(share_12) + " at month 12; zero-cheer fraction " + num(zero_frac));
  }

  fs::remove_all(root);
  return failures == 0 ? 0 : 1;
}
