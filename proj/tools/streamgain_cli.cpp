// streamgain: synthesize, validate and analyze streamer growth datasets.
//
// Every failure prints a single line `error <kind>: <message>` on stderr and
// exits with status 1. Usage errors exit with status 2.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamgain/streamgain.hpp"

namespace fs = std::filesystem;
using namespace streamgain;

namespace {

void prepare_output(const fs::path& out, bool overwrite) {
  if (fs::exists(out) && !fs::is_directory(out)) fail("io", out.string() + " exists and is not a directory");
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!overwrite) fail("io", "output directory " + out.string() + " is not empty (use --overwrite)");
    fs::remove_all(out);
  }
  fs::create_directories(out);
}

int cmd_synth(const fs::path& config, const fs::path& out, int jobs, bool overwrite) {
  const SynthConfig c = synth_config_from(KeyValueConfig::load(config));
  const Dataset ds = generate(c, jobs);
  prepare_output(out, overwrite);
  save_dataset(ds, out);
  write_text_file(out / "runconfig.txt", synth_config_text(c));
  write_text_file(out / "manifest.txt", build_manifest(out));
  std::cout << "wrote " << ds.streamers.size() << " streamers to " << out.string() << " (seed " << c.seed << ")\n";
  return 0;
}

int cmd_validate(const fs::path& dataset) {
  const Dataset ds = load_dataset(dataset);
  std::size_t broadcasts = 0, posts = 0;
  for (const auto& s : ds.streamers) {
    broadcasts += s.broadcasts.size();
    posts += s.posts.size();
  }
  std::cout << "ok streamers=" << ds.streamers.size() << " broadcasts=" << broadcasts << " posts=" << posts
            << " game_months=" << ds.game_table.views().size() << '\n';
  return 0;
}

int cmd_features(const fs::path& dataset, int t, int delta, const fs::path& out) {
  if (t < 0 || delta < 1 || t + delta > kHorizonMonths) fail("config", "window must satisfy t >= 0, delta >= 1, t + delta <= 12");
  const Dataset ds = load_dataset(dataset);
  std::ostringstream os;
  os << feature_csv_header() << '\n';
  std::size_t rows = 0;
  for (const auto& s : ds.streamers) {
    if (s.last_month() < t + delta) continue;
    const auto f = compute_features(s, t, delta, ds.game_table);
    os << s.id.value << ',' << t << ',' << delta;
    for (double v : f.values) os << ',' << format_number(v);
    os << '\n';
    ++rows;
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    write_text_file(out, os.str());
    std::cerr << "wrote " << rows << " rows to " << out.string() << '\n';
  }
  return 0;
}

struct AnalyzeFlags {
  fs::path dataset, out, config;
  std::vector<std::string> tasks, measures, deltas;
  std::uint64_t split_seed = 1;
  std::string cutoff_method;
  int jobs = 1;
  bool least_squares = false;
  bool overwrite = false;
};

int cmd_analyze(const AnalyzeFlags& f) {
  // defaults, then command-line flags, then the config file
  AnalysisConfig cfg;
  if (!f.tasks.empty()) cfg.tasks = parse_task_list(f.tasks);
  if (!f.measures.empty()) cfg.measures = parse_measure_list(f.measures);
  if (!f.deltas.empty()) cfg.deltas = parse_delta_list(f.deltas);
  cfg.split_seed = f.split_seed;
  if (!f.cutoff_method.empty()) {
    auto m = parse_cutoff_method(f.cutoff_method);
    if (!m) fail("config", "cutoff method must be argmax or median");
    cfg.cutoff_method = *m;
  }
  cfg.least_squares = f.least_squares;
  cfg.jobs = f.jobs;
  if (!f.config.empty()) apply_analysis_config(KeyValueConfig::load(f.config), cfg);
  cfg.validate();

  const Dataset ds = load_dataset(f.dataset);
  const std::string hash = dataset_hash(f.dataset);
  prepare_output(f.out, f.overwrite);
  const AnalysisResult result = run_analysis(ds, cfg);
  write_report(result, ds, f.out);
  write_text_file(f.out / "runconfig.txt", analysis_config_text(cfg, hash));
  write_text_file(f.out / "manifest.txt", build_manifest(f.out));

  std::size_t ok = 0;
  for (const auto& c : result.cells) ok += c.ok();
  std::cout << "cells=" << result.cells.size() << " ok=" << ok << " skipped=" << result.cells.size() - ok
            << " report=" << f.out.string() << '\n';
  return 0;
}

int cmd_audit(const fs::path& dataset, const fs::path& report, int jobs) {
  const Dataset ds = load_dataset(dataset);
  const auto audit = audit_leakage(ds, report, jobs);
  for (const auto& m : audit.mismatches) std::cout << "mismatch " << m << '\n';
  std::cout << (audit.passed() ? "PASS" : "FAIL") << " cutoff_tables=" << audit.cutoff_tables
            << " zscore_cells=" << audit.zscore_cells << " zscore_columns=" << audit.zscore_columns << '\n';
  return audit.passed() ? 0 : 1;
}

int cmd_oracle(std::uint64_t seed) {
  bool all = true;
  for (const auto& r : oracle::run_suite(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior and popularity growth analysis for live streamers"};
  app.require_subcommand(1);

  fs::path synth_config, synth_out;
  int synth_jobs = 1;
  bool synth_overwrite = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from a key-value config");
  synth->add_option("--config", synth_config, "Generator config file")->required();
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--jobs", synth_jobs, "Worker threads")->check(CLI::PositiveNumber);
  synth->add_flag("--overwrite", synth_overwrite, "Replace a non-empty output directory");

  fs::path validate_dataset;
  auto* validate = app.add_subcommand("validate", "Load a dataset and check every record");
  validate->add_option("--dataset", validate_dataset, "Dataset directory")->required();

  fs::path features_dataset, features_out;
  int features_t = 0, features_delta = 1;
  auto* features = app.add_subcommand("features", "Write the 24 window features per streamer as CSV");
  features->add_option("--dataset", features_dataset, "Dataset directory")->required();
  features->add_option("--t", features_t, "Window start age in months")->required();
  features->add_option("--delta", features_delta, "Window length in months")->required();
  features->add_option("--out", features_out, "Output CSV (stdout when omitted)");

  AnalyzeFlags af;
  auto* analyze = app.add_subcommand("analyze", "Run the growth experiments and write a report bundle");
  analyze->add_option("--dataset", af.dataset, "Dataset directory")->required();
  analyze->add_option("--out", af.out, "Report directory")->required();
  analyze->add_option("--task", af.tasks, "absolute, relative_growth, self_growth (repeatable or comma list)")
      ->delimiter(',');
  analyze->add_option("--measure", af.measures, "followers, concurrent_viewers, views, cheers")->delimiter(',');
  analyze->add_option("--delta", af.deltas, "Interval lengths in months for the interval sweep")->delimiter(',');
  analyze->add_option("--split-seed", af.split_seed, "Seed of the train/test split");
  analyze->add_option("--cutoff-method", af.cutoff_method, "argmax or median");
  analyze->add_option("--jobs", af.jobs, "Worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
  analyze->add_option("--config", af.config, "Key-value config; its keys override the flags above");
  analyze->add_flag("--least-squares", af.least_squares, "Fit squared-error models instead of logistic ones");
  analyze->add_flag("--overwrite", af.overwrite, "Replace a non-empty report directory");

  fs::path audit_dataset, audit_report;
  int audit_jobs = 1;
  auto* audit = app.add_subcommand("audit", "Re-derive a report's training statistics from training streamers only");
  audit->add_option("--dataset", audit_dataset, "Dataset directory")->required();
  audit->add_option("--report", audit_report, "Report directory written by analyze")->required();
  audit->add_option("--jobs", audit_jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::uint64_t oracle_seed = 1;
  auto* oracle_cmd = app.add_subcommand("oracle", "Run the built-in reference checks");
  oracle_cmd->add_option("--seed", oracle_seed, "Seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*synth) return cmd_synth(synth_config, synth_out, synth_jobs, synth_overwrite);
    if (*validate) return cmd_validate(validate_dataset);
    if (*features) return cmd_features(features_dataset, features_t, features_delta, features_out);
    if (*analyze) return cmd_analyze(af);
    if (*audit) return cmd_audit(audit_dataset, audit_report, audit_jobs);
    if (*oracle_cmd) return cmd_oracle(oracle_seed);
  } catch (const Error& e) {
    std::cerr << "error " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
