#pragma once

// Full analysis runs: configuration, execution of every experiment cell,
// the on-disk report bundle, and the leakage audit that re-derives the
// persisted training statistics.

#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "streamgain/dataset_io.hpp"
#include "streamgain/experiments.hpp"
#include "streamgain/kvconfig.hpp"
#include "streamgain/manifest.hpp"
#include "streamgain/svg.hpp"

namespace streamgain {

inline std::string_view to_string(GrowthMode m) {
  return m == GrowthMode::fractional ? "fractional" : "absolute_difference";
}

struct AnalysisConfig {
  std::vector<Task> tasks{kTasks.begin(), kTasks.end()};
  std::vector<Measure> measures{kMeasures.begin(), kMeasures.end()};
  std::vector<int> deltas{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  bool age_sweep = true;
  int age_delta = 2;
  bool coefficients = true;
  int coefficient_delta = 2;
  std::uint64_t split_seed = 1;
  double test_fraction = 0.2;
  CutoffMethod cutoff_method = CutoffMethod::argmax;
  GrowthMode growth_mode = GrowthMode::fractional;
  bool least_squares = false;
  int bootstrap = 200;
  std::string example_feature = "broadcast_len";
  int jobs = 1;  // never written to the report

  void validate() const {
    if (tasks.empty()) fail("config", "at least one task must be selected");
    if (measures.empty()) fail("config", "at least one measure must be selected");
    if (deltas.empty()) fail("config", "at least one delta must be selected");
    for (int d : deltas)
      if (d < 1 || d > kHorizonMonths - 1) fail("config", "delta must be in [1, 11], got " + std::to_string(d));
    for (int d : {age_delta, coefficient_delta})
      if (d < 1 || d > kHorizonMonths - 1) fail("config", "delta must be in [1, 11], got " + std::to_string(d));
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail("config", "test_fraction must be in (0,1)");
    if (bootstrap < 2) fail("config", "bootstrap needs at least 2 resamples");
    if (jobs < 1) fail("config", "jobs must be >= 1");
    if (!feature_index(example_feature)) fail("config", "unknown feature '" + example_feature + "'");
  }

  /// Task/measure pairs that define a cell; self_growth exists only for
  /// concurrent viewers.
  std::vector<std::pair<Task, Measure>> task_measures() const {
    std::vector<std::pair<Task, Measure>> out;
    for (Task t : tasks)
      for (Measure m : measures)
        if (t != Task::self_growth || m == Measure::concurrent_viewers) out.emplace_back(t, m);
    return out;
  }
};

namespace detail {

template <typename T, typename Parse>
std::vector<T> parse_items(const std::vector<std::string>& items, const char* what, Parse parse) {
  std::vector<T> out;
  for (const auto& s : items) {
    auto v = parse(s);
    if (!v) fail("config", std::string("unknown ") + what + " '" + s + "'");
    if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
  }
  return out;
}

inline std::vector<int> parse_ints(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (const auto& s : items) {
    KeyValueConfig kv = KeyValueConfig::parse("v = " + s);
    out.push_back(kv.get_int<int>("v", 0));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename T, typename Name>
std::string join(const std::vector<T>& v, Name name) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ',';
    s += name(x);
  }
  return s;
}

}  // namespace detail

inline std::vector<Task> parse_task_list(const std::vector<std::string>& items) {
  return detail::parse_items<Task>(items, "task", parse_task);
}
inline std::vector<Measure> parse_measure_list(const std::vector<std::string>& items) {
  return detail::parse_items<Measure>(items, "measure", parse_measure);
}
inline std::vector<int> parse_delta_list(const std::vector<std::string>& items) { return detail::parse_ints(items); }

inline std::optional<CutoffMethod> parse_cutoff_method(std::string_view s) {
  if (s == "argmax") return CutoffMethod::argmax;
  if (s == "median") return CutoffMethod::median;
  return std::nullopt;
}

inline std::optional<GrowthMode> parse_growth_mode(std::string_view s) {
  if (s == "fractional") return GrowthMode::fractional;
  if (s == "absolute_difference") return GrowthMode::absolute_difference;
  return std::nullopt;
}

/// Keys recognised in an analysis config file (and in runconfig.txt).
inline const std::set<std::string>& analysis_config_keys() {
  static const std::set<std::string> keys = {
      "tasks",         "measures",      "deltas",      "age_sweep",     "age_delta",
      "coefficients",  "coefficient_delta", "split_seed", "test_fraction", "cutoff_method",
      "growth_mode",   "least_squares", "bootstrap",   "example_feature", "jobs",
      "dataset_sha256"};
  return keys;
}

/// Overrides `cfg` with every key present in `kv`.
inline void apply_analysis_config(const KeyValueConfig& kv, AnalysisConfig& cfg) {
  kv.require_known(analysis_config_keys());
  if (kv.has("tasks")) cfg.tasks = parse_task_list(kv.get_list("tasks"));
  if (kv.has("measures")) cfg.measures = parse_measure_list(kv.get_list("measures"));
  if (kv.has("deltas")) cfg.deltas = parse_delta_list(kv.get_list("deltas"));
  cfg.age_sweep = kv.get_bool("age_sweep", cfg.age_sweep);
  cfg.age_delta = kv.get_int<int>("age_delta", cfg.age_delta);
  cfg.coefficients = kv.get_bool("coefficients", cfg.coefficients);
  cfg.coefficient_delta = kv.get_int<int>("coefficient_delta", cfg.coefficient_delta);
  cfg.split_seed = kv.get_int<std::uint64_t>("split_seed", cfg.split_seed);
  cfg.test_fraction = kv.get_double("test_fraction", cfg.test_fraction);
  if (kv.has("cutoff_method")) {
    auto m = parse_cutoff_method(kv.get_string("cutoff_method", ""));
    if (!m) fail("config", "cutoff_method must be argmax or median");
    cfg.cutoff_method = *m;
  }
  if (kv.has("growth_mode")) {
    auto m = parse_growth_mode(kv.get_string("growth_mode", ""));
    if (!m) fail("config", "growth_mode must be fractional or absolute_difference");
    cfg.growth_mode = *m;
  }
  cfg.least_squares = kv.get_bool("least_squares", cfg.least_squares);
  cfg.bootstrap = kv.get_int<int>("bootstrap", cfg.bootstrap);
  cfg.example_feature = kv.get_string("example_feature", cfg.example_feature);
  cfg.jobs = kv.get_int<int>("jobs", cfg.jobs);
}

/// Resolved configuration in `key = value` form. The worker count is left
/// out: it must not change any output.
inline std::string analysis_config_text(const AnalysisConfig& c, const std::string& dataset_hash) {
  std::ostringstream os;
  auto str = [](auto v) { return std::string(to_string(v)); };
  os << "dataset_sha256 = " << dataset_hash << '\n'
     << "tasks = " << detail::join(c.tasks, str) << '\n'
     << "measures = " << detail::join(c.measures, str) << '\n'
     << "deltas = " << detail::join(c.deltas, [](int d) { return std::to_string(d); }) << '\n'
     << "age_sweep = " << (c.age_sweep ? "true" : "false") << '\n'
     << "age_delta = " << c.age_delta << '\n'
     << "coefficients = " << (c.coefficients ? "true" : "false") << '\n'
     << "coefficient_delta = " << c.coefficient_delta << '\n'
     << "split_seed = " << c.split_seed << '\n'
     << "test_fraction = " << format_number(c.test_fraction) << '\n'
     << "cutoff_method = " << to_string(c.cutoff_method) << '\n'
     << "growth_mode = " << to_string(c.growth_mode) << '\n'
     << "least_squares = " << (c.least_squares ? "true" : "false") << '\n'
     << "bootstrap = " << c.bootstrap << '\n'
     << "example_feature = " << c.example_feature << '\n';
  return os.str();
}

/// Content hash of the dataset files, independent of where they live.
inline std::string dataset_hash(const std::filesystem::path& dir) {
  std::string all;
  for (const char* f : {"streamers.jsonl", "broadcasts.jsonl", "posts.jsonl", "games.csv"})
    all += sha256_hex(read_text_file(dir / f)) + "  " + f + "\n";
  return sha256_hex(all);
}

struct CutoffExample {
  CutoffKey key;
  std::string feature;
  Cutoff cutoff;
  std::vector<double> popular, unpopular;  // training streamers' raw values
};

struct AnalysisResult {
  AnalysisConfig config;
  std::vector<std::uint8_t> test_mask;
  std::vector<CellResult> cells;  // interval cells, then age cells, then coefficient-only cells
  std::vector<AucCurve> interval_curves;
  std::vector<AucCurve> age_curves;
  std::optional<CoefficientTable> coefficients;
  EffortReport effort;
  TimingReport timing;
  PopulationReport population;
  std::map<CutoffKey, CutoffTable> cutoff_tables;
  std::set<CutoffKey> degenerate_cutoffs;
  std::optional<CutoffExample> cutoff_example;
};

inline AnalysisResult run_analysis(const Dataset& ds, const AnalysisConfig& cfg) {
  cfg.validate();
  AnalysisResult res;
  res.config = cfg;
  res.test_mask = split_streamers(ds.streamers.size(), cfg.split_seed, cfg.test_fraction);
  ExperimentContext ctx(ds, res.test_mask, cfg.cutoff_method, cfg.jobs);
  CellOptions opt{cfg.growth_mode, cfg.least_squares, cfg.bootstrap, cfg.split_seed};

  std::vector<CellKey> keys;
  std::vector<std::pair<std::size_t, std::size_t>> interval_spans, age_spans;
  for (auto [task, measure] : cfg.task_measures()) {
    const auto k = interval_sweep_cells(task, measure, cfg.deltas);
    interval_spans.emplace_back(keys.size(), k.size());
    keys.insert(keys.end(), k.begin(), k.end());
  }
  if (cfg.age_sweep)
    for (auto [task, measure] : cfg.task_measures()) {
      const auto k = age_sweep_cells(task, measure, cfg.age_delta);
      age_spans.emplace_back(keys.size(), k.size());
      keys.insert(keys.end(), k.begin(), k.end());
    }
  std::vector<std::size_t> coefficient_cells;
  if (cfg.coefficients)
    for (Measure m : cfg.measures) {
      const CellKey k{Task::relative_growth, m, cfg.coefficient_delta, Sweep::interval, 0};
      auto it = std::find(keys.begin(), keys.end(), k);
      coefficient_cells.push_back(static_cast<std::size_t>(it - keys.begin()));
      if (it == keys.end()) keys.push_back(k);
    }

  const CutoffKey example_key{cfg.measures.front(), 1, cfg.coefficient_delta};
  ctx.prepare_cutoffs({example_key});
  res.cells = run_cells(ctx, keys, opt);

  auto curves = [&](const std::vector<std::pair<std::size_t, std::size_t>>& spans, Sweep sweep) {
    std::vector<AucCurve> out;
    for (auto [begin, n] : spans) {
      AucCurve c{keys[begin].task, keys[begin].measure, sweep, {}};
      c.points.assign(res.cells.begin() + static_cast<std::ptrdiff_t>(begin),
                      res.cells.begin() + static_cast<std::ptrdiff_t>(begin + n));
      out.push_back(std::move(c));
    }
    return out;
  };
  res.interval_curves = curves(interval_spans, Sweep::interval);
  res.age_curves = curves(age_spans, Sweep::age);

  if (cfg.coefficients) {
    CoefficientTable table{cfg.coefficient_delta, {}};
    table.measures.resize(coefficient_cells.size());
    const ExperimentContext& shared = ctx;
    parallel_for(coefficient_cells.size(), cfg.jobs, [&](std::size_t i) {
      table.measures[i] = coefficients_for_cell(shared, res.cells[coefficient_cells[i]], opt);
    });
    res.coefficients = std::move(table);
  }

  {
    CutoffExample ex;
    ex.key = example_key;
    ex.feature = cfg.example_feature;
    const auto f = *feature_index(cfg.example_feature);
    ex.cutoff = ctx.cutoffs(example_key.measure, example_key.t, example_key.delta).at(f);
    std::vector<double> values;
    std::vector<std::size_t> who;
    for (std::size_t i = 0; i < ds.streamers.size(); ++i) {
      const auto* raw = ctx.features(i, example_key.t, example_key.delta);
      if (ctx.is_test(i) || !raw) continue;
      values.push_back(ds.streamers[i].snapshot_at(example_key.t + example_key.delta)->value(example_key.measure));
      who.push_back(i);
    }
    if (!values.empty()) {
      const auto mask = popular_mask(values);
      for (std::size_t k = 0; k < who.size(); ++k)
        (mask[k] ? ex.popular : ex.unpopular).push_back((*ctx.features(who[k], example_key.t, example_key.delta))[f]);
      res.cutoff_example = std::move(ex);
    }
  }

  res.effort = effort_analysis(ds);
  res.timing = social_timing_analysis(ds);
  res.population = population_stats(ds);
  res.cutoff_tables = ctx.cutoff_tables();
  res.degenerate_cutoffs = ctx.degenerate_cutoffs();
  return res;
}

// ---------------------------------------------------------------------------
// Report files

namespace detail {

inline std::string num(double v) { return format_number(v); }
inline std::string boolstr(bool b) { return b ? "1" : "0"; }

inline std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  CsvWriter w(os);
  for (const auto& r : rows) w.row(r);
  return os.str();
}

inline svg::Series empirical_ccdf(std::string name, std::vector<double> v) {
  svg::Series s{std::move(name), {}, {}, {}, true};
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    s.x.push_back(v[i]);
    s.y.push_back(static_cast<double>(v.size() - i) / static_cast<double>(v.size()));
  }
  return s;
}

inline svg::Series empirical_cdf(std::string name, std::vector<double> v) {
  svg::Series s{std::move(name), {}, {}, {}, true};
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i] == v[i + 1]) continue;
    s.x.push_back(v[i]);
    s.y.push_back(static_cast<double>(i + 1) / static_cast<double>(v.size()));
  }
  return s;
}

inline std::vector<std::string> test_row(const GroupTest& g) {
  const bool ok = g.status == "ok";
  return {g.group, std::string(to_string(g.measure)), g.status, std::to_string(g.n_a), std::to_string(g.n_b),
          num(g.mean_a), num(g.mean_b), ok ? num(g.result.t) : "nan", ok ? num(g.result.df) : "nan",
          ok ? num(g.result.p_value) : "nan"};
}

inline std::vector<std::string> test_header() {
  return {"group", "measure", "status", "n_a", "n_b", "mean_a", "mean_b", "t", "df", "p_value"};
}

inline void write_curve_chart(const std::filesystem::path& path, const AucCurve& c) {
  svg::LineChart chart;
  chart.title = std::string(to_string(c.task)) + " / " + std::string(to_string(c.measure)) +
                (c.sweep == Sweep::interval ? ": pooled intervals" : ": by start age");
  chart.x_label = c.sweep == Sweep::interval ? "interval length delta (months)" : "start age t (months)";
  chart.y_label = "test AUC";
  svg::Series cur{"F_cur", {}, {}, {}, false}, curb{"F_cur+b", {}, {}, {}, false};
  for (const auto& p : c.points) {
    if (!p.ok()) continue;
    cur.x.push_back(p.key.x());
    cur.y.push_back(p.auc_cur);
    cur.err.push_back(p.se_cur);
    curb.x.push_back(p.key.x());
    curb.y.push_back(p.auc_curb);
    curb.err.push_back(p.se_curb);
  }
  chart.series = {cur, curb};
  write_text_file(path, svg::render(chart));
}

}  // namespace detail

/// Writes the report bundle into `out` (runconfig.txt and manifest.txt are
/// the caller's).
inline void write_report(const AnalysisResult& r, const Dataset& ds, const std::filesystem::path& out) {
  using detail::num;
  using detail::boolstr;
  namespace fs = std::filesystem;
  fs::create_directories(out);
  auto csv = [&](const fs::path& rel, const std::vector<std::vector<std::string>>& rows) {
    write_text_file(out / rel, detail::csv_text(rows));
  };

  // AUC curves and skipped cells
  {
    std::vector<std::vector<std::string>> rows{{"cell", "task", "measure", "sweep", "x", "delta", "age", "status",
                                                "n_train", "n_test", "auc_cur", "se_cur", "auc_curb", "se_curb",
                                                "gain"}};
    std::vector<std::vector<std::string>> skipped{{"cell", "status", "reason"}};
    for (const auto* curves : {&r.interval_curves, &r.age_curves})
      for (const auto& c : *curves)
        for (const auto& p : c.points)
          rows.push_back({p.key.name(), std::string(to_string(p.key.task)), std::string(to_string(p.key.measure)),
                          std::string(to_string(p.key.sweep)), std::to_string(p.key.x()), std::to_string(p.key.delta),
                          std::to_string(p.key.age), p.status, std::to_string(p.n_train), std::to_string(p.n_test),
                          num(p.auc_cur), num(p.se_cur), num(p.auc_curb), num(p.se_curb), num(p.gain())});
    for (const auto& p : r.cells)
      if (!p.ok()) skipped.push_back({p.key.name(), p.status, p.reason});
    csv("auc_curves.csv", rows);
    csv("skipped.csv", skipped);
  }

  // coefficient table
  if (r.coefficients) {
    std::vector<std::vector<std::string>> rows{{"measure", "feature", "present", "coefficient", "std_err", "p_value",
                                                "stars", "dropped_in_recheck", "recheck_coefficient",
                                                "recheck_p_value", "recheck_stars"}};
    std::vector<std::vector<std::string>> pairs{{"measure", "feature_a", "feature_b", "correlation"}};
    std::vector<std::vector<std::string>> status{{"measure", "delta", "status", "n_train", "stars_stable", "reason"}};
    for (const auto& mc : r.coefficients->measures) {
      const std::string m(to_string(mc.measure));
      for (const auto& row : mc.rows)
        rows.push_back({m, row.feature, boolstr(row.present), num(row.coefficient), num(row.std_err),
                        num(row.p_value), row.stars, boolstr(row.dropped_in_recheck), num(row.recheck_coefficient),
                        num(row.recheck_p_value), row.recheck_stars});
      for (const auto& p : mc.pairs) pairs.push_back({m, p.a, p.b, num(p.correlation)});
      status.push_back({m, std::to_string(r.coefficients->delta), mc.status, std::to_string(mc.n_train),
                        boolstr(mc.stars_stable), mc.reason});
    }
    csv("coefficients.csv", rows);
    csv("collinearity.csv", pairs);
    csv("coefficient_status.csv", status);
  }

  // effort
  {
    std::vector<std::vector<std::string>> rows{
        {"streamer", "months", "mean_monthly_hours", "affiliate", "full_time", "zero_viewer_fraction"}};
    for (const auto& e : r.effort.streamers)
      rows.push_back({ds.streamers[e.streamer].id.value, std::to_string(e.monthly_hours.size()),
                      num(e.mean_monthly_hours), boolstr(e.affiliate), boolstr(e.full_time),
                      e.zero_viewer_fraction ? num(*e.zero_viewer_fraction) : ""});
    csv("effort.csv", rows);
    csv("effort_summary.csv", {{"metric", "value"},
                               {"streamers", std::to_string(r.effort.streamers.size())},
                               {"affiliate_fraction", num(r.effort.affiliate_fraction)},
                               {"full_time_fraction", num(r.effort.full_time_fraction)},
                               {"month_affiliate_fraction", num(r.effort.month_affiliate_fraction)},
                               {"month_full_time_fraction", num(r.effort.month_full_time_fraction)},
                               {"over_quarter_empty_fraction", num(r.effort.over_quarter_empty_fraction)}});
    std::vector<std::vector<std::string>> tests{detail::test_header()};
    for (const auto& g : r.effort.tests) tests.push_back(detail::test_row(g));
    csv("effort_tests.csv", tests);
  }

  // social account timing
  {
    std::vector<std::vector<std::string>> rows{{"platform", "offset_months", "n", "mean_peak_followers",
                                                "se_peak_followers", "mean_peak_ccv", "se_peak_ccv"}};
    for (const auto& g : r.timing.groups)
      rows.push_back({std::string(to_string(g.platform)), std::to_string(g.offset), std::to_string(g.n),
                      num(g.mean_followers), num(g.se_followers), num(g.mean_ccv), num(g.se_ccv)});
    csv("timing.csv", rows);
    std::vector<std::vector<std::string>> tests{detail::test_header()};
    for (const auto& g : r.timing.tests) tests.push_back(detail::test_row(g));
    csv("timing_tests.csv", tests);
  }

  // population
  {
    std::vector<std::vector<std::string>> rows{{"measure", "month", "n", "top_decile_share"}};
    std::vector<std::vector<std::string>> share{{"measure", "top_percent", "share"}};
    std::vector<std::vector<std::string>> ccdf{{"measure", "age", "threshold", "fraction_at_least"}};
    for (const auto& mp : r.population.measures) {
      const std::string m(to_string(mp.measure));
      rows.push_back({m, std::to_string(r.population.month), std::to_string(mp.n), num(mp.top_decile_share)});
      for (std::size_t k = 0; k < mp.share_curve.size(); ++k)
        share.push_back({m, std::to_string(k + 1), num(mp.share_curve[k])});
      for (const auto& t : mp.ccdf)
        for (std::size_t k = 0; k < t.threshold.size(); ++k)
          ccdf.push_back({m, std::to_string(t.age), num(t.threshold[k]), num(t.fraction[k])});
    }
    csv("population.csv", rows);
    csv("population_share.csv", share);
    csv("population_ccdf.csv", ccdf);
  }

  // training statistics
  for (const auto& [key, table] : r.cutoff_tables) write_text_file(out / "cutoffs" / cutoff_file_name(key), cutoff_table_csv(table));
  {
    std::vector<std::vector<std::string>> deg{{"file"}};
    for (const auto& k : r.degenerate_cutoffs) deg.push_back({cutoff_file_name(k)});
    csv("fitted/degenerate_cutoffs.csv", deg);
    std::vector<std::vector<std::string>> split{{"streamer", "test"}};
    for (std::size_t i = 0; i < ds.streamers.size(); ++i)
      split.push_back({ds.streamers[i].id.value, boolstr(r.test_mask[i] != 0)});
    csv("fitted/split.csv", split);
    std::vector<std::vector<std::string>> z{{"cell", "column", "mean", "sd"}};
    std::vector<std::vector<std::string>> dropped{{"cell", "column"}};
    std::set<std::string> seen;
    for (const auto& c : r.cells) {
      if (!c.has_standardization || !seen.insert(c.key.name()).second) continue;
      for (const auto& s : c.standardization.scales) z.push_back({c.key.name(), s.column, num(s.mean), num(s.sd)});
      for (const auto& d : c.standardization.dropped) dropped.push_back({c.key.name(), d});
    }
    csv("fitted/zscore.csv", z);
    csv("fitted/dropped_columns.csv", dropped);
  }

  // fitted models
  {
    std::set<std::string> seen;
    for (const auto& c : r.cells) {
      if (!c.fitted || !seen.insert(c.key.name()).second) continue;
      for (const auto* fit : {&c.fit_cur, &c.fit_curb}) {
        std::vector<double> p;
        if (fit->converged) {
          try {
            p = coef_t_test(*fit);
          } catch (const Error&) {
            p.clear();
          }
        }
        write_text_file(out / "fits" / (c.key.name() + (fit == &c.fit_cur ? ".cur.csv" : ".curb.csv")),
                        model_fit_csv(*fit, p));
      }
    }
  }

  // charts
  const fs::path charts = out / "charts";
  {
    svg::LineChart share{"Share of the total held by the top streamers", "top percent of streamers",
                         "share of total", false, {}, {}};
    for (const auto& mp : r.population.measures) {
      svg::Series s{std::string(to_string(mp.measure)), {}, mp.share_curve, {}, false};
      for (std::size_t k = 0; k < mp.share_curve.size(); ++k) s.x.push_back(static_cast<double>(k + 1));
      share.series.push_back(std::move(s));
    }
    share.vertical_markers.push_back({"top 10%", 10.0});
    write_text_file(charts / "population_share.svg", svg::render(share));

    for (const auto& mp : r.population.measures) {
      svg::LineChart chart{"CCDF of " + std::string(to_string(mp.measure)) + " by account age",
                           std::string(to_string(mp.measure)), "fraction of streamers at or above", true, {}, {}};
      for (const auto& t : mp.ccdf) {
        if (t.age == 0 || (t.age != 1 && t.age % 3 != 0)) continue;
        chart.series.push_back({"age " + std::to_string(t.age), t.threshold, t.fraction, {}, true});
      }
      write_text_file(charts / ("ccdf_" + std::string(to_string(mp.measure)) + ".svg"), svg::render(chart));
    }
  }
  if (r.cutoff_example) {
    const auto& ex = *r.cutoff_example;
    svg::LineChart chart{"Cutoff for " + ex.feature + " (" + std::string(to_string(ex.key.measure)) + ", t=" +
                             std::to_string(ex.key.t) + ", delta=" + std::to_string(ex.key.delta) + ")",
                         ex.feature, "fraction of streamers above", false, {}, {}};
    chart.series = {detail::empirical_ccdf("popular", ex.popular), detail::empirical_ccdf("unpopular", ex.unpopular)};
    chart.vertical_markers.push_back({"C_f", ex.cutoff.c_f});
    write_text_file(charts / "cutoff_example.svg", svg::render(chart));
  }
  for (const auto& c : r.interval_curves)
    detail::write_curve_chart(charts / ("auc_interval_" + std::string(to_string(c.task)) + "_" +
                                        std::string(to_string(c.measure)) + ".svg"),
                              c);
  for (const auto& c : r.age_curves)
    detail::write_curve_chart(
        charts / ("auc_age_" + std::string(to_string(c.task)) + "_" + std::string(to_string(c.measure)) + ".svg"), c);
  {
    std::vector<svg::BoxStats> boxes;
    for (int m = 0; m < kHorizonMonths; ++m) {
      std::vector<double> h;
      for (const auto& e : r.effort.streamers)
        if (static_cast<std::size_t>(m) < e.monthly_hours.size()) h.push_back(e.monthly_hours[static_cast<std::size_t>(m)]);
      if (!h.empty()) boxes.push_back(svg::box_stats("m" + std::to_string(m), h));
    }
    write_text_file(charts / "effort_hours.svg",
                    svg::render_boxes("Monthly broadcast hours by account age", "account age (months)",
                                      "hours broadcast in the month", boxes));
    std::vector<double> empty;
    for (const auto& e : r.effort.streamers)
      if (e.zero_viewer_fraction) empty.push_back(*e.zero_viewer_fraction);
    svg::LineChart chart{"Broadcasts without an audience", "fraction of a streamer's broadcasts with zero viewers",
                         "cumulative fraction of streamers", false, {detail::empirical_cdf("streamers", empty)}, {}};
    chart.vertical_markers.push_back({"25%", 0.25});
    write_text_file(charts / "empty_broadcasts.svg", svg::render(chart));
  }
  for (Measure m : {Measure::followers, Measure::concurrent_viewers}) {
    svg::LineChart chart{"Peak first-year " + std::string(to_string(m)) + " by social account timing",
                         "platform account created, months after the Twitch account", "mean peak (1 s.e.)", false, {},
                         {}};
    for (Platform p : kPlatforms) {
      svg::Series s{std::string(to_string(p)), {}, {}, {}, false};
      for (const auto& g : r.timing.groups) {
        if (g.platform != p) continue;
        s.x.push_back(g.offset);
        s.y.push_back(m == Measure::followers ? g.mean_followers : g.mean_ccv);
        s.err.push_back(m == Measure::followers ? g.se_followers : g.se_ccv);
      }
      chart.series.push_back(std::move(s));
    }
    chart.vertical_markers.push_back({"Twitch account", 0.0});
    write_text_file(charts / ("timing_" + std::string(to_string(m)) + ".svg"), svg::render(chart));
  }

  // one-screen summary
  {
    std::size_t ok = 0;
    for (const auto& c : r.cells) ok += c.ok();
    std::ostringstream os;
    os << "streamers = " << ds.streamers.size() << '\n'
       << "test_streamers = " << std::count(r.test_mask.begin(), r.test_mask.end(), 1) << '\n'
       << "cells = " << r.cells.size() << '\n'
       << "cells_ok = " << ok << '\n'
       << "cells_skipped = " << r.cells.size() - ok << '\n'
       << "cutoff_tables = " << r.cutoff_tables.size() << '\n'
       << "degenerate_cutoff_tables = " << r.degenerate_cutoffs.size() << '\n';
    for (const auto& mp : r.population.measures)
      os << "top_decile_share." << to_string(mp.measure) << " = " << num(mp.top_decile_share) << '\n';
    write_text_file(out / "summary.txt", os.str());
  }
}

// ---------------------------------------------------------------------------
// Leakage audit

struct LeakageAudit {
  std::size_t cutoff_tables = 0;
  std::size_t zscore_cells = 0;
  std::size_t zscore_columns = 0;
  std::vector<std::string> mismatches;
  bool passed() const { return mismatches.empty() && cutoff_tables > 0; }
};

/// Rebuilds every training statistic in a report from the training streamers
/// alone (test streamers removed from the dataset) and compares it bit for bit
/// with the persisted files.
inline LeakageAudit audit_leakage(const Dataset& ds, const std::filesystem::path& report, int jobs = 1) {
  namespace fs = std::filesystem;
  LeakageAudit audit;
  const auto kv = KeyValueConfig::load(report / "runconfig.txt");
  AnalysisConfig cfg;
  apply_analysis_config(kv, cfg);

  std::map<std::string, bool> is_test;
  {
    std::istringstream in(read_text_file(report / "fitted" / "split.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
      if (!line.empty()) {
        auto f = split_csv_line(line);
        if (f.size() != 2) fail("audit", "split.csv: bad row '" + line + "'");
        is_test[f[0]] = f[1] == "1";
      }
  }
  Dataset train;
  train.game_table = ds.game_table;
  for (const auto& s : ds.streamers) {
    auto it = is_test.find(s.id.value);
    if (it == is_test.end()) fail("audit", "streamer " + s.id.value + " missing from split.csv");
    if (!it->second) train.streamers.push_back(s);
  }
  ExperimentContext ctx(train, std::vector<std::uint8_t>(train.streamers.size(), 0), cfg.cutoff_method, jobs);

  static const std::regex name_re(R"(([a-z_]+)_t(\d+)_d(\d+)\.csv)");
  std::vector<std::pair<CutoffKey, CutoffTable>> persisted;
  if (fs::exists(report / "cutoffs"))
    for (const auto& e : fs::directory_iterator(report / "cutoffs")) {
      std::smatch m;
      const auto name = e.path().filename().string();
      if (!std::regex_match(name, m, name_re)) fail("audit", "unexpected cutoff file " + name);
      const int t = std::stoi(m[2].str()), d = std::stoi(m[3].str());
      auto table = parse_cutoff_table_csv(read_text_file(e.path()), t, d);
      persisted.push_back({{table.measure, t, d}, table});
    }
  std::sort(persisted.begin(), persisted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::set<CutoffKey> keys;
  for (const auto& p : persisted) keys.insert(p.first);
  ctx.prepare_cutoffs(keys);
  for (const auto& [key, table] : persisted) {
    ++audit.cutoff_tables;
    if (!(ctx.cutoffs(key.measure, key.t, key.delta) == table))
      audit.mismatches.push_back("cutoffs/" + cutoff_file_name(key));
  }

  std::map<std::string, std::vector<ColumnScale>> scales;
  {
    std::istringstream in(read_text_file(report / "fitted" / "zscore.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
      if (!line.empty()) {
        auto f = split_csv_line(line);
        if (f.size() != 4) fail("audit", "zscore.csv: bad row '" + line + "'");
        scales[f[0]].push_back({f[1], parse_number(f[2]), parse_number(f[3])});
      }
  }
  std::vector<std::string> names;
  std::vector<CellKey> cells;
  for (const auto& [name, v] : scales) {
    names.push_back(name);
    cells.push_back(CellKey::parse(name));
  }
  ctx.prepare(cells);
  std::vector<std::string> bad(cells.size());
  const ExperimentContext& shared = ctx;
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const auto data = collect_cell_rows(shared, cells[i], cfg.growth_mode);
    const auto st = fit_standardization(data.columns, data.train);
    const auto& want = scales.at(names[i]);
    if (st.scales.size() != want.size()) {
      bad[i] = names[i] + ": column set differs";
      return;
    }
    for (std::size_t k = 0; k < want.size(); ++k)
      if (st.scales[k].column != want[k].column || st.scales[k].mean != want[k].mean || st.scales[k].sd != want[k].sd) {
        bad[i] = names[i] + ": " + want[k].column;
        return;
      }
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ++audit.zscore_cells;
    audit.zscore_columns += scales.at(names[i]).size();
    if (!bad[i].empty()) audit.mismatches.push_back("fitted/zscore.csv " + bad[i]);
  }
  return audit;
}

}  // namespace streamgain
