#pragma once

// Paired baseline / behavior model experiments over account-age windows, and
// the descriptive analyses that accompany them.
//
// Instances. A row for streamer u at start age t holds, for every popularity
// measure, log1p of the snapshot values at ages t, t-1, ..., 1 (padded with
// the age-1 value when rows of several ages are pooled), the age t itself,
// one flag per third-party account existing by age t, and for each of the 24
// features the number of past one-month windows [s, s+1), s < t, in which the
// streamer's feature bit was set. The behavior model appends the 24 bits over
// [t, t+delta). Continuous columns are z-scored with training-row statistics;
// columns constant on the training rows are dropped from both models.
//
// Fitted statistics. Cutoffs for window (measure, t, delta) are fitted on
// training streamers only, with "popular" meaning the top decile of the
// measure at age t+delta. Label medians use the whole population.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>

#include "streamgain/binarize.hpp"
#include "streamgain/core_data.hpp"
#include "streamgain/csv.hpp"
#include "streamgain/features.hpp"
#include "streamgain/glm.hpp"
#include "streamgain/labels.hpp"
#include "streamgain/parallel.hpp"
#include "streamgain/seeds.hpp"

namespace streamgain {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// 1 marks a test streamer. The split is drawn once over all streamers.
inline std::vector<std::uint8_t> split_streamers(std::size_t n, std::uint64_t split_seed, double test_fraction = 0.2) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail("config", "test_fraction must be in (0,1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(split_seed, fnv1a("split")));
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[boost::random::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n >= 2) n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t i = 0; i < n_test && i < n; ++i) mask[order[i]] = 1;
  return mask;
}

struct WindowKey {
  int t = 0;
  int delta = 1;
  auto operator<=>(const WindowKey&) const = default;
};

struct CutoffKey {
  Measure measure = Measure::followers;
  int t = 0;
  int delta = 1;
  auto operator<=>(const CutoffKey&) const = default;
};

inline std::string cutoff_file_name(const CutoffKey& k) {
  return std::string(to_string(k.measure)) + "_t" + std::to_string(k.t) + "_d" + std::to_string(k.delta) + ".csv";
}

enum class Sweep { interval, age };
inline std::string_view to_string(Sweep s) { return s == Sweep::interval ? "interval" : "age"; }

/// One fitted pair of models. Interval cells pool start ages 1..12-delta;
/// age cells use the single start age `age`.
struct CellKey {
  Task task = Task::relative_growth;
  Measure measure = Measure::followers;
  int delta = 2;
  Sweep sweep = Sweep::interval;
  int age = 0;

  std::vector<int> ages() const {
    if (sweep == Sweep::age) return {age};
    std::vector<int> out;
    for (int t = 1; t + delta <= kHorizonMonths; ++t) out.push_back(t);
    return out;
  }
  int x() const { return sweep == Sweep::interval ? delta : age; }

  std::string name() const {
    std::string n = std::string(to_string(task)) + "." + std::string(to_string(measure)) + ".d" + std::to_string(delta);
    if (sweep == Sweep::age) n += ".t" + std::to_string(age);
    return n;
  }
  static CellKey parse(const std::string& name) {
    static const std::regex re(R"(([a-z_]+)\.([a-z_]+)\.d(\d+)(?:\.t(\d+))?)");
    std::smatch m;
    if (!std::regex_match(name, m, re)) fail("parse", "bad cell name " + name);
    auto task = parse_task(m[1].str());
    auto measure = parse_measure(m[2].str());
    if (!task || !measure) fail("parse", "bad cell name " + name);
    CellKey k{*task, *measure, std::stoi(m[3].str()), Sweep::interval, 0};
    if (m[4].matched) {
      k.sweep = Sweep::age;
      k.age = std::stoi(m[4].str());
    }
    return k;
  }
  auto operator<=>(const CellKey&) const = default;
};

enum class ColumnKind { intercept, continuous, binary };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  bool behavior = false;
};

/// Column layout of a baseline row with `lag_width` months of history.
inline std::vector<ColumnSpec> baseline_columns(int lag_width) {
  std::vector<ColumnSpec> cols{{"intercept", ColumnKind::intercept, false}};
  for (Measure m : kMeasures)
    for (int j = 0; j < lag_width; ++j)
      cols.push_back({"log_" + std::string(to_string(m)) + "_lag" + std::to_string(j), ColumnKind::continuous, false});
  cols.push_back({"age", ColumnKind::continuous, false});
  for (Platform p : kPlatforms) cols.push_back({"has_" + std::string(to_string(p)), ColumnKind::binary, false});
  for (auto f : kFeatureNames) cols.push_back({"past_" + std::string(f), ColumnKind::continuous, false});
  return cols;
}

inline std::vector<ColumnSpec> behavior_columns(int lag_width) {
  auto cols = baseline_columns(lag_width);
  for (auto f : kFeatureNames) cols.push_back({std::string(f), ColumnKind::binary, true});
  return cols;
}

/// Top-decile membership used to fit cutoffs. When ties at the threshold make
/// everybody popular, only values strictly above it count.
inline std::vector<std::uint8_t> popular_mask(std::span<const double> values) {
  const double threshold = top_decile_threshold({values.begin(), values.end()});
  std::vector<std::uint8_t> mask;
  for (double v : values) mask.push_back(v >= threshold ? 1 : 0);
  if (std::all_of(mask.begin(), mask.end(), [](auto b) { return b == 1; }))
    for (std::size_t i = 0; i < values.size(); ++i) mask[i] = values[i] > threshold ? 1 : 0;
  return mask;
}

/// Shared, precomputed state for a set of experiment cells: windowed raw
/// features for every streamer and cutoff tables fitted on training streamers.
/// Call prepare() before running cells; afterwards the context is read-only
/// and safe to share between threads.
class ExperimentContext {
 public:
  ExperimentContext(const Dataset& ds, std::vector<std::uint8_t> is_test,
                    CutoffMethod method = CutoffMethod::argmax, int jobs = 1)
      : ds_(&ds), is_test_(std::move(is_test)), method_(method), jobs_(jobs) {
    if (is_test_.size() != ds.streamers.size()) fail("config", "split mask does not match the dataset");
  }

  const Dataset& dataset() const { return *ds_; }
  const std::vector<std::uint8_t>& test_mask() const { return is_test_; }
  bool is_test(std::size_t streamer) const { return is_test_[streamer] != 0; }
  CutoffMethod cutoff_method() const { return method_; }
  int jobs() const { return jobs_; }

  void prepare_windows(const std::set<WindowKey>& windows) {
    std::vector<WindowKey> todo;
    for (const auto& w : windows)
      if (!features_.count(w)) todo.push_back(w);
    const std::size_t n = ds_->streamers.size();
    std::vector<std::vector<std::optional<RawFeatureVector>>> out(todo.size(),
                                                                  std::vector<std::optional<RawFeatureVector>>(n));
    parallel_for(todo.size() * n, jobs_, [&](std::size_t job) {
      const auto& w = todo[job / n];
      const auto& s = ds_->streamers[job % n];
      if (s.last_month() >= w.t + w.delta) out[job / n][job % n] = compute_features(s, w.t, w.delta, ds_->game_table);
    });
    for (std::size_t k = 0; k < todo.size(); ++k) features_.emplace(todo[k], std::move(out[k]));
  }

  void prepare_cutoffs(const std::set<CutoffKey>& keys) {
    std::set<WindowKey> windows;
    std::vector<CutoffKey> todo;
    for (const auto& k : keys) {
      windows.insert({k.t, k.delta});
      if (!cutoffs_.count(k)) todo.push_back(k);
    }
    prepare_windows(windows);
    std::vector<CutoffTable> tables(todo.size());
    std::vector<std::uint8_t> degenerate(todo.size(), 0);
    parallel_for(todo.size(), jobs_, [&](std::size_t i) {
      auto [table, fallback] = fit_training_cutoffs(todo[i]);
      tables[i] = table;
      degenerate[i] = fallback;
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
      cutoffs_.emplace(todo[i], tables[i]);
      if (degenerate[i]) degenerate_.insert(todo[i]);
    }
  }

  /// Features and cutoffs needed by the given cells.
  void prepare(const std::vector<CellKey>& cells) {
    std::set<CutoffKey> keys;
    for (const auto& c : cells) {
      int max_age = 0;
      for (int t : c.ages()) {
        keys.insert({c.measure, t, c.delta});
        max_age = std::max(max_age, t);
      }
      for (int s = 0; s < max_age; ++s) keys.insert({c.measure, s, 1});
    }
    prepare_cutoffs(keys);
  }

  /// nullptr when the streamer's record ends before the window does.
  const RawFeatureVector* features(std::size_t streamer, int t, int delta) const {
    auto it = features_.find({t, delta});
    if (it == features_.end())
      fail("instance", "features for window t=" + std::to_string(t) + " delta=" + std::to_string(delta) +
                           " were not prepared");
    const auto& f = it->second.at(streamer);
    return f ? &*f : nullptr;
  }

  const CutoffTable& cutoffs(Measure m, int t, int delta) const {
    auto it = cutoffs_.find({m, t, delta});
    if (it == cutoffs_.end())
      fail("instance", "cutoffs for " + cutoff_file_name({m, t, delta}) + " were not prepared");
    return it->second;
  }

  RuleBits window_bits(std::size_t streamer, Measure m, int t, int delta) const {
    const auto* f = features(streamer, t, delta);
    if (!f)
      fail("instance", "insufficient history: streamer " + ds_->streamers[streamer].id.value + " has no window [" +
                           std::to_string(t) + "," + std::to_string(t + delta) + ")");
    return binarize(*f, cutoffs(m, t, delta));
  }

  const std::map<CutoffKey, CutoffTable>& cutoff_tables() const { return cutoffs_; }
  /// Tables whose training streamers were all equally popular; they hold
  /// median cutoffs instead.
  const std::set<CutoffKey>& degenerate_cutoffs() const { return degenerate_; }

 private:
  std::pair<CutoffTable, bool> fit_training_cutoffs(const CutoffKey& k) const {
    std::vector<RawFeatureVector> rows;
    std::vector<double> popularity;
    const auto& feats = features_.at({k.t, k.delta});
    for (std::size_t i = 0; i < ds_->streamers.size(); ++i) {
      if (is_test_[i] || !feats[i]) continue;
      rows.push_back(*feats[i]);
      popularity.push_back(ds_->streamers[i].snapshot_at(k.t + k.delta)->value(k.measure));
    }
    if (rows.empty()) fail("cutoff", "no training streamers cover " + cutoff_file_name(k));
    const auto mask = popular_mask(popularity);
    const auto pos = std::count(mask.begin(), mask.end(), 1);
    if (pos > 0 && static_cast<std::size_t>(pos) < mask.size())
      return {fit_cutoff_table(rows, mask, k.measure, k.t, k.delta, method_), false};
    CutoffTable table{k.measure, k.t, k.delta, {}, {}};
    std::vector<double> column(rows.size());
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i][f];
      table.set(f, {0.5, percentile(column, 0.5)});
    }
    return {table, true};
  }

  const Dataset* ds_;
  std::vector<std::uint8_t> is_test_;
  CutoffMethod method_;
  int jobs_;
  std::map<WindowKey, std::vector<std::optional<RawFeatureVector>>> features_;
  std::map<CutoffKey, CutoffTable> cutoffs_;
  std::set<CutoffKey> degenerate_;
};

/// Baseline row for start age t, laid out as baseline_columns(lag_width).
inline std::vector<double> build_baseline_inputs(const ExperimentContext& ctx, std::size_t streamer, Measure measure,
                                                 int t, int lag_width) {
  const auto& s = ctx.dataset().streamers.at(streamer);
  if (t < 1) fail("instance", "start age must be >= 1");
  if (lag_width < t) fail("instance", "lag width " + std::to_string(lag_width) + " cannot hold age " + std::to_string(t));
  if (s.last_month() < t)
    fail("instance", "insufficient history: streamer " + s.id.value + " has no snapshot at month " + std::to_string(t));
  std::vector<double> row{1.0};
  for (Measure m : kMeasures)
    for (int j = 0; j < lag_width; ++j) row.push_back(std::log1p(s.snapshot_at(std::max(t - j, 1))->value(m)));
  row.push_back(static_cast<double>(t));
  const Timestamp at = s.account.twitch_created + t * kSecondsPerMonth;
  for (Platform p : kPlatforms) {
    const auto& c = s.account.created(p);
    row.push_back(c && *c <= at ? 1.0 : 0.0);
  }
  std::array<double, kNumFeatures> past{};
  for (int w = 0; w < t; ++w) {
    const auto bits = ctx.window_bits(streamer, measure, w, 1);
    for (std::size_t f = 0; f < kNumFeatures; ++f) past[f] += bits[f];
  }
  row.insert(row.end(), past.begin(), past.end());
  return row;
}

/// Baseline row followed by the 24 bits over [t, t+delta).
inline std::vector<double> build_behavior_inputs(const ExperimentContext& ctx, std::size_t streamer, Measure measure,
                                                 int t, int delta, int lag_width) {
  auto row = build_baseline_inputs(ctx, streamer, measure, t, lag_width);
  const auto bits = ctx.window_bits(streamer, measure, t, delta);
  for (std::size_t f = 0; f < kNumFeatures; ++f) row.push_back(bits[f]);
  return row;
}

/// Raw (unstandardized) rows of one cell, split by streamer.
struct CellData {
  std::vector<ColumnSpec> columns;
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
  Eigen::VectorXd y_train;
  Eigen::VectorXd y_test;
};

inline CellData collect_cell_rows(const ExperimentContext& ctx, const CellKey& key,
                                  GrowthMode mode = GrowthMode::fractional) {
  const auto ages = key.ages();
  if (ages.empty()) fail("task", key.name() + ": no start ages");
  const int lag = *std::max_element(ages.begin(), ages.end());
  CellData d;
  d.columns = behavior_columns(lag);
  std::vector<std::vector<double>> train, test;
  std::vector<double> ytr, yte;
  for (int t : ages) {
    const auto labels = make_labels(ctx.dataset(), TaskSpec{key.task, key.measure, t, key.delta}, mode);
    for (std::size_t k = 0; k < labels.bits.size(); ++k) {
      const auto i = labels.streamer_index[k];
      auto row = build_behavior_inputs(ctx, i, key.measure, t, key.delta, lag);
      (ctx.is_test(i) ? test : train).push_back(std::move(row));
      (ctx.is_test(i) ? yte : ytr).push_back(labels.bits[k]);
    }
  }
  auto to_matrix = [&](const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < d.columns.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
  };
  d.train = to_matrix(train);
  d.test = to_matrix(test);
  d.y_train = Eigen::Map<Eigen::VectorXd>(ytr.data(), static_cast<Eigen::Index>(ytr.size()));
  d.y_test = Eigen::Map<Eigen::VectorXd>(yte.data(), static_cast<Eigen::Index>(yte.size()));
  return d;
}

struct ColumnScale {
  std::string column;
  double mean = 0.0;
  double sd = 1.0;
};

/// Column selection and z-score parameters, computed from training rows only.
struct Standardization {
  std::vector<std::size_t> kept;     // indices into CellData::columns
  std::vector<ColumnScale> scales;   // continuous kept columns, in column order
  std::vector<std::string> dropped;  // constant on the training rows
};

inline constexpr double kRankTolerance = 1e-6;

inline Standardization fit_standardization(const std::vector<ColumnSpec>& columns, const Eigen::MatrixXd& train) {
  Standardization st;
  const Eigen::Index n = train.rows();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto col = train.col(static_cast<Eigen::Index>(c));
    if (columns[c].kind == ColumnKind::intercept) {
      st.kept.push_back(c);
      continue;
    }
    if (n < 2) {
      st.dropped.push_back(columns[c].name);
      continue;
    }
    double mean = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) mean += col[r];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) ss += (col[r] - mean) * (col[r] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const bool constant = col.maxCoeff() == col.minCoeff();
    if (constant || !(sd > 0.0)) {
      st.dropped.push_back(columns[c].name);
      continue;
    }
    st.kept.push_back(c);
    if (columns[c].kind == ColumnKind::continuous) st.scales.push_back({columns[c].name, mean, sd});
  }

  // Greedy rank pruning in column order (baseline columns come first): a
  // column nearly in the span of the columns kept before it is dropped.
  std::vector<Eigen::VectorXd> basis;
  std::vector<std::size_t> independent;
  std::map<std::string, const ColumnScale*> scale;
  for (const auto& s : st.scales) scale[s.column] = &s;
  for (auto c : st.kept) {
    Eigen::VectorXd v = train.col(static_cast<Eigen::Index>(c));
    if (auto it = scale.find(columns[c].name); it != scale.end())
      v = (v.array() - it->second->mean) / it->second->sd;
    const double norm = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    const double rest = v.norm();
    if (!(rest > kRankTolerance * norm)) {
      st.dropped.push_back(columns[c].name);
      continue;
    }
    basis.push_back(v / rest);
    independent.push_back(c);
  }
  if (independent.size() != st.kept.size()) {
    std::set<std::size_t> keep(independent.begin(), independent.end());
    std::erase_if(st.scales, [&](const ColumnScale& s) {
      for (auto c : keep)
        if (columns[c].name == s.column) return false;
      return true;
    });
    st.kept = std::move(independent);
  }
  return st;
}

/// Design over the kept columns; baseline-only unless `with_behavior`.
/// `exclude` removes further columns by name.
inline DesignMatrix make_design(const std::vector<ColumnSpec>& columns, const Standardization& st,
                                const Eigen::MatrixXd& raw, const Eigen::VectorXd& y, bool with_behavior,
                                const std::set<std::string>& exclude = {}) {
  std::map<std::string, const ColumnScale*> scale;
  for (const auto& s : st.scales) scale[s.column] = &s;
  std::vector<std::size_t> use;
  for (auto c : st.kept)
    if ((with_behavior || !columns[c].behavior) && !exclude.count(columns[c].name)) use.push_back(c);
  DesignMatrix d;
  d.x.resize(raw.rows(), static_cast<Eigen::Index>(use.size()));
  for (std::size_t j = 0; j < use.size(); ++j) {
    const auto& spec = columns[use[j]];
    d.columns.push_back(spec.name);
    auto src = raw.col(static_cast<Eigen::Index>(use[j]));
    auto dst = d.x.col(static_cast<Eigen::Index>(j));
    if (auto it = scale.find(spec.name); it != scale.end())
      dst = (src.array() - it->second->mean) / it->second->sd;
    else
      dst = src;
  }
  d.y = y;
  return d;
}

struct CellOptions {
  GrowthMode growth_mode = GrowthMode::fractional;
  bool least_squares = false;
  int bootstrap_resamples = 200;
  std::uint64_t split_seed = 1;
};

struct CellResult {
  CellKey key;
  std::string status = "ok";  // ok | degenerate_labels | not_converged | error
  std::string reason;
  std::size_t n_train = 0, n_test = 0, n_train_positive = 0, n_test_positive = 0;
  double auc_cur = kNaN, auc_curb = kNaN, se_cur = kNaN, se_curb = kNaN;
  ModelFit fit_cur;
  ModelFit fit_curb;
  bool fitted = false;  // both models were fitted (possibly without converging)
  Standardization standardization;
  bool has_standardization = false;

  bool ok() const { return status == "ok"; }
  double gain() const { return auc_curb - auc_cur; }
};

namespace detail {

inline ModelFit fit_model(const DesignMatrix& d, const CellOptions& opt, std::optional<Eigen::VectorXd> start = {}) {
  if (opt.least_squares) return fit_least_squares(d);
  FitOptions fo;
  fo.start = std::move(start);
  return fit_logistic(d, fo);
}

inline std::vector<std::uint8_t> to_bits(const Eigen::VectorXd& y) {
  std::vector<std::uint8_t> b(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) b[static_cast<std::size_t>(i)] = y[i] > 0.5 ? 1 : 0;
  return b;
}

inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return kNaN;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Fits F_cur and F_cur+b for one cell and scores them on the test streamers.
/// F_cur+b starts from the F_cur solution (zeros for the behavior columns), so
/// its training log-likelihood can only be higher.
inline CellResult run_cell(const ExperimentContext& ctx, const CellKey& key, const CellOptions& opt) {
  CellResult r;
  r.key = key;
  try {
    const CellData data = collect_cell_rows(ctx, key, opt.growth_mode);
    r.n_train = static_cast<std::size_t>(data.train.rows());
    r.n_test = static_cast<std::size_t>(data.test.rows());
    r.n_train_positive = static_cast<std::size_t>(data.y_train.sum());
    r.n_test_positive = static_cast<std::size_t>(data.y_test.sum());
    r.standardization = fit_standardization(data.columns, data.train);
    r.has_standardization = true;
    if (r.n_train_positive == 0 || r.n_train_positive == r.n_train) {
      r.status = "degenerate_labels";
      r.reason = "training labels have a single class";
      return r;
    }
    if (r.n_test_positive == 0 || r.n_test_positive == r.n_test) {
      r.status = "degenerate_labels";
      r.reason = "test labels have a single class";
      return r;
    }
    const auto cur_train = make_design(data.columns, r.standardization, data.train, data.y_train, false);
    const auto curb_train = make_design(data.columns, r.standardization, data.train, data.y_train, true);
    r.fit_cur = detail::fit_model(cur_train, opt);
    Eigen::VectorXd start = Eigen::VectorXd::Zero(curb_train.cols());
    start.head(r.fit_cur.coefficients.size()) = r.fit_cur.coefficients;
    r.fit_curb = detail::fit_model(curb_train, opt, start);
    r.fitted = true;
    for (const auto* fit : {&r.fit_cur, &r.fit_curb}) {
      if (fit->converged) continue;
      r.status = "not_converged";
      r.reason = std::string(fit == &r.fit_cur ? "F_cur" : "F_cur+b") +
                 (fit->separated ? ": quasi-separated data" : ": iteration limit reached");
      return r;
    }
    const auto cur_test = make_design(data.columns, r.standardization, data.test, data.y_test, false);
    const auto curb_test = make_design(data.columns, r.standardization, data.test, data.y_test, true);
    const auto s_cur = predict_linear(r.fit_cur, cur_test);
    const auto s_curb = predict_linear(r.fit_curb, curb_test);
    const auto labels = detail::to_bits(data.y_test);
    r.auc_cur = auc(s_cur, labels);
    r.auc_curb = auc(s_curb, labels);

    // bootstrap over test rows, same resample for both models
    std::mt19937_64 rng(derive_seed(opt.split_seed, fnv1a(key.name())));
    boost::random::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
    std::vector<double> boot_cur, boot_curb, bs_cur(labels.size()), bs_curb(labels.size());
    std::vector<std::uint8_t> bl(labels.size());
    for (int b = 0; b < opt.bootstrap_resamples; ++b) {
      std::size_t pos = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto j = pick(rng);
        bs_cur[i] = s_cur[j];
        bs_curb[i] = s_curb[j];
        bl[i] = labels[j];
        pos += labels[j];
      }
      if (pos == 0 || pos == labels.size()) continue;
      boot_cur.push_back(auc(bs_cur, bl));
      boot_curb.push_back(auc(bs_curb, bl));
    }
    r.se_cur = detail::sample_sd(boot_cur);
    r.se_curb = detail::sample_sd(boot_curb);
  } catch (const Error& e) {
    r.status = "error";
    r.reason = e.what();
  }
  return r;
}

/// Runs cells in parallel; results come back in input order.
inline std::vector<CellResult> run_cells(ExperimentContext& ctx, const std::vector<CellKey>& keys,
                                         const CellOptions& opt) {
  ctx.prepare(keys);
  std::vector<CellResult> out(keys.size());
  const ExperimentContext& shared = ctx;
  parallel_for(keys.size(), ctx.jobs(), [&](std::size_t i) { out[i] = run_cell(shared, keys[i], opt); });
  return out;
}

struct AucCurve {
  Task task = Task::relative_growth;
  Measure measure = Measure::followers;
  Sweep sweep = Sweep::interval;
  std::vector<CellResult> points;  // x strictly increasing
};

inline std::vector<CellKey> interval_sweep_cells(Task task, Measure measure, const std::vector<int>& deltas) {
  std::set<int> sorted(deltas.begin(), deltas.end());
  std::vector<CellKey> keys;
  for (int d : sorted) {
    if (d < 1 || d > kHorizonMonths - 1) fail("config", "delta must be in [1, 11], got " + std::to_string(d));
    keys.push_back({task, measure, d, Sweep::interval, 0});
  }
  return keys;
}

inline std::vector<CellKey> age_sweep_cells(Task task, Measure measure, int delta = 2) {
  if (delta < 1 || delta > kHorizonMonths - 1) fail("config", "delta must be in [1, 11]");
  std::vector<CellKey> keys;
  for (int t = 1; t <= 10 && t + delta <= kHorizonMonths; ++t) keys.push_back({task, measure, delta, Sweep::age, t});
  return keys;
}

inline AucCurve run_interval_sweep(ExperimentContext& ctx, Task task, Measure measure, const std::vector<int>& deltas,
                                   const CellOptions& opt) {
  return {task, measure, Sweep::interval, run_cells(ctx, interval_sweep_cells(task, measure, deltas), opt)};
}

inline AucCurve run_age_sweep(ExperimentContext& ctx, Task task, Measure measure, int delta, const CellOptions& opt) {
  return {task, measure, Sweep::age, run_cells(ctx, age_sweep_cells(task, measure, delta), opt)};
}

// ---------------------------------------------------------------------------
// Coefficient table

inline std::string significance_stars(double p) {
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

struct CoefficientRow {
  std::string feature;
  bool present = false;  // column survived standardization
  double coefficient = kNaN, std_err = kNaN, p_value = kNaN;
  std::string stars;
  bool dropped_in_recheck = false;
  double recheck_coefficient = kNaN, recheck_p_value = kNaN;
  std::string recheck_stars;
};

struct CollinearPair {
  std::string a;
  std::string b;
  double correlation = 0.0;
};

struct MeasureCoefficients {
  Measure measure = Measure::followers;
  std::string status = "ok";
  std::string reason;
  std::size_t n_train = 0;
  std::vector<CoefficientRow> rows;  // always 24, feature order
  std::vector<CollinearPair> pairs;
  bool stars_stable = true;
};

struct CoefficientTable {
  int delta = 2;
  std::vector<MeasureCoefficients> measures;
};

inline constexpr double kCollinearityThreshold = 0.8;

/// Behavior coefficients of a fitted relative-growth cell, with the
/// collinearity re-check: behavior columns correlated above 0.8 on the
/// training rows are reported, the later feature of each pair is dropped and
/// the model refitted; stars_stable says whether the remaining features keep
/// their significance stars.
inline MeasureCoefficients coefficients_for_cell(const ExperimentContext& ctx, const CellResult& cell,
                                                 const CellOptions& opt) {
  MeasureCoefficients mc;
  mc.measure = cell.key.measure;
  mc.n_train = cell.n_train;
  for (auto f : kFeatureNames) {
    CoefficientRow row;
    row.feature = f;
    mc.rows.push_back(row);
  }
  if (!cell.ok()) {
    mc.status = "skipped";
    mc.reason = cell.status + (cell.reason.empty() ? "" : ": " + cell.reason);
    return mc;
  }
  try {
    const auto p = coef_t_test(cell.fit_curb);
    std::map<std::string, Eigen::Index> at;
    for (std::size_t j = 0; j < cell.fit_curb.columns.size(); ++j)
      at[cell.fit_curb.columns[j]] = static_cast<Eigen::Index>(j);
    for (auto& row : mc.rows) {
      auto it = at.find(row.feature);
      if (it == at.end()) continue;
      row.present = true;
      row.coefficient = cell.fit_curb.coefficients[it->second];
      row.std_err = cell.fit_curb.standard_errors[it->second];
      row.p_value = p[static_cast<std::size_t>(it->second)];
      row.stars = significance_stars(row.p_value);
    }

    const CellData data = collect_cell_rows(ctx, cell.key, opt.growth_mode);
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < data.columns.size(); ++c)
      if (data.columns[c].behavior && at.count(data.columns[c].name)) cols.push_back(c);
    std::set<std::string> dropped;
    for (std::size_t a = 0; a < cols.size(); ++a)
      for (std::size_t b = a + 1; b < cols.size(); ++b) {
        const auto xa = data.train.col(static_cast<Eigen::Index>(cols[a])).array();
        const auto xb = data.train.col(static_cast<Eigen::Index>(cols[b])).array();
        const double ma = xa.mean(), mb = xb.mean();
        const double cov = ((xa - ma) * (xb - mb)).sum();
        const double r = cov / std::sqrt(((xa - ma).square().sum()) * ((xb - mb).square().sum()));
        if (std::abs(r) > kCollinearityThreshold) {
          const auto& na = data.columns[cols[a]].name;
          const auto& nb = data.columns[cols[b]].name;
          mc.pairs.push_back({na, nb, r});
          if (!dropped.count(na)) dropped.insert(nb);
        }
      }
    if (dropped.empty()) {
      for (auto& row : mc.rows) {
        row.recheck_coefficient = row.coefficient;
        row.recheck_p_value = row.p_value;
        row.recheck_stars = row.stars;
      }
      return mc;
    }
    const auto design = make_design(data.columns, cell.standardization, data.train, data.y_train, true, dropped);
    const auto refit = detail::fit_model(design, opt);
    if (!refit.converged) {
      mc.stars_stable = false;
      mc.reason = "collinearity refit did not converge";
      return mc;
    }
    const auto rp = coef_t_test(refit);
    for (std::size_t j = 0; j < refit.columns.size(); ++j)
      for (auto& row : mc.rows)
        if (row.feature == refit.columns[j]) {
          row.recheck_coefficient = refit.coefficients[static_cast<Eigen::Index>(j)];
          row.recheck_p_value = rp[j];
          row.recheck_stars = significance_stars(rp[j]);
        }
    for (auto& row : mc.rows) {
      row.dropped_in_recheck = dropped.count(row.feature) > 0;
      if (row.present && !row.dropped_in_recheck && row.stars != row.recheck_stars) mc.stars_stable = false;
    }
  } catch (const Error& e) {
    mc.status = "skipped";
    mc.reason = e.what();
  }
  return mc;
}

inline CoefficientTable coefficient_table(ExperimentContext& ctx, const std::vector<Measure>& measures, int delta,
                                          const CellOptions& opt) {
  std::vector<CellKey> keys;
  for (Measure m : measures) keys.push_back({Task::relative_growth, m, delta, Sweep::interval, 0});
  const auto cells = run_cells(ctx, keys, opt);
  CoefficientTable table{delta, {}};
  for (const auto& c : cells) table.measures.push_back(coefficients_for_cell(ctx, c, opt));
  return table;
}

// ---------------------------------------------------------------------------
// Effort

inline constexpr double kAffiliateMinutesPerMonth = 500.0;
inline constexpr double kFullTimeHoursPerMonth = 160.0;

inline bool meets_affiliate_minimum(double monthly_minutes) { return monthly_minutes >= kAffiliateMinutesPerMonth; }
inline bool is_full_time(double monthly_hours) { return monthly_hours >= kFullTimeHoursPerMonth; }

struct StreamerEffort {
  std::size_t streamer = 0;
  std::vector<double> monthly_hours;  // first-year months covered by the record
  double mean_monthly_hours = 0.0;
  bool affiliate = false;
  bool full_time = false;
  std::optional<double> zero_viewer_fraction;  // absent without broadcasts
};

struct GroupTest {
  std::string group;
  Measure measure = Measure::followers;
  std::size_t n_a = 0, n_b = 0;
  double mean_a = kNaN, mean_b = kNaN;
  WelchResult result;
  std::string status = "ok";
};

struct EffortReport {
  std::vector<StreamerEffort> streamers;
  double affiliate_fraction = kNaN;
  double full_time_fraction = kNaN;
  double month_affiliate_fraction = kNaN;  // over streamer-months
  double month_full_time_fraction = kNaN;
  double over_quarter_empty_fraction = kNaN;  // streamers with > 25% zero-viewer broadcasts
  int outcome_month = kHorizonMonths;
  std::vector<GroupTest> tests;  // full-time (a) vs the rest (b)
};

inline double broadcast_hours(std::span<const Broadcast> bs) {
  double h = 0.0;
  for (const auto& b : bs) h += b.duration_min / 60.0;
  return h;
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline GroupTest welch_group_test(std::string group, Measure m, std::span<const double> a, std::span<const double> b) {
  GroupTest g;
  g.group = std::move(group);
  g.measure = m;
  g.n_a = a.size();
  g.n_b = b.size();
  g.mean_a = mean_of(a);
  g.mean_b = mean_of(b);
  if (a.size() < 2 || b.size() < 2) {
    g.status = "skipped: fewer than 2 streamers on a side";
    return g;
  }
  try {
    g.result = welch_t_test(a, b);
  } catch (const Error& e) {
    g.status = std::string("skipped: ") + e.what();
  }
  return g;
}

/// Streamers need at least one full month on record.
inline EffortReport effort_analysis(const Dataset& ds) {
  EffortReport rep;
  std::size_t months = 0, month_aff = 0, month_ft = 0, quarter_empty = 0, with_broadcasts = 0;
  std::map<Measure, std::pair<std::vector<double>, std::vector<double>>> outcome;
  for (std::size_t i = 0; i < ds.streamers.size(); ++i) {
    const auto& s = ds.streamers[i];
    const int covered = std::min(kHorizonMonths, s.last_month());
    if (covered < 1) continue;
    StreamerEffort e;
    e.streamer = i;
    std::size_t zero = 0, total = 0;
    for (int m = 0; m < covered; ++m) {
      const auto slice = window_events(s, m, 1);
      const double h = broadcast_hours(slice.broadcasts);
      e.monthly_hours.push_back(h);
      ++months;
      month_aff += meets_affiliate_minimum(h * 60.0);
      month_ft += is_full_time(h);
      for (const auto& b : slice.broadcasts) {
        ++total;
        zero += b.had_zero_viewers;
      }
    }
    e.mean_monthly_hours = mean_of(e.monthly_hours);
    e.affiliate = meets_affiliate_minimum(e.mean_monthly_hours * 60.0);
    e.full_time = is_full_time(e.mean_monthly_hours);
    if (total > 0) {
      e.zero_viewer_fraction = static_cast<double>(zero) / static_cast<double>(total);
      ++with_broadcasts;
      quarter_empty += *e.zero_viewer_fraction > 0.25;
    }
    const auto* snap = s.snapshot_at(covered);
    for (Measure m : {Measure::followers, Measure::concurrent_viewers, Measure::cheers})
      (e.full_time ? outcome[m].first : outcome[m].second).push_back(snap->value(m));
    rep.streamers.push_back(std::move(e));
  }
  if (!rep.streamers.empty()) {
    const double n = static_cast<double>(rep.streamers.size());
    rep.affiliate_fraction =
        static_cast<double>(std::count_if(rep.streamers.begin(), rep.streamers.end(), [](auto& e) { return e.affiliate; })) / n;
    rep.full_time_fraction =
        static_cast<double>(std::count_if(rep.streamers.begin(), rep.streamers.end(), [](auto& e) { return e.full_time; })) / n;
    rep.month_affiliate_fraction = static_cast<double>(month_aff) / static_cast<double>(months);
    rep.month_full_time_fraction = static_cast<double>(month_ft) / static_cast<double>(months);
  }
  if (with_broadcasts > 0)
    rep.over_quarter_empty_fraction = static_cast<double>(quarter_empty) / static_cast<double>(with_broadcasts);
  for (Measure m : {Measure::followers, Measure::concurrent_viewers, Measure::cheers})
    rep.tests.push_back(welch_group_test("full_time_vs_rest", m, outcome[m].first, outcome[m].second));
  return rep;
}

// ---------------------------------------------------------------------------
// Social account timing

/// Whole 30-day months from Twitch creation to the platform account's
/// creation, rounded down (negative: the account predates Twitch).
inline int account_offset_months(const AccountInfo& a, Platform p) {
  const auto& c = a.created(p);
  if (!c) fail("timing", "no account on " + std::string(to_string(p)));
  return static_cast<int>(floor_div(*c - a.twitch_created, kSecondsPerMonth));
}

/// Maximum over snapshots 0..last_month of the measure.
inline double peak_value(const StreamerRecord& s, Measure m, int last_month = kHorizonMonths) {
  double peak = 0.0;
  for (const auto& snap : s.snapshots)
    if (snap.month_index <= last_month) peak = std::max(peak, snap.value(m));
  return peak;
}

struct TimingGroup {
  Platform platform = Platform::twitter;
  int offset = 0;
  std::size_t n = 0;
  double mean_followers = kNaN, se_followers = kNaN;
  double mean_ccv = kNaN, se_ccv = kNaN;
};

struct TimingReport {
  std::vector<TimingGroup> groups;
  std::vector<GroupTest> tests;  // before (a, offset < 0) vs after (b)
};

inline TimingReport social_timing_analysis(const Dataset& ds) {
  TimingReport rep;
  auto se = [](const std::vector<double>& v) {
    return v.size() < 2 ? kNaN : detail::sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
  };
  for (Platform p : kPlatforms) {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> groups;
    std::vector<double> before_f, after_f, before_c, after_c;
    for (const auto& s : ds.streamers) {
      if (!s.has_account(p)) continue;
      const int off = account_offset_months(s.account, p);
      const double f = peak_value(s, Measure::followers), c = peak_value(s, Measure::concurrent_viewers);
      groups[off].first.push_back(f);
      groups[off].second.push_back(c);
      (off < 0 ? before_f : after_f).push_back(f);
      (off < 0 ? before_c : after_c).push_back(c);
    }
    for (const auto& [off, v] : groups)
      rep.groups.push_back({p, off, v.first.size(), mean_of(v.first), se(v.first), mean_of(v.second), se(v.second)});
    const std::string name(to_string(p));
    rep.tests.push_back(welch_group_test(name, Measure::followers, before_f, after_f));
    rep.tests.push_back(welch_group_test(name, Measure::concurrent_viewers, before_c, after_c));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Population statistics

/// Share of the total held by the top ceil(fraction * n) values.
inline double top_share(std::vector<double> values, double fraction = 0.1) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end(), std::greater<>());
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size()) - 1e-9));
  double top = 0.0, total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += values[i];
    if (i < k) top += values[i];
  }
  return total > 0.0 ? top / total : kNaN;
}

struct CcdfTable {
  int age = 0;
  std::vector<double> threshold;  // nearest-rank percentiles 0..100, deduplicated
  std::vector<double> fraction;   // share of streamers with value >= threshold
};

struct MeasurePopulation {
  Measure measure = Measure::followers;
  std::size_t n = 0;
  double top_decile_share = kNaN;
  std::vector<double> share_curve;  // index k-1: share held by the top k percent, k = 1..100
  std::vector<CcdfTable> ccdf;      // ages 0..12
};

struct PopulationReport {
  int month = kHorizonMonths;
  std::vector<MeasurePopulation> measures;
};

inline PopulationReport population_stats(const Dataset& ds, int month = kHorizonMonths) {
  PopulationReport rep;
  rep.month = month;
  for (Measure m : kMeasures) {
    MeasurePopulation mp;
    mp.measure = m;
    std::vector<double> v;
    for (const auto& s : ds.streamers)
      if (const auto* snap = s.snapshot_at(month)) v.push_back(snap->value(m));
    mp.n = v.size();
    mp.top_decile_share = top_share(v, 0.1);
    for (int k = 1; k <= 100; ++k) mp.share_curve.push_back(top_share(v, k / 100.0));
    for (int age = 0; age <= month; ++age) {
      std::vector<double> a;
      for (const auto& s : ds.streamers)
        if (const auto* snap = s.snapshot_at(age)) a.push_back(snap->value(m));
      CcdfTable t{age, {}, {}};
      if (!a.empty()) {
        std::sort(a.begin(), a.end());
        for (int step = 0; step <= kPercentGrid; ++step) {
          const double x = detail::grid_percentile_sorted(a, step);
          if (!t.threshold.empty() && t.threshold.back() == x) continue;
          t.threshold.push_back(x);
          const auto at_least = a.end() - std::lower_bound(a.begin(), a.end(), x);
          t.fraction.push_back(static_cast<double>(at_least) / static_cast<double>(a.size()));
        }
      }
      mp.ccdf.push_back(std::move(t));
    }
    rep.measures.push_back(std::move(mp));
  }
  return rep;
}

}  // namespace streamgain
