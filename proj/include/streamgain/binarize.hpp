#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "streamgain/csv.hpp"
#include "streamgain/error.hpp"
#include "streamgain/features.hpp"

namespace streamgain {

inline constexpr int kPercentGrid = 100;  // k in {0, 1/100, ..., 1}

namespace detail {

// nearest-rank index for k = step/100 over n sorted values
inline std::size_t grid_rank_index(std::size_t n, int step) {
  const std::size_t c = (static_cast<std::size_t>(step) * n + kPercentGrid - 1) / kPercentGrid;
  return c == 0 ? 0 : c - 1;
}

inline double grid_percentile_sorted(std::span<const double> sorted, int step) {
  return sorted[grid_rank_index(sorted.size(), step)];
}

}  // namespace detail

/// Nearest-rank percentile: the element at index ceil(k*n)-1 of the sorted
/// values (index 0 for k = 0).
inline double percentile(std::span<const double> values, double k) {
  if (values.empty()) fail("percentile", "percentile of an empty sample");
  if (!(k >= 0.0 && k <= 1.0)) fail("percentile", "percentile fraction outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // guard k*n against representation noise such as 0.07*100 = 7.000000000000001
  double c = std::ceil(k * n - 1e-9 * std::max(1.0, n));
  std::size_t idx = c <= 0.0 ? 0 : static_cast<std::size_t>(c) - 1;
  return sorted[std::min(idx, sorted.size() - 1)];
}

enum class CutoffMethod { argmax, median };

inline std::string_view to_string(CutoffMethod m) { return m == CutoffMethod::argmax ? "argmax" : "median"; }

struct Cutoff {
  double k_star = 0.0;
  double c_f = 0.0;
  bool operator==(const Cutoff&) const = default;
};

/// Picks the grid percentile k that maximises |pop_k - unpop_k|, where pop_k
/// (unpop_k) is the fraction of popular (unpopular) streamers whose value is
/// strictly above the k-th percentile of all values. Ties go to the smallest k.
inline Cutoff compute_cutoff(std::span<const double> values, std::span<const std::uint8_t> popular,
                             CutoffMethod method = CutoffMethod::argmax) {
  if (values.size() != popular.size()) fail("cutoff", "values and popular mask differ in length");
  std::vector<double> all(values.begin(), values.end()), pop, unpop;
  for (std::size_t i = 0; i < values.size(); ++i) (popular[i] ? pop : unpop).push_back(values[i]);
  if (pop.empty() || unpop.empty()) fail("cutoff", "cutoff fitting needs popular and unpopular streamers");
  std::sort(all.begin(), all.end());
  if (method == CutoffMethod::median) return {0.5, detail::grid_percentile_sorted(all, 50)};
  std::sort(pop.begin(), pop.end());
  std::sort(unpop.begin(), unpop.end());

  const auto np = static_cast<std::int64_t>(pop.size());
  const auto nu = static_cast<std::int64_t>(unpop.size());
  auto above = [](const std::vector<double>& v, double c) {
    return static_cast<std::int64_t>(v.end() - std::upper_bound(v.begin(), v.end(), c));
  };
  int best_step = 0;
  std::int64_t best = -1;  // |cp/np - cu/nu| scaled by np*nu, compared exactly
  for (int step = 0; step <= kPercentGrid; ++step) {
    const double c = detail::grid_percentile_sorted(all, step);
    const std::int64_t diff = above(pop, c) * nu - above(unpop, c) * np;
    const std::int64_t score = diff < 0 ? -diff : diff;
    if (score > best) {
      best = score;
      best_step = step;
    }
  }
  return {static_cast<double>(best_step) / kPercentGrid, detail::grid_percentile_sorted(all, best_step)};
}

/// Per-feature cutoffs, fitted for one popularity measure and one window.
struct CutoffTable {
  Measure measure = Measure::followers;
  int t = 0;
  int delta = 1;
  std::array<Cutoff, kNumFeatures> cutoffs{};
  std::array<bool, kNumFeatures> present{};

  void set(std::size_t feature, Cutoff c) {
    cutoffs.at(feature) = c;
    present.at(feature) = true;
  }
  const Cutoff& at(std::size_t feature) const {
    if (!present.at(feature))
      fail("cutoff", "no cutoff for feature " + std::string(feature_name(feature)));
    return cutoffs[feature];
  }
  bool operator==(const CutoffTable&) const = default;
};

/// Fits a cutoff for every feature. `rows` holds one raw vector per streamer
/// and `popular` the matching popularity bits.
inline CutoffTable fit_cutoff_table(std::span<const RawFeatureVector> rows, std::span<const std::uint8_t> popular,
                                    Measure measure, int t, int delta,
                                    CutoffMethod method = CutoffMethod::argmax) {
  CutoffTable table{measure, t, delta, {}, {}};
  std::vector<double> column(rows.size());
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i][f];
    table.set(f, compute_cutoff(column, popular, method));
  }
  return table;
}

struct RuleBits {
  std::array<std::uint8_t, kNumFeatures> bits{};

  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::uint8_t operator[](Feature f) const { return bits[static_cast<std::size_t>(f)]; }
  bool operator==(const RuleBits&) const = default;
};

/// bit = 1 iff raw value > cutoff (strict).
inline RuleBits binarize(const RawFeatureVector& raw, const CutoffTable& table) {
  RuleBits out;
  for (std::size_t f = 0; f < kNumFeatures; ++f) out.bits[f] = raw[f] > table.at(f).c_f ? 1 : 0;
  return out;
}

inline std::string cutoff_table_csv(const CutoffTable& table) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"measure", "feature", "k_star", "c_f"});
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    const auto& c = table.at(f);
    w.row({std::string(to_string(table.measure)), std::string(feature_name(f)), format_number(c.k_star),
           format_number(c.c_f)});
  }
  return os.str();
}

inline CutoffTable parse_cutoff_table_csv(const std::string& text, int t, int delta) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"measure", "feature", "k_star", "c_f"})
    fail("parse", "cutoff table: bad header");
  CutoffTable table;
  table.t = t;
  table.delta = delta;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) fail("parse", "cutoff table: expected 4 fields");
    auto m = parse_measure(f[0]);
    auto idx = feature_index(f[1]);
    if (!m || !idx) fail("parse", "cutoff table: unknown measure or feature in '" + line + "'");
    if (!first && *m != table.measure) fail("parse", "cutoff table: mixed measures");
    table.measure = *m;
    first = false;
    table.set(*idx, {parse_number(f[2]), parse_number(f[3])});
  }
  return table;
}

}  // namespace streamgain
