#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "streamgain/binarize.hpp"
#include "streamgain/core_data.hpp"
#include "streamgain/csv.hpp"

namespace streamgain {

enum class Task { absolute, relative_growth, self_growth };
inline constexpr std::array<Task, 3> kTasks = {Task::absolute, Task::relative_growth, Task::self_growth};

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::absolute: return "absolute";
    case Task::relative_growth: return "relative_growth";
    case Task::self_growth: return "self_growth";
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  for (Task t : kTasks)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline constexpr int kHorizonMonths = 12;
inline constexpr double kSelfGrowthViewersPerMonth = 4.0;

enum class GrowthMode { fractional, absolute_difference };

struct TaskSpec {
  Task task = Task::relative_growth;
  Measure measure = Measure::followers;
  int t = 1;
  int delta = 1;

  void validate() const {
    const std::string where = std::string(to_string(task)) + "/" + std::string(to_string(measure));
    if (task == Task::self_growth && measure != Measure::concurrent_viewers)
      fail("task", where + ": self_growth requires measure concurrent_viewers");
    if (delta < 1 || t < 1 || t + delta > kHorizonMonths)
      fail("task", where + ": need 1 <= delta, 1 <= t, t + delta <= " + std::to_string(kHorizonMonths) +
                       " (got t=" + std::to_string(t) + ", delta=" + std::to_string(delta) + ")");
  }
  bool operator==(const TaskSpec&) const = default;
};

/// One bit per streamer alive through t+delta, in dataset (id) order.
struct LabelSet {
  TaskSpec spec;
  std::vector<std::size_t> streamer_index;  // into Dataset::streamers
  std::vector<std::uint8_t> bits;

  std::size_t positives() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }
};

/// Smallest value that is still inside the top ceil(n/10) ranks.
inline double top_decile_threshold(std::vector<double> values) {
  if (values.empty()) fail("labels", "top decile of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t top = (values.size() + 9) / 10;
  return values[values.size() - top];
}

namespace detail {

inline std::vector<std::size_t> alive_through(const Dataset& ds, int month) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ds.streamers.size(); ++i)
    if (ds.streamers[i].last_month() >= month) out.push_back(i);
  if (out.empty()) fail("labels", "missing snapshot: no streamer has month " + std::to_string(month));
  return out;
}

inline double growth_value(double start, double end, GrowthMode mode) {
  return mode == GrowthMode::fractional ? (end - start) / std::max(start, 1.0) : end - start;
}

}  // namespace detail

inline LabelSet absolute_label(const Dataset& ds, const TaskSpec& spec) {
  spec.validate();
  const int end = spec.t + spec.delta;
  LabelSet out{spec, detail::alive_through(ds, end), {}};
  std::vector<double> v;
  for (auto i : out.streamer_index) v.push_back(ds.streamers[i].snapshot_at(end)->value(spec.measure));
  const double threshold = top_decile_threshold(v);
  for (double x : v) out.bits.push_back(x >= threshold ? 1 : 0);
  return out;
}

inline std::vector<double> growth_values(const Dataset& ds, const std::vector<std::size_t>& idx, Measure m,
                                         int t, int delta, GrowthMode mode = GrowthMode::fractional) {
  std::vector<double> g;
  g.reserve(idx.size());
  for (auto i : idx) {
    const auto& s = ds.streamers[i];
    g.push_back(detail::growth_value(s.snapshot_at(t)->value(m), s.snapshot_at(t + delta)->value(m), mode));
  }
  return g;
}

/// bit = 1 iff the streamer's growth is strictly above the population median
/// (nearest-rank) growth over the same interval.
inline LabelSet relative_growth_label(const Dataset& ds, const TaskSpec& spec,
                                      GrowthMode mode = GrowthMode::fractional) {
  spec.validate();
  LabelSet out{spec, detail::alive_through(ds, spec.t + spec.delta), {}};
  const auto g = growth_values(ds, out.streamer_index, spec.measure, spec.t, spec.delta, mode);
  const double median = percentile(g, 0.5);
  for (double x : g) out.bits.push_back(x > median ? 1 : 0);
  return out;
}

/// bit = 1 iff average concurrent viewers grew by at least 4 per month.
inline LabelSet self_growth_label(const Dataset& ds, const TaskSpec& spec) {
  if (spec.measure != Measure::concurrent_viewers)
    fail("task", "self_growth requires measure concurrent_viewers");
  spec.validate();
  LabelSet out{spec, detail::alive_through(ds, spec.t + spec.delta), {}};
  const double need = kSelfGrowthViewersPerMonth * spec.delta;
  for (auto i : out.streamer_index) {
    const auto& s = ds.streamers[i];
    const double gain = s.snapshot_at(spec.t + spec.delta)->avg_concurrent_viewers -
                        s.snapshot_at(spec.t)->avg_concurrent_viewers;
    out.bits.push_back(gain >= need ? 1 : 0);
  }
  return out;
}

inline LabelSet make_labels(const Dataset& ds, const TaskSpec& spec, GrowthMode mode = GrowthMode::fractional) {
  switch (spec.task) {
    case Task::absolute: return absolute_label(ds, spec);
    case Task::relative_growth: return relative_growth_label(ds, spec, mode);
    case Task::self_growth: return self_growth_label(ds, spec);
  }
  fail("task", "unknown task");
}

inline std::string labels_csv(const Dataset& ds, const std::vector<LabelSet>& sets) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"streamer", "task", "measure", "t", "delta", "label"});
  for (const auto& ls : sets)
    for (std::size_t k = 0; k < ls.bits.size(); ++k)
      w.row({ds.streamers[ls.streamer_index[k]].id.value, std::string(to_string(ls.spec.task)),
             std::string(to_string(ls.spec.measure)), std::to_string(ls.spec.t), std::to_string(ls.spec.delta),
             std::to_string(ls.bits[k])});
  return os.str();
}

}  // namespace streamgain
