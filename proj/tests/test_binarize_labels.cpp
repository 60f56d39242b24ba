#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "streamgain/binarize.hpp"
#include "streamgain/labels.hpp"
#include "streamgain/oracle.hpp"

using namespace streamgain;
using namespace fixtures;

TEST(Percentile, NearestRank) {
  const std::vector<double> v = {3, 1, 2};
  EXPECT_EQ(percentile(v, 0.0), 1);
  EXPECT_EQ(percentile(v, 0.5), 2);
  EXPECT_EQ(percentile(v, 0.34), 2);
  EXPECT_EQ(percentile(v, 0.33), 1);
  EXPECT_EQ(percentile(v, 1.0), 3);
  std::vector<double> hundred(100);
  for (int i = 0; i < 100; ++i) hundred[static_cast<std::size_t>(i)] = i + 1;
  for (int k = 1; k <= 100; ++k) EXPECT_EQ(percentile(hundred, k / 100.0), k) << k;
  EXPECT_THROW(percentile(std::vector<double>{}, 0.5), Error);
  EXPECT_THROW(percentile(v, 1.5), Error);
}

TEST(Cutoff, HandExample) {
  std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::uint8_t> pop = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  const auto c = compute_cutoff(v, pop);
  EXPECT_EQ(c.k_star, 0.71);  // first grid step whose percentile is 8
  EXPECT_EQ(c.c_f, 8);
  const auto m = compute_cutoff(v, pop, CutoffMethod::median);
  EXPECT_EQ(m.k_star, 0.5);
  EXPECT_EQ(m.c_f, 5);
}

TEST(Cutoff, UninformativeFeatureKeepsSmallestK) {
  std::vector<double> v(20, 4.0);
  std::vector<std::uint8_t> pop(20, 0);
  pop[3] = pop[11] = 1;
  const auto c = compute_cutoff(v, pop);
  EXPECT_EQ(c.k_star, 0.0);
  EXPECT_EQ(c.c_f, 4.0);
}

TEST(Cutoff, NeedsBothGroups) {
  std::vector<double> v = {1, 2};
  EXPECT_THROW(compute_cutoff(v, std::vector<std::uint8_t>{1, 1}), Error);
  EXPECT_THROW(compute_cutoff(v, std::vector<std::uint8_t>{1}), Error);
}

TEST(Cutoff, MatchesExhaustiveScanAndIsTransformEquivariant) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto r = oracle::check_cutoff(seed, 100);
    EXPECT_TRUE(r.passed) << r.detail;
  }
}

TEST(Cutoff, TableCsvRoundTrip) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<RawFeatureVector> rows(50);
  std::vector<std::uint8_t> pop(50);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto& x : rows[i].values) x = std::exp(n(rng));
    pop[i] = i % 7 == 0;
  }
  const auto table = fit_cutoff_table(rows, pop, Measure::cheers, 3, 2);
  EXPECT_EQ(parse_cutoff_table_csv(cutoff_table_csv(table), 3, 2), table);
  const auto bits = binarize(rows[0], table);
  for (std::size_t f = 0; f < kNumFeatures; ++f) EXPECT_EQ(bits[f], rows[0][f] > table.at(f).c_f);
  EXPECT_THROW(parse_cutoff_table_csv("a,b\n", 1, 1), Error);
}

namespace {

Dataset label_dataset() {
  Dataset ds;
  // followers per month 1..10, plus one short-lived streamer
  for (int k = 1; k <= 10; ++k) ds.streamers.push_back(streamer("s" + std::to_string(k + 10), 12, k));
  ds.streamers.push_back(streamer("short", 2, 100));
  // viewer growth of streamer s20 is 5 per month, above the self-growth bar
  for (auto& p : ds.streamers[9].snapshots) p.avg_concurrent_viewers = 5.0 * p.month_index;
  finalize_dataset(ds);
  return ds;
}

}  // namespace

TEST(Labels, AbsoluteTopDecile) {
  const auto ds = label_dataset();
  const auto ls = absolute_label(ds, {Task::absolute, Measure::followers, 2, 2});
  ASSERT_EQ(ls.bits.size(), 10u);  // the short record ends before month 4
  EXPECT_EQ(ls.positives(), 1u);
  EXPECT_EQ(ds.streamers[ls.streamer_index[9]].id.value, "s20");
  EXPECT_EQ(ls.bits[9], 1);
  EXPECT_EQ(top_decile_threshold({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), 10);
}

TEST(Labels, RelativeGrowthAboveMedian) {
  const auto ds = label_dataset();
  const TaskSpec spec{Task::relative_growth, Measure::followers, 2, 3};
  const auto ls = relative_growth_label(ds, spec);
  // fractional growth is (5k - 2k) / 2k = 1.5 for everyone, so nobody is above the median
  EXPECT_EQ(ls.positives(), 0u);
  const auto abs = relative_growth_label(ds, spec, GrowthMode::absolute_difference);
  EXPECT_EQ(abs.positives(), 5u);  // 3k > median 3*5
  for (std::size_t i = 0; i < abs.bits.size(); ++i) EXPECT_EQ(abs.bits[i], i >= 5);
}

TEST(Labels, SelfGrowthNeedsFourViewersPerMonth) {
  const auto ds = label_dataset();
  const auto ls = self_growth_label(ds, {Task::self_growth, Measure::concurrent_viewers, 1, 3});
  EXPECT_EQ(ls.positives(), 1u);
  EXPECT_THROW(self_growth_label(ds, {Task::self_growth, Measure::followers, 1, 3}), Error);
}

TEST(Labels, SpecValidation) {
  EXPECT_THROW((TaskSpec{Task::absolute, Measure::followers, 0, 2}.validate()), Error);
  EXPECT_THROW((TaskSpec{Task::absolute, Measure::followers, 6, 7}.validate()), Error);
  EXPECT_NO_THROW((TaskSpec{Task::absolute, Measure::followers, 1, 11}.validate()));
  EXPECT_EQ(parse_task("relative_growth"), Task::relative_growth);
  EXPECT_FALSE(parse_task("growth"));
}

TEST(Labels, RelativeGrowthSplitsPopulationRoughlyInHalf) {
  const auto ds = generate(small_config(3, 400));
  for (int d : {1, 4, 8}) {
    const auto ls = relative_growth_label(ds, {Task::relative_growth, Measure::followers, 1, d});
    const double frac = static_cast<double>(ls.positives()) / static_cast<double>(ls.bits.size());
    EXPECT_GT(frac, 0.4);
    EXPECT_LE(frac, 0.5);
  }
}
