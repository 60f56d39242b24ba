#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "streamgain/experiments.hpp"
#include "streamgain/synthgen.hpp"

using namespace streamgain;
using namespace fixtures;

TEST(Synth, DeterministicAcrossWorkerCounts) {
  const auto c = small_config(17, 120);
  const auto a = generate(c, 1);
  EXPECT_EQ(a, generate(c, 3));
  EXPECT_EQ(a, generate(c, 8));
  auto other = c;
  other.seed = 18;
  EXPECT_NE(a, generate(other, 1));
}

TEST(Synth, ConfigTextRoundTrips) {
  SynthConfig c = small_config(99, 77);
  c.drive_volume = 0.25;
  c.tail_exponent = 1.3;
  const auto back = synth_config_from(KeyValueConfig::parse(synth_config_text(c)));
  EXPECT_EQ(synth_config_text(back), synth_config_text(c));
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.n_streamers, 77);
}

TEST(Synth, ConfigErrors) {
  EXPECT_THROW(synth_config_from(KeyValueConfig::parse("n_streamer = 5\n")), Error);  // unknown key
  EXPECT_THROW(synth_config_from(KeyValueConfig::parse("behavior_effect = 1.5\n")), Error);
  EXPECT_THROW(synth_config_from(KeyValueConfig::parse("n_streamers = 3\n")), Error);
  EXPECT_THROW(synth_config_from(KeyValueConfig::parse("tail_exponent = 0\n")), Error);
  EXPECT_NO_THROW(synth_config_from(KeyValueConfig::parse("extra = 1\n"), {"extra"}));
}

TEST(Synth, DrivingFeaturesFollowWeights) {
  SynthConfig c;
  EXPECT_EQ(driving_features(c), (std::vector<std::string>{"broadcast_len", "n_popular_game", "twitter_adv"}));
  c.drive_volume = 1.0;
  c.drive_length = c.drive_promotion = c.drive_popular_games = 0.0;
  EXPECT_EQ(driving_features(c), (std::vector<std::string>{"n_broadcast"}));
}

TEST(Synth, RecordsSatisfyDatasetInvariants) {
  auto ds = generate(small_config(5, 200));
  EXPECT_NO_THROW(finalize_dataset(ds));
  for (const auto& s : ds.streamers) {
    EXPECT_EQ(s.last_month(), 14);
    for (const auto& b : s.broadcasts) EXPECT_EQ(b.had_zero_viewers, b.avg_concurrent_viewers == 0.0);
  }
}

TEST(Synth, CheerSparsityIsConfigurable) {
  for (double rate : {0.2, 0.45, 0.7}) {
    auto c = small_config(6, 1500);
    c.cheer_zero_rate = rate;
    const auto ds = generate(c);
    std::size_t zero = 0;
    for (const auto& s : ds.streamers) zero += s.snapshots.back().cheers == 0;
    const double frac = static_cast<double>(zero) / static_cast<double>(ds.streamers.size());
    EXPECT_NEAR(frac, rate, 0.05) << rate;
  }
}

TEST(Synth, FollowerSkewIsHeavy) {
  const auto ds = generate(small_config(8, 2000));
  const auto rep = population_stats(ds, 12);
  EXPECT_GE(rep.measures[0].top_decile_share, 0.7);
  EXPECT_LE(rep.measures[0].top_decile_share, 0.9);
}

// Slow: 15 datasets of 2000 streamers.
TEST(SynthSlow, PlantedGainGrowsWithBehaviorEffect) {
  std::vector<double> mean_gain;
  for (double beta : {0.0, 0.4, 0.8}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SynthConfig c;
      c.seed = seed;
      c.behavior_effect = beta;
      const auto ds = generate(c);
      ExperimentContext ctx(ds, split_streamers(ds.streamers.size(), seed));
      CellOptions opt;
      opt.split_seed = seed;
      opt.bootstrap_resamples = 2;
      const auto curve = run_interval_sweep(ctx, Task::relative_growth, Measure::followers, {2}, opt);
      ASSERT_TRUE(curve.points[0].ok()) << curve.points[0].reason;
      sum += curve.points[0].gain();
    }
    mean_gain.push_back(sum / 5);
  }
  EXPECT_LT(mean_gain[0], mean_gain[1]);
  EXPECT_LT(mean_gain[1], mean_gain[2]);
}
