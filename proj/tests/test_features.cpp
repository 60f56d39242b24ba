#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "streamgain/features.hpp"
#include "streamgain/oracle.hpp"

using namespace streamgain;
using namespace fixtures;

namespace {

struct Example {
  StreamerRecord s;
  GamePopularityTable games;
};

Example hand_example() {
  Example e;
  e.s = streamer("hand");
  e.s.account.twitter_created = kOrigin;
  e.s.account.instagram_created = kOrigin;
  e.s.broadcasts = {broadcast(at(1, 20), 90), broadcast(at(3, 18), 120, {"g1", "g2"}), broadcast(at(8, 20), 60)};
  e.s.posts = {tweet(at(1, 19), 50, true, true), tweet(at(2, 9), 20, false, false, true), tweet(at(8, 21, 30), 110)};
  for (auto [tags, url, len] : {std::tuple{3, true, 100}, std::tuple{5, false, 200}}) {
    SocialPost p;
    p.platform = Platform::instagram;
    p.time = at(4 + tags);
    p.tag_count = tags;
    p.has_twitch_url = url;
    p.text_length = len;
    e.s.posts.push_back(p);
  }
  e.s.normalize();
  const auto month = GamePopularityTable::global_month(at(1));
  for (int g = 0; g < 12; ++g) e.games.set_views(month, "other" + std::to_string(g), 10 + g);
  e.games.set_views(month, "g1", 1000);
  e.games.set_views(month, "g2", 5);
  e.games.build_index();
  return e;
}

}  // namespace

TEST(Features, HandComputedWindow) {
  const auto e = hand_example();
  ASSERT_EQ(GamePopularityTable::global_month(at(1)), GamePopularityTable::global_month(at(9)));
  const auto f = compute_features(e.s, 0, 1, e.games);
  EXPECT_DOUBLE_EQ(f[Feature::n_broadcast], 3);
  EXPECT_DOUBLE_EQ(f[Feature::broadcast_gap], (44.5 + 120.0) / 2);
  EXPECT_DOUBLE_EQ(f[Feature::n_games], 4.0 / 3);
  EXPECT_DOUBLE_EQ(f[Feature::broadcast_len], 1.5);
  EXPECT_DOUBLE_EQ(f[Feature::unique_games], 2);
  EXPECT_DOUBLE_EQ(f[Feature::n_days], 3.0 / 5);
  EXPECT_DOUBLE_EQ(f[Feature::n_popular_game], 1.0);  // only g1 is in the top decile
  EXPECT_DOUBLE_EQ(f[Feature::sched_regularity], 1);  // Tuesday in weeks 0 and 1
  EXPECT_DOUBLE_EQ(f[Feature::n_tweet], 3);
  EXPECT_DOUBLE_EQ(f[Feature::twitter_live], 1);
  EXPECT_DOUBLE_EQ(f[Feature::twitter_adv], 1);
  EXPECT_DOUBLE_EQ(f[Feature::n_twitter_replies], 1);
  EXPECT_DOUBLE_EQ(f[Feature::tweet_len], 60);
  EXPECT_DOUBLE_EQ(f[Feature::tweet_before_gap], (1 + 33 + 155) / 3.0);
  EXPECT_DOUBLE_EQ(f[Feature::tweet_after_gap], (11.5 + 121.5 + 0.5) / 3.0);
  EXPECT_DOUBLE_EQ(f[Feature::n_instagram], 2);
  EXPECT_DOUBLE_EQ(f[Feature::n_tags_per_post], 4);
  EXPECT_DOUBLE_EQ(f[Feature::instagram_adv], 1);
  EXPECT_DOUBLE_EQ(f[Feature::instagram_post_len], 150);
  for (auto g : {Feature::n_youtube, Feature::youtube_adv, Feature::youtube_video_len}) EXPECT_EQ(f[g], 0.0);
}

TEST(Features, EmptyWindow) {
  const auto e = hand_example();
  const auto f = compute_features(e.s, 2, 3, e.games);
  EXPECT_DOUBLE_EQ(f[Feature::broadcast_gap], 90.0 * 24);
  for (std::size_t i = 1; i < kNumFeatures; ++i) EXPECT_EQ(f[i], 0.0) << feature_name(i);
}

TEST(Features, NamesAndPlatforms) {
  EXPECT_EQ(kFeatureNames.size(), 24u);
  for (std::size_t i = 0; i < kNumFeatures; ++i) EXPECT_EQ(feature_index(feature_name(i)), i);
  EXPECT_FALSE(feature_index("followers"));
  EXPECT_FALSE(feature_platform(*feature_index("sched_regularity")));
  EXPECT_EQ(feature_platform(*feature_index("twitter_adv")), Platform::twitter);
  EXPECT_EQ(feature_platform(*feature_index("youtube_adv")), Platform::youtube);
  EXPECT_EQ(feature_platform(*feature_index("instagram_adv")), Platform::instagram);
  EXPECT_EQ(feature_csv_header().substr(0, 32), "streamer,t,delta,broadcast_gap,n");
}

TEST(Features, IndependentOfInputOrder) {
  const auto ds = generate(small_config(9, 30));
  std::mt19937_64 rng(1);
  for (const auto& s : ds.streamers) {
    const auto slice = window_events(s, 2, 3);
    std::vector<Broadcast> b(slice.broadcasts.begin(), slice.broadcasts.end());
    std::vector<SocialPost> p(slice.posts.begin(), slice.posts.end());
    std::shuffle(b.begin(), b.end(), rng);
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_EQ(compute_window_features(slice.window, b, p, s.account, ds.game_table),
              compute_features(s, 2, 3, ds.game_table));
  }
}

TEST(Features, RegularityMatchesTabulation) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = oracle::check_regularity(seed, 100);
    EXPECT_TRUE(r.passed) << r.detail;
  }
}

TEST(Features, RegularityCountsRepeatWeeksOnly) {
  std::vector<Broadcast> b;
  EXPECT_EQ(sched_regularity(b, kOrigin), 0.0);
  for (int w = 0; w < 4; ++w) b.push_back(broadcast(at(7 * w + 2, 20), 60));  // every Wednesday
  b.push_back(broadcast(at(2, 22), 60));                                     // second session, same day
  EXPECT_EQ(sched_regularity(b, kOrigin), 3.0);
  EXPECT_EQ(sched_regularity(b, kOrigin), oracle::tabulate_regularity(b, kOrigin));
}

TEST(Features, TweetGapsSkipBroadcastsWithoutNeighbours) {
  const std::vector<Broadcast> b = {broadcast(at(1, 10), 60), broadcast(at(5, 10), 60)};
  const std::vector<Timestamp> t = {at(3)};
  const auto g = tweet_gap_features(b, t);
  EXPECT_DOUBLE_EQ(g.before_hours, 58.0);  // day 5 10:00 minus day 3 00:00
  EXPECT_DOUBLE_EQ(g.after_hours, 37.0);   // day 3 00:00 minus day 1 11:00
}
