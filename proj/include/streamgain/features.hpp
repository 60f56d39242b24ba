#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "streamgain/core_data.hpp"

namespace streamgain {

enum class Feature : std::size_t {
  // broadcasting (Twitch)
  broadcast_gap, n_broadcast, n_games, broadcast_len, n_popular_game, n_days, sched_regularity,
  unique_games,
  // twitter
  n_tweet, twitter_live, tweet_before_gap, tweet_after_gap, twitter_adv, tweet_len, n_twitter_replies,
  // youtube
  n_youtube, youtube_desc_len, youtube_title_len, youtube_video_len, youtube_adv,
  // instagram
  n_instagram, n_tags_per_post, instagram_adv, instagram_post_len,
};

inline constexpr std::size_t kNumFeatures = 24;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "broadcast_gap", "n_broadcast",      "n_games",           "broadcast_len",
    "n_popular_game", "n_days",          "sched_regularity",  "unique_games",
    "n_tweet",       "twitter_live",     "tweet_before_gap",  "tweet_after_gap",
    "twitter_adv",   "tweet_len",        "n_twitter_replies", "n_youtube",
    "youtube_desc_len", "youtube_title_len", "youtube_video_len", "youtube_adv",
    "n_instagram",   "n_tags_per_post",  "instagram_adv",     "instagram_post_len",
};

inline std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }
inline std::string_view feature_name(std::size_t i) { return kFeatureNames.at(i); }

inline std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i)
    if (kFeatureNames[i] == name) return i;
  return std::nullopt;
}

/// Which platform's account a feature depends on (nullopt for Twitch features).
inline std::optional<Platform> feature_platform(std::size_t i) {
  if (i < 8) return std::nullopt;
  if (i < 15) return Platform::twitter;
  if (i < 20) return Platform::youtube;
  return Platform::instagram;
}

struct RawFeatureVector {
  std::array<double, kNumFeatures> values{};

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  bool operator==(const RawFeatureVector&) const = default;
};

namespace detail {

inline std::vector<Broadcast> canonical_broadcasts(std::span<const Broadcast> in) {
  std::vector<Broadcast> out(in.begin(), in.end());
  std::sort(out.begin(), out.end(), [](const Broadcast& a, const Broadcast& b) {
    return std::tie(a.start, a.duration_min, a.avg_concurrent_viewers, a.had_zero_viewers, a.games) <
           std::tie(b.start, b.duration_min, b.avg_concurrent_viewers, b.had_zero_viewers, b.games);
  });
  return out;
}

inline auto post_key(const SocialPost& p) {
  return std::make_tuple(p.time, p.platform, p.text_length, p.has_twitch_url, p.contains_live_keyword,
                         p.is_reply, p.tag_count, p.video_length, p.title_length, p.description_length);
}

inline double mean_or_zero(double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

}  // namespace detail

/// Sum over the seven weekdays of max(N_d - 1, 0), where N_d is the number of
/// distinct weeks (counted from `window_begin`) with a broadcast on weekday d.
/// Days and weeks are account-relative, so each week holds every weekday once.
inline double sched_regularity(std::span<const Broadcast> broadcasts, Timestamp window_begin) {
  std::array<std::set<std::int64_t>, 7> weeks;
  for (const auto& b : broadcasts) {
    const std::int64_t day = floor_div(b.start - window_begin, kSecondsPerDay);
    weeks[static_cast<std::size_t>(((day % 7) + 7) % 7)].insert(floor_div(day, 7));
  }
  double score = 0.0;
  for (const auto& w : weeks) score += static_cast<double>(std::max<std::int64_t>(
                                  static_cast<std::int64_t>(w.size()) - 1, 0));
  return score;
}

/// Mean over broadcasts of the number of platform-popular games played.
inline double popular_game_count(std::span<const Broadcast> broadcasts, const GamePopularityTable& table) {
  if (broadcasts.empty()) return 0.0;
  std::int64_t popular = 0;
  for (const auto& b : broadcasts) {
    const auto month = GamePopularityTable::global_month(b.start);
    for (const auto& g : b.games)
      if (table.is_popular(month, g)) ++popular;
  }
  return static_cast<double>(popular) / static_cast<double>(broadcasts.size());
}

struct TweetGaps {
  double before_hours = 0.0;
  double after_hours = 0.0;
};

/// Mean hours from the latest tweet at or before each broadcast start, and
/// from each broadcast end to the earliest tweet at or after it. Broadcasts
/// without such a tweet are left out of the respective mean.
inline TweetGaps tweet_gap_features(std::span<const Broadcast> broadcasts, std::span<const Timestamp> tweets) {
  std::vector<Timestamp> times(tweets.begin(), tweets.end());
  std::sort(times.begin(), times.end());
  std::vector<Timestamp> before, after;
  for (const auto& b : broadcasts) {
    auto it = std::upper_bound(times.begin(), times.end(), b.start);
    if (it != times.begin()) before.push_back(b.start - *std::prev(it));
    auto jt = std::lower_bound(times.begin(), times.end(), b.end());
    if (jt != times.end()) after.push_back(*jt - b.end());
  }
  auto mean_hours = [](std::vector<Timestamp>& v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    long double s = 0;
    for (auto x : v) s += static_cast<long double>(x);
    return static_cast<double>(s / v.size() / kSecondsPerHour);
  };
  return {mean_hours(before), mean_hours(after)};
}

/// All 24 behavioral features over one window. Inputs may be in any order.
inline RawFeatureVector compute_window_features(const Window& w, std::span<const Broadcast> broadcasts_in,
                                                std::span<const SocialPost> posts_in,
                                                const AccountInfo& account,
                                                const GamePopularityTable& games) {
  RawFeatureVector f;
  const auto broadcasts = detail::canonical_broadcasts(broadcasts_in);
  const std::size_t nb = broadcasts.size();

  // broadcasting
  if (nb < 2) {
    f[Feature::broadcast_gap] = w.hours();
  } else {
    double gap = 0.0;
    for (std::size_t i = 0; i + 1 < nb; ++i)
      gap += static_cast<double>(std::max<Timestamp>(broadcasts[i + 1].start - broadcasts[i].end(), 0));
    f[Feature::broadcast_gap] = gap / static_cast<double>(nb - 1) / kSecondsPerHour;
  }
  f[Feature::n_broadcast] = static_cast<double>(nb);
  {
    double games_sum = 0.0, len_sum = 0.0;
    std::set<std::string> unique;
    std::set<std::int64_t> days;
    for (const auto& b : broadcasts) {
      games_sum += static_cast<double>(b.games.size());
      len_sum += b.duration_min / 60.0;
      unique.insert(b.games.begin(), b.games.end());
      days.insert(floor_div(b.start - w.begin, kSecondsPerDay));
    }
    f[Feature::n_games] = detail::mean_or_zero(games_sum, nb);
    f[Feature::broadcast_len] = detail::mean_or_zero(len_sum, nb);
    f[Feature::unique_games] = static_cast<double>(unique.size());
    const double weeks = std::ceil(w.days() / 7.0);
    f[Feature::n_days] = weeks > 0 ? std::min(7.0, static_cast<double>(days.size()) / weeks) : 0.0;
  }
  f[Feature::n_popular_game] = popular_game_count(broadcasts, games);
  f[Feature::sched_regularity] = sched_regularity(broadcasts, w.begin);

  std::vector<SocialPost> posts(posts_in.begin(), posts_in.end());
  std::sort(posts.begin(), posts.end(),
            [](const SocialPost& a, const SocialPost& b) { return detail::post_key(a) < detail::post_key(b); });

  // Features of a platform stay 0 when the streamer has no account there.
  if (account.twitter_created) {
    std::vector<Timestamp> tweet_times;
    double len = 0.0, live = 0.0, adv = 0.0, replies = 0.0;
    for (const auto& p : posts) {
      if (p.platform != Platform::twitter) continue;
      tweet_times.push_back(p.time);
      len += static_cast<double>(p.text_length);
      live += p.contains_live_keyword ? 1.0 : 0.0;
      adv += p.has_twitch_url ? 1.0 : 0.0;
      replies += p.is_reply ? 1.0 : 0.0;
    }
    const auto n = tweet_times.size();
    f[Feature::n_tweet] = static_cast<double>(n);
    f[Feature::twitter_live] = live;
    f[Feature::twitter_adv] = adv;
    f[Feature::tweet_len] = detail::mean_or_zero(len, n);
    f[Feature::n_twitter_replies] = replies;
    const auto gaps = tweet_gap_features(broadcasts, tweet_times);
    f[Feature::tweet_before_gap] = gaps.before_hours;
    f[Feature::tweet_after_gap] = gaps.after_hours;
  }
  if (account.youtube_created) {
    std::size_t n = 0;
    double desc = 0.0, title = 0.0, video = 0.0, adv = 0.0;
    for (const auto& p : posts) {
      if (p.platform != Platform::youtube) continue;
      ++n;
      desc += static_cast<double>(p.description_length);
      title += static_cast<double>(p.title_length);
      video += p.video_length;
      adv += p.has_twitch_url ? 1.0 : 0.0;
    }
    f[Feature::n_youtube] = static_cast<double>(n);
    f[Feature::youtube_desc_len] = detail::mean_or_zero(desc, n);
    f[Feature::youtube_title_len] = detail::mean_or_zero(title, n);
    f[Feature::youtube_video_len] = detail::mean_or_zero(video, n);
    f[Feature::youtube_adv] = adv;
  }
  if (account.instagram_created) {
    std::size_t n = 0;
    double tags = 0.0, adv = 0.0, len = 0.0;
    for (const auto& p : posts) {
      if (p.platform != Platform::instagram) continue;
      ++n;
      tags += static_cast<double>(p.tag_count);
      adv += p.has_twitch_url ? 1.0 : 0.0;
      len += static_cast<double>(p.text_length);
    }
    f[Feature::n_instagram] = static_cast<double>(n);
    f[Feature::n_tags_per_post] = detail::mean_or_zero(tags, n);
    f[Feature::instagram_adv] = adv;
    f[Feature::instagram_post_len] = detail::mean_or_zero(len, n);
  }
  return f;
}

inline RawFeatureVector compute_features(const StreamerRecord& s, int t, int delta,
                                         const GamePopularityTable& games) {
  const EventSlice slice = window_events(s, t, delta);
  return compute_window_features(slice.window, slice.broadcasts, slice.posts, s.account, games);
}

inline std::string feature_csv_header() {
  std::string h = "streamer,t,delta";
  for (auto n : kFeatureNames) {
    h += ',';
    h += n;
  }
  return h;
}

}  // namespace streamgain
