#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "streamgain/core_data.hpp"
#include "streamgain/synthgen.hpp"

namespace fixtures {

using namespace streamgain;

inline const Timestamp kOrigin = *parse_iso8601("2016-01-04T00:00:00Z");  // a Monday

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("streamgain_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Timestamp at(int day, int hour = 0, int minute = 0) {
  return kOrigin + day * kSecondsPerDay + hour * kSecondsPerHour + minute * 60;
}

inline Broadcast broadcast(Timestamp start, double minutes, std::vector<std::string> games = {"g1"},
                           double ccv = 3.0) {
  Broadcast b;
  b.start = start;
  b.duration_min = minutes;
  b.games = std::move(games);
  b.avg_concurrent_viewers = ccv;
  b.had_zero_viewers = ccv == 0.0;
  return b;
}

inline SocialPost tweet(Timestamp time, std::int64_t len = 80, bool url = false, bool live = false,
                        bool reply = false) {
  SocialPost p;
  p.platform = Platform::twitter;
  p.time = time;
  p.text_length = len;
  p.has_twitch_url = url;
  p.contains_live_keyword = live;
  p.is_reply = reply;
  return p;
}

/// Streamer created at kOrigin with `months`+1 snapshots of linearly growing
/// popularity.
inline StreamerRecord streamer(const std::string& id, int months = 12, std::int64_t followers_per_month = 10) {
  StreamerRecord s;
  s.id.value = id;
  s.account.twitch_created = kOrigin;
  for (int m = 0; m <= months; ++m) {
    PopularitySnapshot p;
    p.month_index = m;
    p.followers = followers_per_month * m;
    p.avg_concurrent_viewers = 0.5 * static_cast<double>(followers_per_month * m) / 10.0;
    p.cumulative_views = 20 * followers_per_month * m;
    p.cheers = m / 2;
    s.snapshots.push_back(p);
  }
  return s;
}

inline SynthConfig small_config(std::uint64_t seed = 1, int n = 300) {
  SynthConfig c;
  c.seed = seed;
  c.n_streamers = n;
  c.behavior_effect = 0.8;
  return c;
}

}  // namespace fixtures
