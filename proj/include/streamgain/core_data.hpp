#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamgain/error.hpp"
#include "streamgain/time.hpp"

namespace streamgain {

struct StreamerId {
  std::string value;

  auto operator<=>(const StreamerId&) const = default;
  bool operator==(const StreamerId&) const = default;
};

enum class Platform { twitter, youtube, instagram };
inline constexpr std::array<Platform, 3> kPlatforms = {Platform::twitter, Platform::youtube,
                                                       Platform::instagram};

inline std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::twitter: return "twitter";
    case Platform::youtube: return "youtube";
    case Platform::instagram: return "instagram";
  }
  return "?";
}

inline std::optional<Platform> parse_platform(std::string_view s) {
  for (Platform p : kPlatforms)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

enum class Measure { followers, concurrent_viewers, cumulative_views, cheers };
inline constexpr std::array<Measure, 4> kMeasures = {Measure::followers, Measure::concurrent_viewers,
                                                     Measure::cumulative_views, Measure::cheers};

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::followers: return "followers";
    case Measure::concurrent_viewers: return "concurrent_viewers";
    case Measure::cumulative_views: return "cumulative_views";
    case Measure::cheers: return "cheers";
  }
  return "?";
}

inline std::optional<Measure> parse_measure(std::string_view s) {
  for (Measure m : kMeasures)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct Broadcast {
  Timestamp start = 0;
  double duration_min = 0.0;
  std::vector<std::string> games;
  double avg_concurrent_viewers = 0.0;
  bool had_zero_viewers = false;

  Timestamp end() const { return start + static_cast<Timestamp>(std::llround(duration_min * 60.0)); }
  bool operator==(const Broadcast&) const = default;
};

struct SocialPost {
  Platform platform = Platform::twitter;
  Timestamp time = 0;
  std::int64_t text_length = 0;
  bool has_twitch_url = false;
  bool contains_live_keyword = false;
  bool is_reply = false;
  std::int64_t tag_count = 0;           // instagram only
  double video_length = 0.0;            // youtube only, minutes
  std::int64_t title_length = 0;        // youtube only
  std::int64_t description_length = 0; // youtube only

  bool operator==(const SocialPost&) const = default;
};

struct AccountInfo {
  Timestamp twitch_created = 0;
  std::optional<Timestamp> twitter_created;
  std::optional<Timestamp> youtube_created;
  std::optional<Timestamp> instagram_created;

  const std::optional<Timestamp>& created(Platform p) const {
    switch (p) {
      case Platform::twitter: return twitter_created;
      case Platform::youtube: return youtube_created;
      case Platform::instagram: return instagram_created;
    }
    return twitter_created;
  }
  std::optional<Timestamp>& created(Platform p) {
    return const_cast<std::optional<Timestamp>&>(std::as_const(*this).created(p));
  }
  bool operator==(const AccountInfo&) const = default;
};

/// Popularity at account age `month_index` months. Followers, views and cheers
/// are cumulative; `avg_concurrent_viewers` is the average over the month
/// ending at that age.
struct PopularitySnapshot {
  int month_index = 0;
  std::int64_t followers = 0;
  double avg_concurrent_viewers = 0.0;
  std::int64_t cumulative_views = 0;
  std::int64_t cheers = 0;

  double value(Measure m) const {
    switch (m) {
      case Measure::followers: return static_cast<double>(followers);
      case Measure::concurrent_viewers: return avg_concurrent_viewers;
      case Measure::cumulative_views: return static_cast<double>(cumulative_views);
      case Measure::cheers: return static_cast<double>(cheers);
    }
    return 0.0;
  }
  bool operator==(const PopularitySnapshot&) const = default;
};

/// Platform-wide views per (month, game). Months here are global 30-day
/// months counted from the Unix epoch, see `global_month`.
class GamePopularityTable {
 public:
  static std::int64_t global_month(Timestamp ts) { return floor_div(ts, kSecondsPerMonth); }

  void set_views(std::int64_t month, const std::string& game, std::int64_t views) {
    if (views < 0) fail("invariant", "games: negative views for " + game);
    views_[month][game] = views;
    popular_.clear();
    indexed_ = false;
  }

  const std::map<std::int64_t, std::map<std::string, std::int64_t>>& views() const { return views_; }

  /// Builds the per-month popular-game sets. Must be called once the table is
  /// complete; lookups on an unindexed table throw.
  void build_index() {
    popular_.clear();
    for (const auto& [month, games] : views_) {
      std::vector<std::int64_t> nonzero;
      for (const auto& [g, v] : games)
        if (v > 0) nonzero.push_back(v);
      if (nonzero.empty()) continue;
      std::sort(nonzero.begin(), nonzero.end(), std::greater<>());
      // top decile by rank, at least one game, ties with the last rank included
      const std::size_t top = (nonzero.size() + 9) / 10;
      const std::int64_t threshold = nonzero[top - 1];
      auto& set = popular_[month];
      for (const auto& [g, v] : games)
        if (v > 0 && v >= threshold) set.insert(g);
    }
    indexed_ = true;
  }

  bool is_popular(std::int64_t month, const std::string& game) const {
    if (!indexed_) fail("state", "game table used before build_index()");
    auto it = popular_.find(month);
    return it != popular_.end() && it->second.count(game) > 0;
  }

  bool operator==(const GamePopularityTable& o) const { return views_ == o.views_; }

 private:
  std::map<std::int64_t, std::map<std::string, std::int64_t>> views_;
  std::map<std::int64_t, std::set<std::string>> popular_;
  bool indexed_ = true;
};

struct StreamerRecord {
  StreamerId id;
  AccountInfo account;
  std::vector<Broadcast> broadcasts;  // sorted by start after normalize()
  std::vector<SocialPost> posts;      // sorted by time after normalize()
  std::vector<PopularitySnapshot> snapshots;

  void normalize() {
    std::stable_sort(broadcasts.begin(), broadcasts.end(),
                     [](const Broadcast& a, const Broadcast& b) { return a.start < b.start; });
    std::stable_sort(posts.begin(), posts.end(),
                     [](const SocialPost& a, const SocialPost& b) { return a.time < b.time; });
    std::stable_sort(snapshots.begin(), snapshots.end(),
                     [](const PopularitySnapshot& a, const PopularitySnapshot& b) {
                       return a.month_index < b.month_index;
                     });
  }

  int last_month() const { return snapshots.empty() ? -1 : snapshots.back().month_index; }

  const PopularitySnapshot* snapshot_at(int month) const {
    if (month < 0 || month > last_month()) return nullptr;
    return &snapshots[static_cast<std::size_t>(month)];
  }

  bool has_account(Platform p) const { return account.created(p).has_value(); }

  bool operator==(const StreamerRecord&) const = default;
};

struct Dataset {
  std::vector<StreamerRecord> streamers;  // sorted by id
  GamePopularityTable game_table;

  const StreamerRecord* find(const StreamerId& id) const {
    auto it = std::lower_bound(streamers.begin(), streamers.end(), id,
                               [](const StreamerRecord& r, const StreamerId& k) { return r.id < k; });
    return (it != streamers.end() && it->id == id) ? &*it : nullptr;
  }

  bool operator==(const Dataset&) const = default;
};

inline void validate_streamer(const StreamerRecord& s) {
  const std::string who = "streamer " + s.id.value + ": ";
  if (s.id.value.empty()) fail("invariant", "streamer with empty id");
  if (s.snapshots.empty()) fail("invariant", who + "snapshots: at least one required");
  for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
    const auto& snap = s.snapshots[i];
    if (snap.month_index != static_cast<int>(i))
      fail("invariant", who + "snapshots.month: expected contiguous months from 0, got " +
                            std::to_string(snap.month_index) + " at position " + std::to_string(i));
    if (snap.followers < 0 || snap.cumulative_views < 0 || snap.cheers < 0 ||
        !(snap.avg_concurrent_viewers >= 0.0) || !std::isfinite(snap.avg_concurrent_viewers))
      fail("invariant", who + "snapshots: negative or non-finite value at month " +
                            std::to_string(snap.month_index));
    if (i > 0) {
      const auto& prev = s.snapshots[i - 1];
      auto check = [&](std::int64_t a, std::int64_t b, const char* field) {
        if (b < a)
          fail("invariant", who + field + " decreases from month " + std::to_string(i - 1) +
                                " to " + std::to_string(i));
      };
      check(prev.followers, snap.followers, "followers");
      check(prev.cumulative_views, snap.cumulative_views, "cumulative_views");
      check(prev.cheers, snap.cheers, "cheers");
    }
  }
  const Timestamp created = s.account.twitch_created;
  for (const auto& b : s.broadcasts) {
    if (!(b.duration_min > 0.0) || !std::isfinite(b.duration_min))
      fail("invariant", who + "broadcast duration must be > 0 at " + format_iso8601(b.start));
    if (!(b.avg_concurrent_viewers >= 0.0) || !std::isfinite(b.avg_concurrent_viewers))
      fail("invariant", who + "broadcast avg_ccv must be >= 0 at " + format_iso8601(b.start));
    if (b.start < created)
      fail("invariant", who + "broadcast at " + format_iso8601(b.start) + " precedes account creation");
  }
  for (const auto& p : s.posts) {
    if (p.time < created)
      fail("invariant", who + "post at " + format_iso8601(p.time) + " precedes account creation");
    if (!s.has_account(p.platform))
      fail("invariant", who + "post on " + std::string(to_string(p.platform)) +
                            " without a " + std::string(to_string(p.platform)) + " account");
    if (p.text_length < 0 || p.tag_count < 0 || p.title_length < 0 || p.description_length < 0 ||
        !(p.video_length >= 0.0))
      fail("invariant", who + "post field negative at " + format_iso8601(p.time));
    const bool yt = p.platform == Platform::youtube;
    const bool ig = p.platform == Platform::instagram;
    const bool tw = p.platform == Platform::twitter;
    if ((!ig && p.tag_count != 0) ||
        (!yt && (p.video_length != 0.0 || p.title_length != 0 || p.description_length != 0)) ||
        (!tw && (p.is_reply || p.contains_live_keyword)))
      fail("invariant", who + "platform-specific field set on a " +
                            std::string(to_string(p.platform)) + " post at " + format_iso8601(p.time));
  }
}

/// Sorts streamers and their events, indexes the game table and checks every
/// dataset invariant. Throws `Error` on the first violation.
inline void finalize_dataset(Dataset& ds) {
  if (ds.streamers.empty()) fail("invariant", "no streamers");
  for (auto& s : ds.streamers) s.normalize();
  std::sort(ds.streamers.begin(), ds.streamers.end(),
            [](const StreamerRecord& a, const StreamerRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < ds.streamers.size(); ++i)
    if (ds.streamers[i].id == ds.streamers[i - 1].id)
      fail("invariant", "duplicate streamer id " + ds.streamers[i].id.value);
  for (const auto& s : ds.streamers) validate_streamer(s);
  ds.game_table.build_index();
}

/// Account age window [t, t+delta) in months, as absolute timestamps.
struct Window {
  int t = 0;
  int delta = 1;
  Timestamp begin = 0;
  Timestamp end = 0;

  double hours() const { return static_cast<double>(end - begin) / kSecondsPerHour; }
  double days() const { return static_cast<double>(end - begin) / kSecondsPerDay; }
};

inline Window make_window(const StreamerRecord& s, int t, int delta) {
  if (t < 0 || delta < 1)
    fail("window", "streamer " + s.id.value + ": invalid window t=" + std::to_string(t) +
                       " delta=" + std::to_string(delta));
  if (t + delta > s.last_month() + 1)
    fail("window", "streamer " + s.id.value + ": window [" + std::to_string(t) + "," +
                       std::to_string(t + delta) + ") outside recorded lifespan of " +
                       std::to_string(s.last_month()) + " months");
  const Timestamp c = s.account.twitch_created;
  return {t, delta, c + t * kSecondsPerMonth, c + (t + delta) * kSecondsPerMonth};
}

struct EventSlice {
  Window window;
  std::span<const Broadcast> broadcasts;
  std::span<const SocialPost> posts;
};

/// Events of a normalized streamer record whose timestamps fall in
/// [created + t months, created + (t+delta) months).
inline EventSlice window_events(const StreamerRecord& s, int t, int delta) {
  const Window w = make_window(s, t, delta);
  auto b0 = std::lower_bound(s.broadcasts.begin(), s.broadcasts.end(), w.begin,
                             [](const Broadcast& b, Timestamp ts) { return b.start < ts; });
  auto b1 = std::lower_bound(b0, s.broadcasts.end(), w.end,
                             [](const Broadcast& b, Timestamp ts) { return b.start < ts; });
  auto p0 = std::lower_bound(s.posts.begin(), s.posts.end(), w.begin,
                             [](const SocialPost& p, Timestamp ts) { return p.time < ts; });
  auto p1 = std::lower_bound(p0, s.posts.end(), w.end,
                             [](const SocialPost& p, Timestamp ts) { return p.time < ts; });
  return {w, {b0, b1}, {p0, p1}};
}

inline int account_age_months(const StreamerRecord& s, Timestamp at) {
  if (at < s.account.twitch_created)
    fail("window", "streamer " + s.id.value + ": " + format_iso8601(at) + " precedes account creation");
  return static_cast<int>((at - s.account.twitch_created) / kSecondsPerMonth);
}

}  // namespace streamgain
