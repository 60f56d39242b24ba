#pragma once

// Reading and writing the on-disk dataset layout:
//
//   streamers.jsonl   {"id", "twitch_created", "twitter_created"?, "youtube_created"?,
//                      "instagram_created"?, "snapshots": [{"month", "followers",
//                      "avg_ccv", "cumulative_views", "cheers"}, ...]}
//   broadcasts.jsonl  {"streamer", "start", "duration_min", "games", "avg_ccv", "zero_viewers"}
//   posts.jsonl       {"streamer", "platform", "time", ...SocialPost fields, absent = 0/false}
//   games.csv         month_index,game_id,total_views
//
// Timestamps are ISO-8601 UTC with a `Z` suffix; counts are base-10 integers.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "streamgain/core_data.hpp"
#include "streamgain/csv.hpp"

namespace streamgain {

namespace detail {

using nlohmann::json;

struct LineContext {
  std::string file;
  std::size_t line = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail("load", file + ":" + std::to_string(line) + ": " + msg);
  }

  const json& field(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) error(std::string("missing field '") + key + "'");
    return *it;
  }

  std::int64_t count(const json& v, const char* key) const {
    if (!v.is_number_integer()) error(std::string("field '") + key + "' must be an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 0) error(std::string("field '") + key + "' must be >= 0");
    return n;
  }

  double real(const json& v, const char* key) const {
    if (!v.is_number()) error(std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }

  Timestamp time(const json& v, const char* key) const {
    if (!v.is_string()) error(std::string("field '") + key + "' must be an ISO-8601 string");
    auto ts = parse_iso8601(v.get_ref<const std::string&>());
    if (!ts) error(std::string("field '") + key + "' is not ISO-8601 UTC: " + v.get<std::string>());
    return *ts;
  }

  bool flag(const json& v, const char* key) const {
    if (!v.is_boolean()) error(std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
  }

  std::string string(const json& v, const char* key) const {
    if (!v.is_string()) error(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }
};

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) fail("load", "missing required file " + path.string());
  LineContext ctx{path.filename().string(), 0};
  std::string line;
  while (std::getline(in, line)) {
    ++ctx.line;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) ctx.error("malformed JSON record");
    fn(obj, ctx);
  }
}

}  // namespace detail

inline Dataset load_dataset(const std::filesystem::path& dir) {
  using detail::json;
  using detail::LineContext;
  Dataset ds;
  std::map<std::string, std::size_t> index;

  detail::for_each_jsonl(dir / "streamers.jsonl", [&](const json& o, const LineContext& c) {
    StreamerRecord s;
    s.id.value = c.string(c.field(o, "id"), "id");
    if (s.id.value.empty()) c.error("empty streamer id");
    if (index.count(s.id.value)) c.error("duplicate streamer id " + s.id.value);
    s.account.twitch_created = c.time(c.field(o, "twitch_created"), "twitch_created");
    for (Platform p : kPlatforms) {
      const std::string key = std::string(to_string(p)) + "_created";
      auto it = o.find(key);
      if (it != o.end() && !it->is_null()) s.account.created(p) = c.time(*it, key.c_str());
    }
    const json& snaps = c.field(o, "snapshots");
    if (!snaps.is_array()) c.error("field 'snapshots' must be an array");
    for (const json& js : snaps) {
      if (!js.is_object()) c.error("snapshot entries must be objects");
      PopularitySnapshot snap;
      snap.month_index = static_cast<int>(c.count(c.field(js, "month"), "month"));
      snap.followers = c.count(c.field(js, "followers"), "followers");
      snap.avg_concurrent_viewers = c.real(c.field(js, "avg_ccv"), "avg_ccv");
      snap.cumulative_views = c.count(c.field(js, "cumulative_views"), "cumulative_views");
      snap.cheers = c.count(c.field(js, "cheers"), "cheers");
      s.snapshots.push_back(snap);
    }
    index.emplace(s.id.value, ds.streamers.size());
    ds.streamers.push_back(std::move(s));
  });
  if (ds.streamers.empty()) fail("invariant", "no streamers");

  auto owner = [&](const json& o, const LineContext& c) -> StreamerRecord& {
    auto id = c.string(c.field(o, "streamer"), "streamer");
    auto it = index.find(id);
    if (it == index.end()) c.error("unknown streamer " + id);
    return ds.streamers[it->second];
  };

  detail::for_each_jsonl(dir / "broadcasts.jsonl", [&](const json& o, const LineContext& c) {
    StreamerRecord& s = owner(o, c);
    Broadcast b;
    b.start = c.time(c.field(o, "start"), "start");
    b.duration_min = c.real(c.field(o, "duration_min"), "duration_min");
    if (!(b.duration_min > 0.0)) c.error("duration_min must be > 0");
    const json& games = c.field(o, "games");
    if (!games.is_array()) c.error("field 'games' must be an array");
    for (const json& g : games) b.games.push_back(c.string(g, "games"));
    b.avg_concurrent_viewers = c.real(c.field(o, "avg_ccv"), "avg_ccv");
    if (!(b.avg_concurrent_viewers >= 0.0)) c.error("avg_ccv must be >= 0");
    b.had_zero_viewers = c.flag(c.field(o, "zero_viewers"), "zero_viewers");
    s.broadcasts.push_back(std::move(b));
  });

  detail::for_each_jsonl(dir / "posts.jsonl", [&](const json& o, const LineContext& c) {
    StreamerRecord& s = owner(o, c);
    SocialPost p;
    auto platform = parse_platform(c.string(c.field(o, "platform"), "platform"));
    if (!platform) c.error("platform must be one of twitter, youtube, instagram");
    p.platform = *platform;
    p.time = c.time(c.field(o, "time"), "time");
    auto opt = [&](const char* key) -> const json* {
      auto it = o.find(key);
      return it == o.end() || it->is_null() ? nullptr : &*it;
    };
    if (auto* v = opt("text_length")) p.text_length = c.count(*v, "text_length");
    if (auto* v = opt("has_twitch_url")) p.has_twitch_url = c.flag(*v, "has_twitch_url");
    if (auto* v = opt("contains_live_keyword")) p.contains_live_keyword = c.flag(*v, "contains_live_keyword");
    if (auto* v = opt("is_reply")) p.is_reply = c.flag(*v, "is_reply");
    if (auto* v = opt("tag_count")) p.tag_count = c.count(*v, "tag_count");
    if (auto* v = opt("video_length")) {
      p.video_length = c.real(*v, "video_length");
      if (!(p.video_length >= 0.0)) c.error("video_length must be >= 0");
    }
    if (auto* v = opt("title_length")) p.title_length = c.count(*v, "title_length");
    if (auto* v = opt("description_length")) p.description_length = c.count(*v, "description_length");
    s.posts.push_back(p);
  });

  {
    const auto path = dir / "games.csv";
    std::ifstream in(path);
    if (!in) fail("load", "missing required file " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (n == 1) {
        if (line != "month_index,game_id,total_views")
          fail("load", "games.csv:1: expected header month_index,game_id,total_views");
        continue;
      }
      if (line.empty()) continue;
      auto f = split_csv_line(line);
      auto bad = [&](const std::string& msg) { fail("load", "games.csv:" + std::to_string(n) + ": " + msg); };
      if (f.size() != 3) bad("expected 3 fields");
      std::int64_t month = 0, views = 0;
      auto r1 = std::from_chars(f[0].data(), f[0].data() + f[0].size(), month);
      auto r2 = std::from_chars(f[2].data(), f[2].data() + f[2].size(), views);
      if (r1.ec != std::errc() || r1.ptr != f[0].data() + f[0].size()) bad("month_index not an integer");
      if (r2.ec != std::errc() || r2.ptr != f[2].data() + f[2].size()) bad("total_views not an integer");
      if (views < 0) bad("total_views must be >= 0");
      if (f[1].empty()) bad("empty game_id");
      ds.game_table.set_views(month, f[1], views);
    }
  }

  finalize_dataset(ds);
  return ds;
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  using nlohmann::json;
  std::filesystem::create_directories(dir);
  std::ostringstream st, br, po;
  for (const auto& s : ds.streamers) {
    json o;
    o["id"] = s.id.value;
    o["twitch_created"] = format_iso8601(s.account.twitch_created);
    for (Platform p : kPlatforms)
      if (const auto& ts = s.account.created(p)) o[std::string(to_string(p)) + "_created"] = format_iso8601(*ts);
    json snaps = json::array();
    for (const auto& snap : s.snapshots)
      snaps.push_back({{"month", snap.month_index},
                       {"followers", snap.followers},
                       {"avg_ccv", snap.avg_concurrent_viewers},
                       {"cumulative_views", snap.cumulative_views},
                       {"cheers", snap.cheers}});
    o["snapshots"] = std::move(snaps);
    st << o.dump() << '\n';

    for (const auto& b : s.broadcasts) {
      json j{{"streamer", s.id.value},
             {"start", format_iso8601(b.start)},
             {"duration_min", b.duration_min},
             {"games", b.games},
             {"avg_ccv", b.avg_concurrent_viewers},
             {"zero_viewers", b.had_zero_viewers}};
      br << j.dump() << '\n';
    }
    for (const auto& p : s.posts) {
      json j{{"streamer", s.id.value}, {"platform", to_string(p.platform)}, {"time", format_iso8601(p.time)}};
      if (p.text_length) j["text_length"] = p.text_length;
      if (p.has_twitch_url) j["has_twitch_url"] = true;
      if (p.contains_live_keyword) j["contains_live_keyword"] = true;
      if (p.is_reply) j["is_reply"] = true;
      if (p.tag_count) j["tag_count"] = p.tag_count;
      if (p.video_length != 0.0) j["video_length"] = p.video_length;
      if (p.title_length) j["title_length"] = p.title_length;
      if (p.description_length) j["description_length"] = p.description_length;
      po << j.dump() << '\n';
    }
  }
  std::ostringstream gm;
  gm << "month_index,game_id,total_views\n";
  for (const auto& [month, games] : ds.game_table.views())
    for (const auto& [g, v] : games) gm << month << ',' << g << ',' << v << '\n';

  write_text_file(dir / "streamers.jsonl", st.str());
  write_text_file(dir / "broadcasts.jsonl", br.str());
  write_text_file(dir / "posts.jsonl", po.str());
  write_text_file(dir / "games.csv", gm.str());
}

}  // namespace streamgain
