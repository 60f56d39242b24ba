#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "streamgain/dataset_io.hpp"

using namespace streamgain;
using namespace fixtures;

namespace {

Dataset tiny_dataset() {
  Dataset ds;
  auto a = streamer("alice");
  a.account.twitter_created = kOrigin - 10 * kSecondsPerDay;
  a.broadcasts = {broadcast(at(3, 18), 120, {"g1", "g2"}), broadcast(at(1, 20), 90)};
  a.posts = {tweet(at(1, 19), 50, true, true), tweet(at(2, 9), 20, false, false, true)};
  auto b = streamer("bob", 5, 3);
  b.account.youtube_created = kOrigin + 40 * kSecondsPerDay;
  SocialPost v;
  v.platform = Platform::youtube;
  v.time = at(45);
  v.video_length = 12.5;
  v.title_length = 30;
  v.description_length = 200;
  b.posts = {v};
  b.broadcasts = {broadcast(at(40, 1), 30, {}, 0.0)};
  ds.streamers = {b, a};
  ds.game_table.set_views(GamePopularityTable::global_month(kOrigin), "g1", 100);
  ds.game_table.set_views(GamePopularityTable::global_month(kOrigin), "g2", 0);
  finalize_dataset(ds);
  return ds;
}

std::string load_error(const std::filesystem::path& dir) {
  try {
    load_dataset(dir);
  } catch (const Error& e) {
    return e.kind() + ": " + e.what();
  }
  return "";
}

void replace_line(const std::filesystem::path& file, std::size_t line, const std::string& text) {
  std::istringstream in(read_text_file(file));
  std::string out, l;
  for (std::size_t n = 1; std::getline(in, l); ++n) out += (n == line ? text : l) + "\n";
  write_text_file(file, out);
}

}  // namespace

TEST(Dataset, FinalizeSortsStreamersAndEvents) {
  const auto ds = tiny_dataset();
  ASSERT_EQ(ds.streamers.size(), 2u);
  EXPECT_EQ(ds.streamers[0].id.value, "alice");
  EXPECT_LT(ds.streamers[0].broadcasts[0].start, ds.streamers[0].broadcasts[1].start);
  ASSERT_NE(ds.find(StreamerId{"bob"}), nullptr);
  EXPECT_EQ(ds.find(StreamerId{"carol"}), nullptr);
  EXPECT_TRUE(ds.game_table.is_popular(GamePopularityTable::global_month(kOrigin), "g1"));
  EXPECT_FALSE(ds.game_table.is_popular(GamePopularityTable::global_month(kOrigin), "g2"));
}

TEST(Dataset, SaveLoadRoundTrip) {
  const auto ds = tiny_dataset();
  const auto dir = temp_dir("roundtrip");
  save_dataset(ds, dir);
  EXPECT_EQ(load_dataset(dir), ds);
}

TEST(Dataset, GeneratedDatasetRoundTrips) {
  const auto ds = generate(small_config(4, 40));
  const auto dir = temp_dir("roundtrip_synth");
  save_dataset(ds, dir);
  EXPECT_EQ(load_dataset(dir), ds);
}

TEST(Dataset, MalformedRecordNamesFileAndLine) {
  const auto dir = temp_dir("bad_json");
  save_dataset(tiny_dataset(), dir);
  replace_line(dir / "broadcasts.jsonl", 2, "{\"streamer\": \"alice\", \"start\": ");
  EXPECT_EQ(load_error(dir).rfind("load: broadcasts.jsonl:2: malformed JSON record", 0), 0u) << load_error(dir);
}

TEST(Dataset, FieldErrorsNameFileAndLine) {
  struct Case {
    std::string file;
    std::string line;
    std::string expect;
  };
  const std::vector<Case> cases = {
      {"posts.jsonl", R"({"platform":"myspace","streamer":"alice","time":"2016-01-05T00:00:00Z"})",
       "posts.jsonl:1: platform must be one of"},
      {"broadcasts.jsonl", R"({"avg_ccv":1,"duration_min":-5,"games":[],"start":"2016-01-05T00:00:00Z","streamer":"alice","zero_viewers":false})",
       "broadcasts.jsonl:1: duration_min must be > 0"},
      {"broadcasts.jsonl", R"({"avg_ccv":1,"duration_min":5,"games":[],"start":"2016-01-05T00:00:00Z","streamer":"zed","zero_viewers":false})",
       "broadcasts.jsonl:1: unknown streamer zed"},
      {"posts.jsonl", R"({"platform":"twitter","streamer":"alice","time":"yesterday"})",
       "posts.jsonl:1: field 'time' is not ISO-8601"},
      {"games.csv", "12,game,many", "games.csv:1: expected header"},
  };
  for (const auto& c : cases) {
    const auto dir = temp_dir("bad_field");
    save_dataset(tiny_dataset(), dir);
    replace_line(dir / c.file, 1, c.line);
    EXPECT_NE(load_error(dir).find(c.expect), std::string::npos) << load_error(dir);
  }
}

TEST(Dataset, InvariantViolationsAreRejected) {
  auto bad = tiny_dataset();
  bad.streamers[0].snapshots[3].followers = 0;  // cumulative count decreases
  EXPECT_THROW(finalize_dataset(bad), Error);

  bad = tiny_dataset();
  bad.streamers[1].posts[0].platform = Platform::instagram;  // no instagram account
  EXPECT_THROW(finalize_dataset(bad), Error);

  bad = tiny_dataset();
  bad.streamers[0].broadcasts[0].start = kOrigin - 1;
  EXPECT_THROW(finalize_dataset(bad), Error);

  bad = tiny_dataset();
  bad.streamers.push_back(bad.streamers[0]);
  EXPECT_THROW(finalize_dataset(bad), Error);

  bad = tiny_dataset();
  bad.streamers[0].snapshots.erase(bad.streamers[0].snapshots.begin() + 2);
  EXPECT_THROW(finalize_dataset(bad), Error);
}

TEST(Dataset, MissingFileIsReported) {
  const auto dir = temp_dir("missing");
  save_dataset(tiny_dataset(), dir);
  std::filesystem::remove(dir / "posts.jsonl");
  EXPECT_NE(load_error(dir).find("missing required file"), std::string::npos);
}

TEST(Windows, EventsAreHalfOpen) {
  auto s = streamer("w");
  s.broadcasts = {broadcast(kOrigin + kSecondsPerMonth - 1, 10), broadcast(kOrigin + kSecondsPerMonth, 10),
                  broadcast(kOrigin + 2 * kSecondsPerMonth, 10)};
  s.normalize();
  const auto slice = window_events(s, 1, 1);
  ASSERT_EQ(slice.broadcasts.size(), 1u);
  EXPECT_EQ(slice.broadcasts[0].start, kOrigin + kSecondsPerMonth);
  EXPECT_EQ(window_events(s, 0, 1).broadcasts.size(), 1u);
  EXPECT_EQ(window_events(s, 0, 3).broadcasts.size(), 3u);
  EXPECT_THROW(window_events(s, 12, 2), Error);
  EXPECT_NO_THROW(window_events(s, 12, 1));
  EXPECT_EQ(account_age_months(s, kOrigin + 30 * kSecondsPerDay - 1), 0);
  EXPECT_EQ(account_age_months(s, kOrigin + 30 * kSecondsPerDay), 1);
}
