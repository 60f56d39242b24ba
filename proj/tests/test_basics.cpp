#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "streamgain/csv.hpp"
#include "streamgain/kvconfig.hpp"
#include "streamgain/parallel.hpp"
#include "streamgain/seeds.hpp"
#include "streamgain/time.hpp"

using namespace streamgain;

TEST(Time, ParsesKnownInstants) {
  EXPECT_EQ(parse_iso8601("2016-01-01T00:00:00Z"), 1451606400);
  EXPECT_EQ(parse_iso8601("2000-02-29T12:34:56Z"), 951827696);
  EXPECT_EQ(parse_iso8601("1969-12-31T23:59:59Z"), -1);
  EXPECT_EQ(parse_iso8601("2016-01-01T00:00:00.750Z"), 1451606400);
}

TEST(Time, RejectsMalformed) {
  for (const char* s : {"2016-01-01 00:00:00Z", "2016-01-01T00:00:00", "2015-02-29T00:00:00Z",
                        "2016-13-01T00:00:00Z", "2016-01-01T24:00:00Z", "2016-01-01T00:00:00.5xZ", ""})
    EXPECT_FALSE(parse_iso8601(s)) << s;
}

TEST(Time, FormatRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> ts(-2000000000LL, 4000000000LL);
  for (int i = 0; i < 2000; ++i) {
    const auto t = ts(rng);
    EXPECT_EQ(parse_iso8601(format_iso8601(t)), t);
  }
}

TEST(Time, FloorDivRoundsDown) {
  EXPECT_EQ(floor_div(7, 2), 3);
  EXPECT_EQ(floor_div(-7, 2), -4);
  EXPECT_EQ(floor_div(-6, 2), -3);
  EXPECT_EQ(floor_div(0, 5), 0);
}

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1e6);
  for (int i = 0; i < 5000; ++i) {
    const double v = n(rng) / 3.0;
    EXPECT_EQ(parse_number(format_number(v)), v);
  }
  EXPECT_TRUE(std::isnan(parse_number(format_number(std::nan("")))));
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_THROW(parse_number("1.5x"), Error);
}

TEST(Csv, SplitsLines) {
  EXPECT_EQ(split_csv_line("a,,b\r"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split_csv_line(""), (std::vector<std::string>{""}));
}

TEST(KeyValueConfig, ParsesAndTypes) {
  auto kv = KeyValueConfig::parse("# comment\n a = 3 \nb=2.5\nflag = yes\nlist = x, y ,,z\n");
  EXPECT_EQ(kv.get_int<int>("a", 0), 3);
  EXPECT_DOUBLE_EQ(kv.get_double("b", 0), 2.5);
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.get_list("list"), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(kv.get_string("missing", "d"), "d");
  EXPECT_THROW(kv.require_known({"a", "b"}), Error);
  EXPECT_NO_THROW(kv.require_known({"a", "b", "flag", "list"}));
}

TEST(KeyValueConfig, ErrorsNameTheLine) {
  try {
    KeyValueConfig::parse("a = 1\nno equals sign\n", "run.conf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "config");
    EXPECT_NE(std::string(e.what()).find("run.conf:2"), std::string::npos);
  }
  EXPECT_THROW(KeyValueConfig::parse("a = 1\na = 2\n"), Error);
  auto kv = KeyValueConfig::parse("n = 1.5\nb = maybe\n");
  EXPECT_THROW(kv.get_int<int>("n", 0), Error);
  EXPECT_THROW(kv.get_bool("b", false), Error);
}

TEST(Seeds, ReferenceValues) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Seeds, DerivedStreamsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (std::uint64_t k = 0; k < 50; ++k) seen.insert(derive_seed(s, k));
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Parallel, SlotResultsIndependentOfWorkers) {
  for (int jobs : {1, 2, 5, 16}) {
    std::vector<std::uint64_t> out(1000);
    parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = splitmix64(i); });
    for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i], splitmix64(i));
  }
}

TEST(Parallel, RethrowsSmallestFailingIndex) {
  for (int jobs : {1, 4}) {
    try {
      parallel_for(100, jobs, [](std::size_t i) {
        if (i % 10 == 7) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
}
