#pragma once

// Seeded synthetic streamer population.
//
// Every streamer draws a base monthly follower gain from a Pareto law and a
// set of behavior traits that are independent of it. Month by month the
// generator emits broadcasts and posts, then grows followers by
//
//   gain_m  = base * (1 + beta * score_m) * lognormal noise,
//   score_m = tanh(w_volume    * log((N_m + 1) / (N_ref + 1))
//                + w_length    * log(L_m / L_ref)
//                + w_promotion * log((A_m + 1) / (A_ref + 1))
//                + w_games     * log((P_m + 0.1) / (P_ref + 0.1)))
//
// where N_m is the number of broadcasts in month m, L_m their mean length in
// hours, A_m the number of tweets carrying a Twitch link and P_m the share of
// game picks that land on the popular head of the catalog. With the default
// weights (w_volume = 0) the planted effect surfaces through broadcast_len,
// twitter_adv and n_popular_game. Concurrent viewers, views and cheers
// follow from the follower count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "streamgain/core_data.hpp"
#include "streamgain/kvconfig.hpp"
#include "streamgain/parallel.hpp"
#include "streamgain/seeds.hpp"

namespace streamgain {

struct SynthConfig {
  int n_streamers = 2000;
  int n_months = 14;
  std::uint64_t seed = 1;
  double behavior_effect = 0.5;  // beta

  std::string start_date = "2016-01-01T00:00:00Z";
  int creation_spread_days = 365;

  double tail_exponent = 1.0;  // Pareto index of the base monthly gain
  double growth_scale = 10.0;  // followers/month at the Pareto minimum
  double growth_noise = 0.35;  // sd of the monthly log-normal growth noise
  double imported_fraction = 0.05;
  double imported_scale = 2000.0;  // Pareto minimum of imported audiences

  double broadcast_intensity = 3.0;  // broadcasts per week, population median
  double broadcast_hours = 3.0;      // median broadcast length
  double schedule_adherence = 0.5;
  double activity_persistence = 0.5;  // month-to-month AR(1) coefficient
  double activity_volatility = 0.5;   // sd of monthly log-activity shocks

  double tweet_intensity = 8.0;      // ordinary tweets per week
  double promotion_intensity = 4.0;  // Twitch-link tweets per month
  double youtube_intensity = 1.0;    // videos per month
  double instagram_intensity = 2.0;  // posts per month
  double adopt_twitter = 0.75;
  double adopt_youtube = 0.35;
  double adopt_instagram = 0.3;
  double adopt_before = 0.6;     // share of adopters whose account predates Twitch
  int adopt_after_months = 12;   // late adoption month ~ uniform [0, this)

  double drive_volume = 0.0;
  double drive_length = 1.5;
  double drive_promotion = 0.8;
  double drive_popular_games = 1.5;

  double cheer_zero_rate = 0.45;
  int n_games = 300;

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) fail("config", std::string(name) + " must be in [0,1]");
    };
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) fail("config", std::string(name) + " must be > 0");
    };
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) fail("config", std::string(name) + " must be >= 0");
    };
    if (n_streamers < 10) fail("config", "n_streamers must be >= 10");
    if (n_months < 3) fail("config", "n_months must be >= 3");
    if (creation_spread_days < 1) fail("config", "creation_spread_days must be >= 1");
    if (adopt_after_months < 1) fail("config", "adopt_after_months must be >= 1");
    if (n_games < 10) fail("config", "n_games must be >= 10");
    if (!parse_iso8601(start_date)) fail("config", "start_date is not ISO-8601 UTC");
    prob(behavior_effect, "behavior_effect");
    prob(imported_fraction, "imported_fraction");
    prob(schedule_adherence, "schedule_adherence");
    prob(activity_persistence, "activity_persistence");
    prob(adopt_twitter, "adopt_twitter");
    prob(adopt_youtube, "adopt_youtube");
    prob(adopt_instagram, "adopt_instagram");
    prob(adopt_before, "adopt_before");
    prob(cheer_zero_rate, "cheer_zero_rate");
    positive(tail_exponent, "tail_exponent");
    positive(growth_scale, "growth_scale");
    positive(imported_scale, "imported_scale");
    positive(broadcast_intensity, "broadcast_intensity");
    positive(broadcast_hours, "broadcast_hours");
    non_negative(growth_noise, "growth_noise");
    non_negative(activity_volatility, "activity_volatility");
    non_negative(tweet_intensity, "tweet_intensity");
    non_negative(promotion_intensity, "promotion_intensity");
    non_negative(youtube_intensity, "youtube_intensity");
    non_negative(instagram_intensity, "instagram_intensity");
    non_negative(drive_volume, "drive_volume");
    non_negative(drive_length, "drive_length");
    non_negative(drive_promotion, "drive_promotion");
    non_negative(drive_popular_games, "drive_popular_games");
  }
};

namespace detail {

template <typename T>
struct SynthField {
  const char* key;
  T SynthConfig::*member;
};

inline constexpr SynthField<double> kSynthDoubles[] = {
    {"behavior_effect", &SynthConfig::behavior_effect},
    {"tail_exponent", &SynthConfig::tail_exponent},
    {"growth_scale", &SynthConfig::growth_scale},
    {"growth_noise", &SynthConfig::growth_noise},
    {"imported_fraction", &SynthConfig::imported_fraction},
    {"imported_scale", &SynthConfig::imported_scale},
    {"broadcast_intensity", &SynthConfig::broadcast_intensity},
    {"broadcast_hours", &SynthConfig::broadcast_hours},
    {"schedule_adherence", &SynthConfig::schedule_adherence},
    {"activity_persistence", &SynthConfig::activity_persistence},
    {"activity_volatility", &SynthConfig::activity_volatility},
    {"tweet_intensity", &SynthConfig::tweet_intensity},
    {"promotion_intensity", &SynthConfig::promotion_intensity},
    {"youtube_intensity", &SynthConfig::youtube_intensity},
    {"instagram_intensity", &SynthConfig::instagram_intensity},
    {"adopt_twitter", &SynthConfig::adopt_twitter},
    {"adopt_youtube", &SynthConfig::adopt_youtube},
    {"adopt_instagram", &SynthConfig::adopt_instagram},
    {"adopt_before", &SynthConfig::adopt_before},
    {"drive_volume", &SynthConfig::drive_volume},
    {"drive_length", &SynthConfig::drive_length},
    {"drive_promotion", &SynthConfig::drive_promotion},
    {"drive_popular_games", &SynthConfig::drive_popular_games},
    {"cheer_zero_rate", &SynthConfig::cheer_zero_rate},
};

inline constexpr SynthField<int> kSynthInts[] = {
    {"n_streamers", &SynthConfig::n_streamers},
    {"n_months", &SynthConfig::n_months},
    {"creation_spread_days", &SynthConfig::creation_spread_days},
    {"adopt_after_months", &SynthConfig::adopt_after_months},
    {"n_games", &SynthConfig::n_games},
};

}  // namespace detail

/// Keys not listed are rejected; keys in `extra` are left for the caller.
inline SynthConfig synth_config_from(const KeyValueConfig& kv, const std::set<std::string>& extra = {}) {
  SynthConfig c;
  std::set<std::string> known = extra;
  known.insert({"seed", "start_date"});
  for (const auto& f : detail::kSynthDoubles) {
    known.insert(f.key);
    c.*f.member = kv.get_double(f.key, c.*f.member);
  }
  for (const auto& f : detail::kSynthInts) {
    known.insert(f.key);
    c.*f.member = kv.get_int<int>(f.key, c.*f.member);
  }
  c.seed = kv.get_int<std::uint64_t>("seed", c.seed);
  c.start_date = kv.get_string("start_date", c.start_date);
  kv.require_known(known);
  c.validate();
  return c;
}

/// Resolved configuration as `key = value` lines, readable by synth_config_from.
inline std::string synth_config_text(const SynthConfig& c) {
  std::ostringstream os;
  os << "seed = " << c.seed << '\n' << "start_date = " << c.start_date << '\n';
  for (const auto& f : detail::kSynthInts) os << f.key << " = " << c.*f.member << '\n';
  for (const auto& f : detail::kSynthDoubles) os << f.key << " = " << format_number(c.*f.member) << '\n';
  return os.str();
}

namespace detail {

using Engine = std::mt19937_64;

class ZipfSampler {
 public:
  ZipfSampler(int n, double s = 1.0, int offset = 0) : offset_(offset), cdf_(static_cast<std::size_t>(n)) {
    double acc = 0.0;
    for (int r = 1; r <= n; ++r) cdf_[static_cast<std::size_t>(r - 1)] = acc += std::pow(r, -s);
    for (auto& c : cdf_) c /= acc;
  }
  int operator()(Engine& rng) const {
    const double u = boost::random::uniform_01<double>()(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return offset_ + static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), std::ssize(cdf_) - 1));
  }

 private:
  int offset_;
  std::vector<double> cdf_;
};

// Ranks below n/10 form the popular head of the background catalog.
struct GameCatalog {
  explicit GameCatalog(int n) : head(std::max(1, n / 10)), popular(head, 1.0), niche(n - head, 1.0, head) {}
  int head;
  ZipfSampler popular, niche;
};

inline std::string game_name(int rank) {
  std::string s = std::to_string(rank + 1);
  return "game" + std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

struct GeneratedStreamer {
  StreamerRecord record;
  std::vector<std::pair<std::int64_t, std::pair<int, std::int64_t>>> game_views;  // global month, game, views
};

inline double normal(Engine& rng, double mean = 0.0, double sd = 1.0) {
  return boost::random::normal_distribution<double>(mean, sd)(rng);
}
inline double uniform(Engine& rng, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}
inline std::int64_t uniform_int(Engine& rng, std::int64_t lo, std::int64_t hi) {
  return boost::random::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}
inline bool coin(Engine& rng, double p) { return boost::random::bernoulli_distribution<double>(p)(rng); }
inline std::int64_t poisson(Engine& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return boost::random::poisson_distribution<std::int64_t, double>(std::min(mean, 1e6))(rng);
}
inline double lognormal(Engine& rng, double median, double sigma) {
  return median * std::exp(normal(rng, 0.0, sigma));
}

inline GeneratedStreamer generate_streamer(const SynthConfig& c, std::size_t index, Timestamp origin,
                                           const GameCatalog& games, int id_width) {
  Engine rng(derive_seed(c.seed, index));
  GeneratedStreamer out;
  StreamerRecord& s = out.record;
  {
    std::string n = std::to_string(index + 1);
    s.id.value = "s" + std::string(static_cast<std::size_t>(std::max<int>(0, id_width - std::ssize(n))), '0') + n;
  }
  const Timestamp created = origin + uniform_int(rng, 0, std::int64_t{c.creation_spread_days} * kSecondsPerDay - 1);
  s.account.twitch_created = created;

  // latent quality and behavior traits; the traits do not depend on quality
  const double base_gain =
      c.growth_scale * std::pow(1.0 - boost::random::uniform_01<double>()(rng), -1.0 / c.tail_exponent);
  const bool imported = coin(rng, c.imported_fraction);
  const double imported_followers =
      imported ? c.imported_scale * std::pow(1.0 - boost::random::uniform_01<double>()(rng), -1.0 / 1.2) : 0.0;
  const double rate_trait = lognormal(rng, 1.0, 0.5);
  const double length_trait = lognormal(rng, c.broadcast_hours, 0.35);
  const double adherence = coin(rng, c.schedule_adherence) ? 1.0 : uniform(rng, 0.0, 0.8);
  const double start_hour = uniform(rng, 10.0, 22.0);
  const double second_session = coin(rng, 0.4) ? uniform(rng, 0.1, 0.6) : 0.0;
  const double tweet_rate = c.tweet_intensity * lognormal(rng, 1.0, 0.7);
  const double promo_rate = c.promotion_intensity * lognormal(rng, 1.0, 0.6);
  const double yt_rate = c.youtube_intensity * lognormal(rng, 1.0, 0.7);
  const double ig_rate = c.instagram_intensity * lognormal(rng, 1.0, 0.7);
  const double variety = boost::random::exponential_distribution<double>(1.0 / 0.4)(rng);
  const int primary_game = games.niche(rng);
  const double trend_logit = normal(rng, std::log(0.3 / 0.7), 1.0);
  const bool cheerful = !coin(rng, c.cheer_zero_rate);
  const double cheer_rate = lognormal(rng, 0.3, 1.0);
  const double ccv_trait = lognormal(rng, 1.0, 0.3);

  std::vector<int> preferred_weekdays(7);
  std::iota(preferred_weekdays.begin(), preferred_weekdays.end(), 0);
  for (std::size_t i = preferred_weekdays.size() - 1; i > 0; --i)
    std::swap(preferred_weekdays[i], preferred_weekdays[static_cast<std::size_t>(uniform_int(rng, 0, std::int64_t(i)))]);
  preferred_weekdays.resize(static_cast<std::size_t>(
      std::clamp<long>(std::lround(c.broadcast_intensity * rate_trait), 1, 7)));

  const std::array<double, 3> adopt_p = {c.adopt_twitter, c.adopt_youtube, c.adopt_instagram};
  for (std::size_t k = 0; k < kPlatforms.size(); ++k) {
    if (!coin(rng, adopt_p[k])) continue;
    const bool before = coin(rng, c.adopt_before);
    const std::int64_t offset =
        before ? -uniform_int(rng, kSecondsPerDay, 730 * kSecondsPerDay)
               : uniform_int(rng, 0, std::int64_t{c.adopt_after_months} * kSecondsPerMonth - 1);
    s.account.created(kPlatforms[k]) = created + offset;
  }
  auto may_post = [&](Platform p, Timestamp ts) {
    const auto& at = s.account.created(p);
    return at && ts >= *at;
  };

  const double month_broadcasts = c.broadcast_intensity * static_cast<double>(kDaysPerMonth) / 7.0;
  const double ref_promo = c.promotion_intensity;

  double followers = std::floor(imported_followers);
  std::int64_t views = 0, cheers = 0;
  const int guaranteed_cheer_month = static_cast<int>(uniform_int(rng, 0, c.n_months - 1));
  double activity = 0.0, length_shift = 0.0, promo_shift = 0.0, trend_shift = 0.0;
  s.snapshots.push_back({0, static_cast<std::int64_t>(followers), 0.0, 0, 0});

  for (int m = 0; m < c.n_months; ++m) {
    const Timestamp month_begin = created + m * kSecondsPerMonth;
    const double rho = c.activity_persistence;
    const double innovation = c.activity_volatility * std::sqrt(1.0 - rho * rho);
    activity = m == 0 ? normal(rng, 0.0, c.activity_volatility) : rho * activity + normal(rng, 0.0, innovation);
    length_shift = m == 0 ? normal(rng, 0.0, 0.3) : rho * length_shift + normal(rng, 0.0, 0.3 * std::sqrt(1 - rho * rho));
    promo_shift = m == 0 ? normal(rng, 0.0, 0.6) : rho * promo_shift + normal(rng, 0.0, 0.6 * std::sqrt(1 - rho * rho));
    trend_shift = m == 0 ? normal(rng, 0.0, 0.8) : rho * trend_shift + normal(rng, 0.0, 0.8 * std::sqrt(1 - rho * rho));
    const double trend_p = 1.0 / (1.0 + std::exp(-(trend_logit + trend_shift)));

    // broadcasts: at most one per day
    const auto n_broadcasts = static_cast<int>(
        std::min<std::int64_t>(poisson(rng, month_broadcasts * rate_trait * std::exp(activity)), kDaysPerMonth));
    std::vector<int> days_left(kDaysPerMonth);
    std::iota(days_left.begin(), days_left.end(), 0);
    std::vector<int> chosen;
    for (int k = 0; k < n_broadcasts; ++k) {
      std::vector<std::size_t> pool;
      if (coin(rng, adherence))
        for (std::size_t i = 0; i < days_left.size(); ++i) {
          const int weekday = (m * static_cast<int>(kDaysPerMonth) + days_left[i]) % 7;
          if (std::find(preferred_weekdays.begin(), preferred_weekdays.end(), weekday) != preferred_weekdays.end())
            pool.push_back(i);
        }
      if (pool.empty()) {
        pool.resize(days_left.size());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
      }
      const auto pick = pool[static_cast<std::size_t>(uniform_int(rng, 0, std::ssize(pool) - 1))];
      chosen.push_back(days_left[pick]);
      days_left.erase(days_left.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(chosen.begin(), chosen.end());

    const double viewers_base = 0.05 * ccv_trait * std::pow(followers + 1.0, 0.85);
    double hours_sum = 0.0, ccv_sum = 0.0, watched = 0.0, picks = 0.0, popular_picks = 0.0;
    auto pick_game = [&] {
      if (coin(rng, trend_p)) return games.popular(rng);
      return coin(rng, 0.7) ? primary_game : games.niche(rng);
    };
    std::vector<Timestamp> starts;
    for (int day : chosen) {
      const double hour = std::clamp(start_hour + normal(rng, 0.0, 1.5), 0.0, 23.9);
      starts.push_back(month_begin + day * kSecondsPerDay + static_cast<Timestamp>(hour * kSecondsPerHour));
      if (coin(rng, second_session)) starts.push_back(-1);  // placed after the first one ends
    }
    for (std::size_t k = 0; k < starts.size(); ++k) {
      Broadcast b;
      b.start = starts[k] >= 0 ? starts[k]
                               : s.broadcasts.back().end() + uniform_int(rng, kSecondsPerHour, 3 * kSecondsPerHour);
      const double hours = std::clamp(length_trait * std::exp(length_shift) * lognormal(rng, 1.0, 0.25), 0.25, 16.0);
      b.duration_min = std::round(hours * 60.0);
      std::vector<int> played;
      if (!coin(rng, 0.03)) {
        played.push_back(pick_game());
        for (auto extra = poisson(rng, variety); extra > 0; --extra) {
          const int g = pick_game();
          if (std::find(played.begin(), played.end(), g) == played.end()) played.push_back(g);
        }
        for (int g : played) {
          picks += 1.0;
          popular_picks += g < games.head ? 1.0 : 0.0;
        }
        for (int g : played) b.games.push_back(game_name(g));
      }
      const double zero_p = 0.3 / (1.0 + 2.0 * viewers_base);
      if (coin(rng, zero_p)) {
        b.had_zero_viewers = true;
      } else {
        b.avg_concurrent_viewers = std::round(viewers_base * lognormal(rng, 1.0, 0.4) * 100.0) / 100.0 + 1.0;
      }
      hours_sum += b.duration_min / 60.0;
      ccv_sum += b.avg_concurrent_viewers;
      const double w = b.avg_concurrent_viewers * b.duration_min / 60.0;
      watched += w;
      const auto global = GamePopularityTable::global_month(b.start);
      for (int g : played)
        out.game_views.push_back({global, {g, static_cast<std::int64_t>(std::llround(w / played.size()))}});
      s.broadcasts.push_back(std::move(b));
    }

    // tweets; link tweets share the timing and text of ordinary ones
    std::int64_t promo_tweets = 0;
    for (auto k = poisson(rng, tweet_rate * kDaysPerMonth / 7.0); k > 0; --k) {
      SocialPost p;
      p.platform = Platform::twitter;
      p.time = month_begin + uniform_int(rng, 0, kSecondsPerMonth - 1);
      p.text_length = uniform_int(rng, 5, 280);
      p.contains_live_keyword = coin(rng, 0.05);
      p.is_reply = coin(rng, 0.35);
      if (may_post(Platform::twitter, p.time)) s.posts.push_back(p);
    }
    for (auto k = poisson(rng, promo_rate * std::exp(promo_shift)); k > 0; --k) {
      SocialPost p;
      p.platform = Platform::twitter;
      p.time = month_begin + uniform_int(rng, 0, kSecondsPerMonth - 1);
      p.text_length = uniform_int(rng, 5, 280);
      p.has_twitch_url = true;
      p.contains_live_keyword = coin(rng, 0.05);
      p.is_reply = coin(rng, 0.35);
      if (may_post(Platform::twitter, p.time)) {
        s.posts.push_back(p);
        ++promo_tweets;
      }
    }
    for (auto k = poisson(rng, yt_rate); k > 0; --k) {
      SocialPost p;
      p.platform = Platform::youtube;
      p.time = month_begin + uniform_int(rng, 0, kSecondsPerMonth - 1);
      p.has_twitch_url = coin(rng, 0.3);
      p.title_length = uniform_int(rng, 10, 100);
      p.description_length = uniform_int(rng, 0, 3000);
      p.video_length = std::round(lognormal(rng, 12.0, 0.9) * 10.0) / 10.0;
      if (may_post(Platform::youtube, p.time)) s.posts.push_back(p);
    }
    for (auto k = poisson(rng, ig_rate); k > 0; --k) {
      SocialPost p;
      p.platform = Platform::instagram;
      p.time = month_begin + uniform_int(rng, 0, kSecondsPerMonth - 1);
      p.text_length = uniform_int(rng, 0, 600);
      p.tag_count = poisson(rng, 3.0);
      p.has_twitch_url = coin(rng, 0.15);
      if (may_post(Platform::instagram, p.time)) s.posts.push_back(p);
    }

    // planted coupling between this month's behavior and follower growth
    const auto nb = static_cast<double>(starts.size());
    const double mean_len = starts.empty() ? c.broadcast_hours : hours_sum / nb;
    const double trend_share = picks > 0.0 ? popular_picks / picks : 0.3;
    const double score = std::tanh(c.drive_volume * std::log((nb + 1.0) / (month_broadcasts + 1.0)) +
                                   c.drive_length * std::log(mean_len / c.broadcast_hours) +
                                   c.drive_promotion * std::log((static_cast<double>(promo_tweets) + 1.0) /
                                                                (ref_promo + 1.0)) +
                                   c.drive_popular_games * std::log((trend_share + 0.1) / (0.3 + 0.1)));
    const double sigma = c.growth_noise;
    followers += std::round(base_gain * (1.0 + c.behavior_effect * score) * lognormal(rng, std::exp(-sigma * sigma / 2), sigma));

    views += static_cast<std::int64_t>(std::llround(3.0 * watched));
    if (cheerful) {
      cheers += poisson(rng, cheer_rate * watched / 10.0);
      if (m == guaranteed_cheer_month && cheers == 0) cheers = 1;
    }
    s.snapshots.push_back({m + 1, static_cast<std::int64_t>(followers), starts.empty() ? 0.0 : ccv_sum / nb, views,
                           cheers});
  }
  return out;
}

}  // namespace detail

/// Behavior features whose generator trait enters the growth score with a
/// nonzero weight.
inline std::vector<std::string> driving_features(const SynthConfig& c) {
  std::vector<std::string> out;
  if (c.drive_volume > 0) out.push_back("n_broadcast");
  if (c.drive_length > 0) out.push_back("broadcast_len");
  if (c.drive_popular_games > 0) out.push_back("n_popular_game");
  if (c.drive_promotion > 0) out.push_back("twitter_adv");
  return out;
}

/// Deterministic in `config.seed`; the worker count does not affect the output.
inline Dataset generate(const SynthConfig& config, int jobs = 1) {
  config.validate();
  const Timestamp origin = *parse_iso8601(config.start_date);
  const detail::GameCatalog games(config.n_games);
  const int id_width = static_cast<int>(std::to_string(config.n_streamers).size());

  std::vector<detail::GeneratedStreamer> parts(static_cast<std::size_t>(config.n_streamers));
  parallel_for(parts.size(), jobs, [&](std::size_t i) {
    parts[i] = detail::generate_streamer(config, i, origin, games, id_width);
  });

  Dataset ds;
  std::map<std::int64_t, std::vector<std::int64_t>> game_views;
  const auto first = GamePopularityTable::global_month(origin);
  const auto last = GamePopularityTable::global_month(
      origin + (std::int64_t{config.creation_spread_days} + config.n_months * kDaysPerMonth) * kSecondsPerDay);
  detail::Engine rng(derive_seed(config.seed, ~std::uint64_t{0}));
  for (auto month = first; month <= last; ++month) {
    auto& row = game_views[month];
    for (int g = 0; g < config.n_games; ++g)
      row.push_back(static_cast<std::int64_t>(std::llround(5e6 / (g + 1) * detail::lognormal(rng, 1.0, 0.15))));
  }
  for (auto& part : parts) {
    for (const auto& [month, gv] : part.game_views) game_views[month][static_cast<std::size_t>(gv.first)] += gv.second;
    ds.streamers.push_back(std::move(part.record));
  }
  for (const auto& [month, row] : game_views)
    for (int g = 0; g < config.n_games; ++g)
      ds.game_table.set_views(month, detail::game_name(g), row[static_cast<std::size_t>(g)]);
  finalize_dataset(ds);
  return ds;
}

}  // namespace streamgain
