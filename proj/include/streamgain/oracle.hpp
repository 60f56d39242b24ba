#pragma once

// Slow reference implementations used to cross-check the fast code paths,
// and the built-in oracle suite behind `streamgain oracle`.

#include <array>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "streamgain/binarize.hpp"
#include "streamgain/features.hpp"
#include "streamgain/glm.hpp"
#include "streamgain/seeds.hpp"

namespace streamgain::oracle {

/// All-pairs count: a positive ranked above a negative scores 1, a tie 1/2.
inline double pair_count_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  if (pairs == 0.0) fail("auc", "AUC needs both positive and negative labels");
  return wins / pairs;
}

/// Exhaustive scan over k = 0, 0.01, ..., 1: percentiles from percentile(),
/// fractions as exact rationals, first maximum wins.
inline Cutoff scan_cutoff(std::span<const double> values, std::span<const std::uint8_t> popular) {
  std::int64_t np = 0, nu = 0;
  for (auto b : popular) (b ? np : nu) += 1;
  if (np == 0 || nu == 0) fail("cutoff", "cutoff fitting needs popular and unpopular streamers");
  Cutoff best{};
  std::int64_t best_num = -1;  // |cp*nu - cu*np|, the common denominator np*nu dropped
  for (int step = 0; step <= 100; ++step) {
    const double c = percentile(values, step / 100.0);
    std::int64_t cp = 0, cu = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] > c) (popular[i] ? cp : cu) += 1;
    const std::int64_t num = std::abs(cp * nu - cu * np);
    if (num > best_num) {
      best_num = num;
      best = {step / 100.0, c};
    }
  }
  return best;
}

/// Week-by-weekday occupancy grid of the window; a weekday column with w
/// occupied weeks contributes w - 1.
inline double tabulate_regularity(std::span<const Broadcast> broadcasts, Timestamp window_begin) {
  std::int64_t first_week = 0, last_week = -1;
  std::vector<std::pair<std::int64_t, int>> cells;
  for (const auto& b : broadcasts) {
    const std::int64_t offset = b.start - window_begin;
    std::int64_t day = offset / kSecondsPerDay;
    if (offset % kSecondsPerDay != 0 && offset < 0) --day;
    std::int64_t week = day / 7;
    if (day % 7 != 0 && day < 0) --week;
    const int weekday = static_cast<int>(day - 7 * week);
    cells.emplace_back(week, weekday);
    if (last_week < first_week) first_week = last_week = week;
    first_week = std::min(first_week, week);
    last_week = std::max(last_week, week);
  }
  if (cells.empty()) return 0.0;
  std::vector<std::array<bool, 7>> grid(static_cast<std::size_t>(last_week - first_week + 1));
  for (auto [w, d] : cells) grid[static_cast<std::size_t>(w - first_week)][static_cast<std::size_t>(d)] = true;
  double total = 0.0;
  for (int d = 0; d < 7; ++d) {
    int weeks = 0;
    for (const auto& row : grid) weeks += row[static_cast<std::size_t>(d)];
    if (weeks > 1) total += weeks - 1;
  }
  return total;
}

/// Bernoulli log-likelihood summed term by term from the probabilities.
inline double direct_log_likelihood(const DesignMatrix& d, const Eigen::VectorXd& beta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    const double eta = d.x.row(i).dot(beta);
    ll += d.y[i] > 0.5 ? -std::log1p(std::exp(-eta)) : -std::log1p(std::exp(eta));
  }
  return ll;
}

inline Eigen::VectorXd central_difference_gradient(const DesignMatrix& d, const Eigen::VectorXd& beta, double h) {
  Eigen::VectorXd g(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Eigen::VectorXd up = beta, dn = beta;
    up[j] += h;
    dn[j] -= h;
    g[j] = (direct_log_likelihood(d, up) - direct_log_likelihood(d, dn)) / (2.0 * h);
  }
  return g;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return boost::random::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform(Rng& rng, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline DesignMatrix random_design(Rng& rng, int n, int p) {
  DesignMatrix d;
  d.x.resize(n, p);
  d.y.resize(n);
  boost::random::normal_distribution<double> z;
  for (int j = 0; j < p; ++j) d.columns.push_back("x" + std::to_string(j));
  for (int i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) d.x(i, j) = z(rng);
    d.y[i] = boost::random::bernoulli_distribution<double>(0.4)(rng) ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace detail

/// Fast AUC against pair counting on random instances with heavy ties.
inline CheckResult check_auc(std::uint64_t seed, int instances = 200) {
  detail::Rng rng(derive_seed(seed, fnv1a("auc")));
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int used = 0;
  for (int k = 0; k < instances; ++k) {
    const int n = detail::uniform_int(rng, 2, 200);
    const int levels = detail::uniform_int(rng, 1, 30);
    std::vector<double> s(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      s[static_cast<std::size_t>(i)] = detail::uniform_int(rng, 0, levels) / 7.0;
      y[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(detail::uniform_int(rng, 0, 1));
    }
    y[0] = 1;
    y[1] = 0;
    worst = std::max(worst, std::abs(auc(s, y) - pair_count_auc(s, y)));
    ++used;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {"auc_pair_count", worst < 1e-12 && secs < 5.0,
          std::to_string(used) + " instances, max diff " + detail::fmt(worst) + ", " + detail::fmt(secs) + " s"};
}

inline CheckResult check_gradient(std::uint64_t seed, int instances = 50) {
  detail::Rng rng(derive_seed(seed, fnv1a("gradient")));
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const int n = detail::uniform_int(rng, 5, 50);
    const int p = detail::uniform_int(rng, 1, 10);
    const DesignMatrix d = detail::random_design(rng, n, p);
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta[j] = detail::uniform(rng, -1.0, 1.0);
    const Eigen::VectorXd g = log_likelihood_gradient(d, beta);
    const Eigen::VectorXd fd = central_difference_gradient(d, beta, 1e-5);
    for (int j = 0; j < p; ++j) worst = std::max(worst, std::abs(g[j] - fd[j]) / std::max(1.0, std::abs(g[j])));
  }
  return {"gradient_finite_difference", worst < 1e-6,
          std::to_string(instances) + " instances, max relative error " + detail::fmt(worst)};
}

inline CheckResult check_intercept_only() {
  double worst = 0.0;
  for (double r : {0.25, 0.5, 0.75}) {
    DesignMatrix d;
    d.columns = {"intercept"};
    d.x = Eigen::MatrixXd::Ones(100, 1);
    d.y = Eigen::VectorXd::Zero(100);
    for (int i = 0; i < static_cast<int>(r * 100); ++i) d.y[i] = 1.0;
    const auto fit = fit_logistic(d);
    worst = std::max(worst, fit.converged ? std::abs(fit.coefficients[0] - std::log(r / (1 - r))) : INFINITY);
  }
  return {"intercept_closed_form", worst < 1e-6, "max |intercept - logit(r)| " + detail::fmt(worst)};
}

/// compute_cutoff against the exhaustive scan, plus bit equality under
/// strictly increasing transforms of the feature.
inline CheckResult check_cutoff(std::uint64_t seed, int instances = 100) {
  detail::Rng rng(derive_seed(seed, fnv1a("cutoff")));
  int mismatches = 0, not_equivariant = 0;
  const std::array<std::function<double(double)>, 3> transforms = {
      [](double x) { return 2.0 * x + 3.0; }, [](double x) { return std::exp(x / 16.0); },
      [](double x) { return x * x * x + x; }};
  for (int k = 0; k < instances; ++k) {
    const int n = detail::uniform_int(rng, 2, 300);
    const int levels = detail::uniform_int(rng, 1, 60);
    std::vector<double> v(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> pop(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = detail::uniform_int(rng, 0, levels);
      pop[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(detail::uniform_int(rng, 0, 3) == 0);
    }
    pop[0] = 1;
    pop[1] = 0;
    const Cutoff fast = compute_cutoff(v, pop);
    if (!(fast == scan_cutoff(v, pop))) ++mismatches;
    for (const auto& f : transforms) {
      std::vector<double> w(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) w[i] = f(v[i]);
      const Cutoff moved = compute_cutoff(w, pop);
      for (std::size_t i = 0; i < v.size(); ++i)
        if ((v[i] > fast.c_f) != (w[i] > moved.c_f) || moved.k_star != fast.k_star) {
          ++not_equivariant;
          break;
        }
    }
  }
  return {"cutoff_exhaustive_scan", mismatches == 0 && not_equivariant == 0,
          std::to_string(instances) + " instances, " + std::to_string(mismatches) + " scan mismatches, " +
              std::to_string(not_equivariant) + " transform violations"};
}

inline CheckResult check_regularity(std::uint64_t seed, int instances = 100) {
  detail::Rng rng(derive_seed(seed, fnv1a("regularity")));
  int mismatches = 0;
  for (int k = 0; k < instances; ++k) {
    const Timestamp begin = 1'500'000'000 + detail::uniform_int(rng, 0, 1'000'000);
    const int days = detail::uniform_int(rng, 7, 120);
    std::vector<Broadcast> bs(static_cast<std::size_t>(detail::uniform_int(rng, 0, 60)));
    for (auto& b : bs) {
      b.start = begin + static_cast<Timestamp>(detail::uniform_int(rng, 0, days * 86400 - 1));
      b.duration_min = 30;
    }
    if (sched_regularity(bs, begin) != tabulate_regularity(bs, begin)) ++mismatches;
  }
  return {"schedule_regularity_tabulation", mismatches == 0,
          std::to_string(instances) + " patterns, " + std::to_string(mismatches) + " mismatches"};
}

inline CheckResult check_welch() {
  const std::vector<double> a{2, 4, 6}, b{1, 2, 3};
  const auto r = welch_t_test(a, b);
  const auto same = welch_t_test(a, a);
  // by hand: t = 2 / sqrt(4/3 + 1/3), df = (5/3)^2 / ((4/3)^2/2 + (1/3)^2/2) = 50/17
  const bool ok = std::abs(r.t - 2.0 / std::sqrt(5.0 / 3.0)) < 1e-3 && std::abs(r.df - 50.0 / 17.0) < 1e-3 &&
                  std::abs(same.t) < 1e-9 &&
                  std::abs(same.p_value - 1.0) < 1e-9;
  return {"welch_reference", ok,
          "t " + detail::fmt(r.t) + ", df " + detail::fmt(r.df) + ", identical samples p " + detail::fmt(same.p_value)};
}

inline std::vector<CheckResult> run_suite(std::uint64_t seed = 1) {
  return {check_auc(seed),      check_gradient(seed),   check_intercept_only(),
          check_cutoff(seed),   check_regularity(seed), check_welch()};
}

}  // namespace streamgain::oracle
