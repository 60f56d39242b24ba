#include <gtest/gtest.h>

#include <random>

#include "streamgain/glm.hpp"
#include "streamgain/oracle.hpp"

using namespace streamgain;

namespace {

DesignMatrix reference_design() {
  const double x[] = {0.5, -1.2, 0.3, 2.1, -0.7, 1.4, -2.0, 0.9, -0.1, 1.1, 0.0, -1.5, 1.8, -0.4, 0.6, 2.5};
  const double z[] = {1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1};
  const double y[] = {1, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 1};
  DesignMatrix d;
  d.columns = {"intercept", "x", "z"};
  d.x.resize(16, 3);
  d.y.resize(16);
  for (int i = 0; i < 16; ++i) {
    d.x(i, 0) = 1.0;
    d.x(i, 1) = x[i];
    d.x(i, 2) = z[i];
    d.y[i] = y[i];
  }
  return d;
}

}  // namespace

// Reference values from an independent maximum-likelihood logit solver.
TEST(Logistic, MatchesReferenceSolver) {
  const auto fit = fit_logistic(reference_design());
  ASSERT_TRUE(fit.converged);
  EXPECT_FALSE(fit.separated);
  const double coef[] = {-0.8912719680290377, 2.3161195409431774, 0.13596519763257162};
  const double se[] = {1.1565162721283255, 1.192706875321669, 1.5229976858270096};
  const double p[] = {0.44091303034674423, 0.05214899831280216, 0.9288635813922332};
  const auto pv = coef_t_test(fit);
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(fit.coefficients[j], coef[j], 1e-7);
    EXPECT_NEAR(fit.standard_errors[j], se[j], 1e-6);
    EXPECT_NEAR(pv[static_cast<std::size_t>(j)], p[j], 1e-6);
  }
  EXPECT_NEAR(fit.log_likelihood, -5.672363366051695, 1e-10);
  EXPECT_LT(log_likelihood_gradient(reference_design(), fit.coefficients).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(Logistic, LikelihoodTraceNeverDecreases) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 20; ++rep) {
    DesignMatrix d;
    d.columns = {"intercept", "a", "b", "c"};
    d.x.resize(200, 4);
    d.y.resize(200);
    for (int i = 0; i < 200; ++i) {
      d.x(i, 0) = 1;
      for (int j = 1; j < 4; ++j) d.x(i, j) = n(rng);
      d.y[i] = n(rng) + d.x(i, 1) - 0.5 * d.x(i, 2) > 0 ? 1 : 0;
    }
    const auto fit = fit_logistic(d);
    EXPECT_TRUE(fit.converged);
    for (std::size_t k = 1; k < fit.log_likelihood_trace.size(); ++k)
      EXPECT_GE(fit.log_likelihood_trace[k], fit.log_likelihood_trace[k - 1]);
    // warm start at the optimum stays there
    FitOptions opt;
    opt.start = fit.coefficients;
    const auto again = fit_logistic(d, opt);
    EXPECT_TRUE(again.converged);
    EXPECT_LE(again.iterations, 1);
  }
}

TEST(Logistic, InterceptOnlyClosedForm) {
  const auto r = oracle::check_intercept_only();
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto r = oracle::check_gradient(seed, 50);
    EXPECT_TRUE(r.passed) << r.detail;
  }
  const auto d = reference_design();
  Eigen::VectorXd beta(3);
  beta << 0.3, -0.2, 1.1;
  EXPECT_LT(gradient_check(d, beta, 1e-5), 1e-6);
  EXPECT_NEAR(log_likelihood(d, beta), oracle::direct_log_likelihood(d, beta), 1e-12);
}

TEST(Logistic, SeparatedDataIsFlagged) {
  DesignMatrix d;
  d.columns = {"intercept", "x"};
  d.x.resize(6, 2);
  d.y.resize(6);
  const double x[] = {-3, -2, -1, 1, 2, 3};
  for (int i = 0; i < 6; ++i) {
    d.x(i, 0) = 1;
    d.x(i, 1) = x[i];
    d.y[i] = x[i] > 0;
  }
  const auto fit = fit_logistic(d);
  EXPECT_TRUE(fit.separated);
  EXPECT_FALSE(fit.converged);
  EXPECT_THROW(coef_t_test(fit), Error);
}

TEST(Logistic, RejectsBadDesigns) {
  auto d = reference_design();
  d.y.setZero();
  EXPECT_THROW(fit_logistic(d), Error);
  d = reference_design();
  d.y[0] = 0.5;
  EXPECT_THROW(fit_logistic(d), Error);
  d = reference_design();
  d.columns.pop_back();
  EXPECT_THROW(fit_logistic(d), Error);
  d = reference_design();
  d.x(2, 1) = NAN;
  EXPECT_THROW(fit_logistic(d), Error);
}

TEST(LeastSquares, MatchesNormalEquations) {
  const auto d = reference_design();
  const auto fit = fit_least_squares(d);
  const Eigen::VectorXd direct = (d.x.transpose() * d.x).inverse() * d.x.transpose() * d.y;
  EXPECT_LT((fit.coefficients - direct).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_TRUE(fit.converged);
}

TEST(Auc, HandExamples) {
  const std::vector<double> s = {0.9, 0.8, 0.1, 0.2};
  EXPECT_EQ(auc(s, std::vector<std::uint8_t>{1, 1, 0, 0}), 1.0);
  EXPECT_EQ(auc(s, std::vector<std::uint8_t>{0, 0, 1, 1}), 0.0);
  const std::vector<double> tied(4, 0.3);
  EXPECT_EQ(auc(tied, std::vector<std::uint8_t>{1, 0, 1, 0}), 0.5);
  // reference value from an independent ROC implementation
  EXPECT_NEAR(auc(std::vector<double>{0.9, 0.4, 0.4, 0.1, 0.4, 0.8}, std::vector<std::uint8_t>{1, 1, 0, 0, 1, 0}),
              2.0 / 3.0, 1e-15);
  EXPECT_THROW(auc(s, std::vector<std::uint8_t>{1, 1, 1, 1}), Error);
}

TEST(Auc, MatchesPairCounting) {
  for (std::uint64_t seed : {1u, 7u}) {
    const auto r = oracle::check_auc(seed, 200);
    EXPECT_TRUE(r.passed) << r.detail;
  }
}

TEST(Auc, InvariantUnderMonotoneScoreTransform) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> s(60), t(60);
    std::vector<std::uint8_t> y(60);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = std::round(n(rng) * 4) / 4;
      t[i] = std::exp(s[i]) * 3 - 1;
      y[i] = n(rng) + s[i] > 0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y), auc(t, y));
  }
}

TEST(Welch, HandDerivedExample) {
  const std::vector<double> a = {2, 4, 6}, b = {1, 2, 3};
  const auto r = welch_t_test(a, b);
  EXPECT_NEAR(r.t, 2.0 / std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_NEAR(r.t, 1.549, 1e-3);
  EXPECT_NEAR(r.df, 50.0 / 17.0, 1e-12);
  EXPECT_NEAR(r.df, 2.94, 2e-3);
  EXPECT_NEAR(r.p_value, 0.2208808404940958, 1e-9);  // independent t-distribution reference
  EXPECT_EQ(r.effect, 2.0);
}

TEST(Welch, ReferenceAndIdenticalSamples) {
  const std::vector<double> a = {1.5, 2.5, 9, 4, 4.25}, b = {0.5, 7, 3, 3.5};
  const auto r = welch_t_test(a, b);
  EXPECT_NEAR(r.t, 0.40354281480106086, 1e-12);
  EXPECT_NEAR(r.p_value, 0.698980191483525, 1e-9);
  const auto same = welch_t_test(a, a);
  EXPECT_NEAR(same.t, 0.0, 1e-9);
  EXPECT_NEAR(same.p_value, 1.0, 1e-9);
  const auto swapped = welch_t_test(b, a);
  EXPECT_NEAR(swapped.t, -r.t, 1e-15);
  EXPECT_NEAR(swapped.p_value, r.p_value, 1e-15);
  EXPECT_THROW(welch_t_test(std::vector<double>{1}, b), Error);
  EXPECT_THROW(welch_t_test(std::vector<double>{2, 2}, std::vector<double>{1, 1}), Error);
}
