#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "streamgain/csv.hpp"
#include "streamgain/error.hpp"

namespace streamgain {

/// Rows are instances, columns named features; column 0 is the constant
/// intercept. `y` holds 0/1 outcomes.
struct DesignMatrix {
  std::vector<std::string> columns;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }

  void validate(bool for_fitting = true) const {
    if (static_cast<Eigen::Index>(columns.size()) != x.cols())
      fail("design", "column names do not match matrix width");
    if (y.size() != x.rows()) fail("design", "outcome length does not match row count");
    if (!x.allFinite()) fail("design", "non-finite entry in design matrix");
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) fail("design", "outcomes must be 0 or 1");
      pos += y[i] == 1.0;
    }
    if (for_fitting && (pos == 0 || pos == y.size()))
      fail("design", "fitting needs at least one positive and one negative outcome");
  }
};

struct ModelFit {
  std::vector<std::string> columns;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  bool converged = false;
  bool separated = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  std::vector<double> log_likelihood_trace;  // one entry per accepted iterate, starting point first
};

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 100;
  std::optional<Eigen::VectorXd> start;
};

namespace detail {

inline double softplus(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

inline double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// Accumulated in extended precision: near the optimum the last Newton
// improvements are smaller than the rounding noise of a double sum.
inline double log_likelihood_eta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  long double ll = 0.0L;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += static_cast<long double>(y[i] * eta[i]) - static_cast<long double>(softplus(eta[i]));
  return static_cast<double>(ll);
}

inline Eigen::VectorXd probabilities(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

// X' diag(w) X
inline Eigen::MatrixXd information(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd xw = x.array().colwise() * w.array().sqrt();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  h.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose());
  return h.selfadjointView<Eigen::Lower>();
}

inline bool well_conditioned(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  const Eigen::VectorXd d = ldlt.vectorD();
  const double hi = d.cwiseAbs().maxCoeff();
  return hi > 0 && d.minCoeff() > 1e-12 * hi;
}

}  // namespace detail

/// Bernoulli log-likelihood at coefficients `beta`.
inline double log_likelihood(const DesignMatrix& d, const Eigen::VectorXd& beta) {
  return detail::log_likelihood_eta(d.x * beta, d.y);
}

/// Gradient of the log-likelihood, X'(y - p).
inline Eigen::VectorXd log_likelihood_gradient(const DesignMatrix& d, const Eigen::VectorXd& beta) {
  return d.x.transpose() * (d.y - detail::probabilities(d.x * beta));
}

/// Unregularised logistic regression by damped Newton on the observed
/// information, halving steps until the log-likelihood does not decrease and
/// falling back to gradient ascent when the information is singular.
/// Converged means max |gradient| < tol. Data that pushes fitted
/// probabilities to 0/1 while Newton keeps taking O(1) steps is reported as
/// separated (and not converged).
inline ModelFit fit_logistic(const DesignMatrix& d, const FitOptions& opt = {}) {
  d.validate();
  const Eigen::Index p = d.cols();
  ModelFit fit;
  fit.columns = d.columns;
  Eigen::VectorXd beta = opt.start ? *opt.start : Eigen::VectorXd::Zero(p);
  if (beta.size() != p) fail("fit", "start vector has wrong length");
  Eigen::VectorXd eta = d.x * beta;
  double ll = detail::log_likelihood_eta(eta, d.y);
  if (!std::isfinite(ll)) fail("fit", "non-finite log-likelihood at start");
  fit.log_likelihood_trace.push_back(ll);
  double last_step = 0.0;
  int stalled = 0;  // consecutive accepted steps improving neither likelihood nor gradient
  double last_grad = INFINITY;

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd prob = detail::probabilities(eta);
    const Eigen::VectorXd grad = d.x.transpose() * (d.y - prob);
    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm < opt.tol) {
      fit.converged = true;
      break;
    }
    if (fit.log_likelihood_trace.size() > 1 &&
        fit.log_likelihood_trace.back() == fit.log_likelihood_trace[fit.log_likelihood_trace.size() - 2])
      stalled = grad_norm < last_grad ? 0 : stalled + 1;
    else
      stalled = 0;
    if (stalled >= 3) break;
    last_grad = grad_norm;
    if (iter >= opt.max_iter) break;
    const Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(detail::information(d.x, w));
    Eigen::VectorXd dir;
    if (detail::well_conditioned(ldlt)) {
      dir = ldlt.solve(grad);
    } else {
      // Levenberg-style damping keeps a Newton-like direction on a singular information matrix
      const Eigen::MatrixXd info = detail::information(d.x, w);
      const double ridge_base = std::max(1e-12, info.diagonal().cwiseAbs().mean());
      for (double lambda = 1e-10; lambda <= 1.0 && dir.size() == 0; lambda *= 100.0) {
        Eigen::LDLT<Eigen::MatrixXd> damped(info + lambda * ridge_base * Eigen::MatrixXd::Identity(p, p));
        if (detail::well_conditioned(damped)) dir = damped.solve(grad);
      }
      if (dir.size() == 0) dir = grad / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    }
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h, scale *= 0.5) {
      Eigen::VectorXd cand = beta + scale * dir;
      Eigen::VectorXd eta_c = d.x * cand;
      const double ll_c = detail::log_likelihood_eta(eta_c, d.y);
      if (std::isfinite(ll_c) && ll_c >= ll) {
        last_step = (scale * dir).lpNorm<Eigen::Infinity>();
        beta = std::move(cand);
        eta = std::move(eta_c);
        ll = ll_c;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent direction left at float precision
    ++fit.iterations;
    fit.log_likelihood_trace.push_back(ll);
  }

  const double max_eta = eta.size() ? eta.cwiseAbs().maxCoeff() : 0.0;
  if (max_eta > 15.0 && (last_step > 1e-3 || !fit.converged)) {
    fit.separated = true;
    fit.converged = false;
  }

  fit.coefficients = beta;
  fit.log_likelihood = ll;
  const Eigen::VectorXd prob = detail::probabilities(eta);
  const Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(detail::information(d.x, w));
  if (detail::well_conditioned(ldlt)) {
    const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    fit.standard_errors = inv.diagonal().cwiseMax(0.0).cwiseSqrt();
  } else {
    fit.standard_errors = Eigen::VectorXd::Constant(p, INFINITY);
  }
  return fit;
}

/// Ordinary least squares on the 0/1 outcome; a comparison mode only.
/// `log_likelihood` holds -RSS/2.
inline ModelFit fit_least_squares(const DesignMatrix& d) {
  d.validate();
  ModelFit fit;
  fit.columns = d.columns;
  const Eigen::MatrixXd xtx = d.x.transpose() * d.x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  if (!detail::well_conditioned(ldlt)) fail("fit", "least squares: singular design");
  fit.coefficients = ldlt.solve(d.x.transpose() * d.y);
  const Eigen::VectorXd r = d.y - d.x * fit.coefficients;
  const double rss = r.squaredNorm();
  const double dof = std::max<double>(1.0, static_cast<double>(d.rows() - d.cols()));
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(d.cols(), d.cols()));
  fit.standard_errors = (inv.diagonal() * (rss / dof)).cwiseMax(0.0).cwiseSqrt();
  fit.log_likelihood = -0.5 * rss;
  fit.log_likelihood_trace = {fit.log_likelihood};
  fit.converged = true;
  return fit;
}

inline std::vector<double> predict_scores(const ModelFit& fit, const DesignMatrix& d) {
  if (fit.columns != d.columns) fail("predict", "design columns do not match the fitted model");
  const Eigen::VectorXd eta = d.x * fit.coefficients;
  std::vector<double> out(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) out[static_cast<std::size_t>(i)] = detail::sigmoid(eta[i]);
  return out;
}

/// Linear predictor scores; used for least-squares fits where the sigmoid
/// would be meaningless. AUC is the same either way.
inline std::vector<double> predict_linear(const ModelFit& fit, const DesignMatrix& d) {
  if (fit.columns != d.columns) fail("predict", "design columns do not match the fitted model");
  const Eigen::VectorXd eta = d.x * fit.coefficients;
  return {eta.data(), eta.data() + eta.size()};
}

/// Area under the ROC curve from mid-ranks (Mann-Whitney U); tied scores
/// count one half.
inline double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) fail("auc", "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) {
        rank_sum += mid;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) fail("auc", "AUC needs both positive and negative labels");
  const double u = rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Two-sided p-value from the standard normal reference.
inline double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// Wald test per coefficient: z = coefficient / standard error.
inline std::vector<double> coef_t_test(const ModelFit& fit) {
  if (!fit.converged) fail("test", "coefficient tests need a converged fit");
  std::vector<double> p;
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    const double se = fit.standard_errors[j];
    if (!(se > 0.0)) fail("test", "zero standard error for " + fit.columns[static_cast<std::size_t>(j)]);
    p.push_back(two_sided_normal_p(fit.coefficients[j] / se));
  }
  return p;
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double effect = 0.0;  // mean_a - mean_b
};

inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) fail("test", "Welch test needs at least two values per sample");
  auto moments = [](std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double qa = va / static_cast<double>(a.size());
  const double qb = vb / static_cast<double>(b.size());
  if (!(qa + qb > 0.0)) fail("test", "Welch test: both samples have zero variance");
  WelchResult r;
  r.effect = ma - mb;
  r.t = r.effect / std::sqrt(qa + qb);
  r.df = (qa + qb) * (qa + qb) /
         (qa * qa / static_cast<double>(a.size() - 1) + qb * qb / static_cast<double>(b.size() - 1));
  boost::math::students_t_distribution<double> dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

/// Max over coefficients of |analytic - central difference| / max(1, |analytic|).
inline double gradient_check(const DesignMatrix& d, const Eigen::VectorXd& beta, double h) {
  if (!(h > 0.0)) fail("gradient_check", "step must be positive");
  const Eigen::VectorXd g = log_likelihood_gradient(d, beta);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Eigen::VectorXd up = beta, dn = beta;
    up[j] += h;
    dn[j] -= h;
    const double fd = (log_likelihood(d, up) - log_likelihood(d, dn)) / (2.0 * h);
    worst = std::max(worst, std::abs(g[j] - fd) / std::max(1.0, std::abs(g[j])));
  }
  return worst;
}

inline std::string model_fit_csv(const ModelFit& fit, const std::vector<double>& p_values) {
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"feature", "coefficient", "std_err", "p_value"});
  for (std::size_t j = 0; j < fit.columns.size(); ++j)
    w.row({fit.columns[j], format_number(fit.coefficients[static_cast<Eigen::Index>(j)]),
           format_number(fit.standard_errors[static_cast<Eigen::Index>(j)]),
           j < p_values.size() ? format_number(p_values[j]) : "nan"});
  return os.str();
}

}  // namespace streamgain
