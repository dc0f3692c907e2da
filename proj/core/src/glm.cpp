#include "stackmnar/glm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stackmnar/numeric.hpp"

namespace stackmnar {

WlsFit weighted_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w) {
  const Eigen::Index q = X.cols();
  if (X.rows() != y.size() || X.rows() != w.size()) {
    throw std::invalid_argument("weighted_least_squares: shape mismatch");
  }
  Eigen::MatrixXd Xw = w.asDiagonal() * X;
  Eigen::MatrixXd A = X.transpose() * Xw;
  Eigen::VectorXd b = Xw.transpose() * y;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  if (lu.rank() < q) {
    throw std::runtime_error("design matrix is rank deficient (rank " +
                             std::to_string(lu.rank()) + " of " + std::to_string(q) + ")");
  }
  WlsFit fit;
  fit.xtwx_inv = lu.inverse();
  fit.coef = fit.xtwx_inv * b;
  Eigen::VectorXd r = y - X * fit.coef;
  fit.weighted_rss = (w.array() * r.array().square()).sum();
  return fit;
}

double link_inverse(BinomialLink link, double eta) {
  return link == BinomialLink::logit ? expit(eta) : norm_cdf(eta);
}

namespace {

constexpr double kMuEps = 1e-12;

double binomial_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& eta, BinomialLink link) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (w[i] == 0.0) continue;
    if (link == BinomialLink::logit) {
      ll += w[i] * (y[i] * eta[i] - log1pexp(eta[i]));
    } else {
      double mu = norm_cdf(eta[i]);
      mu = std::min(1.0 - kMuEps, std::max(kMuEps, mu));
      ll += w[i] * (y[i] * std::log(mu) + (1.0 - y[i]) * std::log(1.0 - mu));
    }
  }
  return ll;
}

}  // namespace

IrlsFit fit_binomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& offset,
                     BinomialLink link, const IrlsOptions& opts,
                     const Eigen::VectorXd* warm_start) {
  const Eigen::Index n = X.rows();
  const Eigen::Index q = X.cols();
  if (y.size() != n || w.size() != n || offset.size() != n) {
    throw std::invalid_argument("fit_binomial: shape mismatch");
  }
  double w1 = 0.0, w0 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw std::invalid_argument("fit_binomial: outcome must be coded 0/1");
    }
    (y[i] == 1.0 ? w1 : w0) += w[i];
  }
  if (w1 <= 0.0 || w0 <= 0.0) {
    throw std::runtime_error("single-class outcome: both classes need positive weight");
  }

  Eigen::VectorXd theta = warm_start ? *warm_start : Eigen::VectorXd::Zero(q);
  Eigen::VectorXd eta = X * theta + offset;
  double ll = binomial_loglik(y, w, eta, link);

  Eigen::VectorXd score(q);
  Eigen::MatrixXd info(q, q);
  Eigen::VectorXd score_factor(n), work_w(n);

  std::ostringstream trace;
  int it = 0;
  for (it = 1; it <= opts.max_iterations; ++it) {
    double worst_correct_prob = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double mu = link_inverse(link, eta[i]);
      mu = std::min(1.0 - kMuEps, std::max(kMuEps, mu));
      const double v = mu * (1.0 - mu);
      if (w[i] > 0.0) {
        worst_correct_prob = std::min(worst_correct_prob, y[i] == 1.0 ? mu : 1.0 - mu);
      }
      if (link == BinomialLink::logit) {
        score_factor[i] = w[i] * (y[i] - mu);
        work_w[i] = w[i] * v;
      } else {
        const double d = norm_pdf(eta[i]);
        score_factor[i] = w[i] * d * (y[i] - mu) / v;
        work_w[i] = w[i] * d * d / v;
      }
    }
    score.noalias() = X.transpose() * score_factor;
    const double max_score = score.cwiseAbs().maxCoeff();
    trace << (it > 1 ? " " : "") << max_score;
    // Under perfect separation the score vanishes as the coefficients run
    // off to infinity; do not accept that as convergence.
    const bool separated = worst_correct_prob > 1.0 - 1e-8;
    if (max_score < opts.score_tol && !separated) break;

    info.noalias() = X.transpose() * (work_w.asDiagonal() * X);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw std::runtime_error("working information matrix is not positive definite");
    }
    Eigen::VectorXd delta = ldlt.solve(score);

    // Step halving on likelihood decrease.
    double step = 1.0;
    Eigen::VectorXd candidate;
    double ll_new = 0.0;
    for (int h = 0; h < 30; ++h) {
      candidate = theta + step * delta;
      eta = X * candidate + offset;
      ll_new = binomial_loglik(y, w, eta, link);
      if (ll_new >= ll - 1e-12 * std::abs(ll)) break;
      step *= 0.5;
    }
    const double rel_change =
        (candidate - theta).cwiseAbs().maxCoeff() / std::max(1.0, theta.cwiseAbs().maxCoeff());
    theta = candidate;
    ll = ll_new;
    if (rel_change < opts.theta_tol && !separated) {
      eta = X * theta + offset;
      break;
    }
  }

  // Final score and information at theta.
  eta = X * theta + offset;
  double worst_correct_prob = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double mu = link_inverse(link, eta[i]);
    mu = std::min(1.0 - kMuEps, std::max(kMuEps, mu));
    const double v = mu * (1.0 - mu);
    if (w[i] > 0.0) {
      worst_correct_prob = std::min(worst_correct_prob, y[i] == 1.0 ? mu : 1.0 - mu);
    }
    if (link == BinomialLink::logit) {
      score_factor[i] = w[i] * (y[i] - mu);
      work_w[i] = w[i] * v;
    } else {
      const double d = norm_pdf(eta[i]);
      score_factor[i] = w[i] * d * (y[i] - mu) / v;
      work_w[i] = w[i] * d * d / v;
    }
  }
  score.noalias() = X.transpose() * score_factor;
  const double max_score = score.cwiseAbs().maxCoeff();
  if (it > opts.max_iterations &&
      (max_score >= opts.score_tol || worst_correct_prob > 1.0 - 1e-8)) {
    throw std::runtime_error(
        "IRLS did not converge in " + std::to_string(opts.max_iterations) +
        " iterations (possible separation); max|score| trace: " + trace.str());
  }

  IrlsFit fit;
  fit.coef = theta;
  fit.iterations = std::min(it, opts.max_iterations);
  fit.max_abs_score = max_score;
  info.noalias() = X.transpose() * (work_w.asDiagonal() * X);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
  lu.setThreshold(1e-12);
  if (lu.rank() < q) {
    throw std::runtime_error("information matrix is singular at the optimum");
  }
  fit.info_inv = lu.inverse();
  return fit;
}

IrlsFit fit_binomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     BinomialLink link, const IrlsOptions& opts) {
  return fit_binomial(X, y, Eigen::VectorXd::Ones(X.rows()),
                      Eigen::VectorXd::Zero(X.rows()), link, opts, nullptr);
}

}  // namespace stackmnar
