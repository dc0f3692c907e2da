// Design-matrix level fitting routines: weighted least squares and a
// binomial IRLS solver (logit and probit links, prior weights, fixed
// offsets). Higher-level modules wrap these behind their own contracts.
#ifndef STACKMNAR_GLM_HPP
#define STACKMNAR_GLM_HPP

#include <Eigen/Dense>
#include <optional>

namespace stackmnar {

struct WlsFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd xtwx_inv;  // (X' W X)^{-1}
  double weighted_rss = 0.0; // sum_i w_i (y_i - x_i'coef)^2
};

// Solves min_b sum_i w_i (y_i - x_i'b)^2. Weights must be nonnegative.
// Throws on rank deficiency (message carries the rank found).
WlsFit weighted_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w);

enum class BinomialLink { logit, probit };

double link_inverse(BinomialLink link, double eta);

struct IrlsOptions {
  int max_iterations = 50;
  double score_tol = 1e-8;   // converged when max |score component| below this
  double theta_tol = 1e-10;  // or when relative coefficient change is below this
};

struct IrlsFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd info_inv;  // inverse weighted information at coef
  int iterations = 0;
  double max_abs_score = 0.0;
};

// Maximizes sum_i w_i [y_i log mu_i + (1-y_i) log(1-mu_i)] with
// mu_i = linkinv(x_i'b + offset_i) by Newton steps with step halving.
// warm_start, when given, seeds the iteration; otherwise b starts at 0.
// Throws on: single-class outcome (all weighted y equal), non-convergence
// within max_iterations (message carries the per-iteration score trace),
// and a singular working information matrix.
IrlsFit fit_binomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& offset,
                     BinomialLink link, const IrlsOptions& opts = {},
                     const Eigen::VectorXd* warm_start = nullptr);

// Convenience overload: unit weights, zero offset.
IrlsFit fit_binomial(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     BinomialLink link = BinomialLink::logit,
                     const IrlsOptions& opts = {});

}  // namespace stackmnar

#endif
