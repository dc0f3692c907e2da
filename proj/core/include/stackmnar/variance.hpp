// Covariance strategies for the weighted stacked analysis: observed-data
// information assembled from complete-data contributions, and
// between-imputation covariance by bootstrap or jackknife over the M
// imputations, combined as V_stack + (1+M) V_between.
#ifndef STACKMNAR_VARIANCE_HPP
#define STACKMNAR_VARIANCE_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "stackmnar/estimators.hpp"
#include "stackmnar/stack.hpp"

namespace stackmnar {

enum class SeMethod { louis, bootstrap, jackknife };

const char* se_method_name(SeMethod method);

struct VarianceRequest {
  SeMethod method = SeMethod::louis;
  int n_bootstrap = 200;
  std::uint64_t seed = 0;
};

// Observed-data information:
//   I_obs = sum_i sum_m w_im J^i_m - sum_i sum_m w_im (U^i_m - Ubar^i)^{x2},
// with Ubar^i the weighted mean of subject i's score contributions.
// Returns I_obs^{-1}. Throws when I_obs is not positive definite (message
// carries the smallest eigenvalue); this is the documented small-n failure
// mode.
Eigen::MatrixXd louis_cov(const ImputedStack& stack, const TargetAnalysisSpec& spec,
                          const Eigen::VectorXd& theta_hat);

// Resamples the M imputation indices with replacement B times, rescales the
// weights within each subject, refits, and returns the sample covariance of
// the refitted estimates. Refit failures are reported with the bootstrap
// index.
Eigen::MatrixXd bootstrap_between(const ImputedStack& stack, const TargetAnalysisSpec& spec,
                                  const VarianceRequest& request);

// Leave-one-imputation-out:
//   V_between = (M-1)/M sum_m (theta^(m) - thetabar)^{x2}.
// Deterministic; refits warm-start at the full-stack estimate.
Eigen::MatrixXd jackknife_between(const ImputedStack& stack, const TargetAnalysisSpec& spec);

// V_stack + (1+M) V_between.
Eigen::MatrixXd combine_variance(const Eigen::MatrixXd& v_stack,
                                 const Eigen::MatrixXd& v_between, int m);

}  // namespace stackmnar

#endif
