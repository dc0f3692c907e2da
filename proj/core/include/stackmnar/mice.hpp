// Chained-equations multiple imputation with proper Bayesian parameter
// draws. Each variable with missingness is imputed from a regression fit
// to the subjects for which that variable is observed; parameters are
// redrawn on every pass so the imputations reflect estimation uncertainty.
#ifndef STACKMNAR_MICE_HPP
#define STACKMNAR_MICE_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "stackmnar/data.hpp"
#include "stackmnar/rng.hpp"

namespace stackmnar {

enum class ImputationFamily { normal_linear, logistic };

struct ConditionalModelSpec {
  int target_col = 0;
  std::vector<int> predictor_cols;  // design adds an intercept
  ImputationFamily family = ImputationFamily::normal_linear;
};

struct MiceConfig {
  int m_imputations = 5;
  int n_iterations = 10;
  std::uint64_t seed = 0;
  std::vector<ConditionalModelSpec> models;  // exactly one per incomplete column
  // When set, the normal-linear dispersion is not drawn but fixed at this
  // value (variance scale); the coefficient draw still uses it.
  std::optional<double> fixed_sigma2;
};

struct CompletedDataset {
  Eigen::MatrixXd values;  // n x p, no logical missingness
  int imputation = 0;      // 0-based chain index
  std::shared_ptr<const Mask> source_mask;
};

struct LinearParamDraw {
  Eigen::VectorXd beta;
  double sigma = 0.0;
};

// Ordinary least squares on the observed-target subset, then
// sigma^2 ~ sigma_hat^2 (n-q)/chisq_{n-q} and
// beta ~ MVN(beta_hat, sigma_draw^2 (X'X)^{-1}).
// X must already contain the intercept. Throws on rank deficiency and on
// n_obs <= q.
LinearParamDraw draw_linear_params(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                   Rng& rng, std::optional<double> fixed_sigma2 = std::nullopt);

// Logistic MLE on the observed-target subset, then
// beta ~ MVN(beta_hat, inverse information at the MLE).
Eigen::VectorXd draw_logistic_params(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                     Rng& rng);

// One pass for one conditional model: draw parameters from rows with the
// target observed, then impute every missing target cell from the drawn
// predictive distribution. Observed cells are never touched.
void impute_variable_pass(Eigen::MatrixXd& work, const ConditionalModelSpec& spec,
                          const Mask& observed, Rng& rng,
                          std::optional<double> fixed_sigma2 = std::nullopt);

// Runs M independent chains. Each chain initializes missing cells by
// sampling observed values of the same column with replacement, then cycles
// through the conditional models in ascending target-column order for
// n_iterations passes. Chain m draws from a private stream keyed by
// (config.seed, m).
std::vector<CompletedDataset> run_mice(const DataMatrix& data, const MiceConfig& config);

}  // namespace stackmnar

#endif
