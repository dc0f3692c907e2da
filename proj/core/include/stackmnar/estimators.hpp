// Target analyses on the weighted stack: weighted mean, weighted linear
// regression, weighted logistic regression, plus complete-case and
// dataset-weight pooled baselines. Per-row score and information
// contributions feed the variance module.
#ifndef STACKMNAR_ESTIMATORS_HPP
#define STACKMNAR_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stackmnar/data.hpp"
#include "stackmnar/stack.hpp"

namespace stackmnar {

enum class AnalysisKind { mean, linear, logistic };

struct TargetAnalysisSpec {
  AnalysisKind kind = AnalysisKind::linear;
  int outcome_col = 0;
  std::vector<int> covariate_cols;
  bool intercept = true;
};

enum class MethodTag { proposed, carpenter, complete_case, mar };

const char* method_name(MethodTag tag);

struct FitResult {
  Eigen::VectorXd theta;
  Eigen::MatrixXd v_stack;
  std::optional<Eigen::MatrixXd> v_between;
  std::optional<Eigen::MatrixXd> v_total;
  double dispersion = std::numeric_limits<double>::quiet_NaN();  // linear fits
  MethodTag method_tag = MethodTag::proposed;
  std::vector<std::string> param_names;
};

// Design matrix and outcome for a completed values grid. For kind == mean
// the design is a single intercept column.
void analysis_design(const Eigen::MatrixXd& values, const TargetAnalysisSpec& spec,
                     Eigen::MatrixXd& X, Eigen::VectorXd& y);

std::vector<std::string> analysis_param_names(const TargetAnalysisSpec& spec,
                                              const std::vector<ColumnMeta>& col_meta);

// Point estimate on a prebuilt design with arbitrary nonnegative weights.
// Used by the between-imputation resampling refits, which only perturb the
// weight vector. warm_start applies to the logistic family.
Eigen::VectorXd fit_point_estimate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& w, AnalysisKind kind,
                                   const Eigen::VectorXd* warm_start = nullptr);

// theta = sum w z / sum w; v_stack = weighted sample variance / n with the
// n-1 dispersion denominator (n = subject count).
FitResult weighted_mean(const ImputedStack& stack, int col);

// theta = (X' Omega X)^{-1} X' Omega y; dispersion = sum w r^2 / (n - q)
// where n is the subject count, not the stacked row count; v_stack =
// dispersion * (X' Omega X)^{-1}.
FitResult weighted_linear_fit(const ImputedStack& stack, const TargetAnalysisSpec& spec);

// Weighted logistic maximum likelihood via IRLS; v_stack is the inverse of
// the weighted information at the optimum.
FitResult weighted_logistic_fit(const ImputedStack& stack, const TargetAnalysisSpec& spec);

// Dispatch on spec.kind.
FitResult weighted_fit(const ImputedStack& stack, const TargetAnalysisSpec& spec);

// Unweighted fit restricted to rows complete on outcome and covariates.
FitResult complete_case_fit(const DataMatrix& data, const TargetAnalysisSpec& spec);

// Unweighted fit of one completed dataset (per-imputation estimate for the
// dataset-weight pooling baseline).
FitResult single_dataset_fit(const Eigen::MatrixXd& values, const TargetAnalysisSpec& spec);

// Pooled estimate from per-imputation fits and dataset weights alpha:
// theta = sum alpha_m theta_m; per-coordinate variance
// sum alpha_m Var_m + (1 + 1/M) sum alpha_m (theta_m - theta)^2, assembled
// from the full outer products.
FitResult carpenter_pool(const std::vector<FitResult>& per_imputation_fits,
                         const Eigen::VectorXd& alpha);

// Per-row score and information contributions.
// Linear (dispersion profiled at the weighted fit's value, treated as
// fixed): U = x r / s2, J = x x' / s2. Logistic: U = x (y - mu),
// J = x x' mu (1 - mu). J rows are rank-one: J_r = info_scale[r] * x_r x_r'.
struct ScoreInfo {
  Eigen::MatrixXd design;      // rows x q
  Eigen::MatrixXd score;       // rows x q
  Eigen::VectorXd info_scale;  // rows
  double dispersion = 1.0;     // linear family only

  Eigen::MatrixXd info_row(Eigen::Index r) const {
    return info_scale[r] * (design.row(r).transpose() * design.row(r));
  }
};

// When dispersion is supplied it is used as-is; otherwise it is profiled
// from the weighted residuals at theta (linear family only).
ScoreInfo score_info_contributions(const ImputedStack& stack, const TargetAnalysisSpec& spec,
                                   const Eigen::VectorXd& theta,
                                   std::optional<double> dispersion = std::nullopt);

}  // namespace stackmnar

#endif
