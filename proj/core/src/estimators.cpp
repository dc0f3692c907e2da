#include "stackmnar/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "stackmnar/glm.hpp"
#include "stackmnar/numeric.hpp"

namespace stackmnar {

const char* method_name(MethodTag tag) {
  switch (tag) {
    case MethodTag::proposed: return "proposed";
    case MethodTag::carpenter: return "carpenter";
    case MethodTag::complete_case: return "complete_case";
    case MethodTag::mar: return "mar";
  }
  return "?";
}

void analysis_design(const Eigen::MatrixXd& values, const TargetAnalysisSpec& spec,
                     Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  const Eigen::Index rows = values.rows();
  if (spec.kind == AnalysisKind::mean) {
    X = Eigen::MatrixXd::Ones(rows, 1);
    y = values.col(spec.outcome_col);
    return;
  }
  for (int c : spec.covariate_cols) {
    if (c == spec.outcome_col) {
      throw std::invalid_argument("outcome column cannot be a covariate");
    }
  }
  const Eigen::Index q =
      static_cast<Eigen::Index>(spec.covariate_cols.size()) + (spec.intercept ? 1 : 0);
  if (q == 0) throw std::invalid_argument("analysis needs an intercept or covariates");
  X.resize(rows, q);
  Eigen::Index col = 0;
  if (spec.intercept) X.col(col++).setOnes();
  for (int c : spec.covariate_cols) X.col(col++) = values.col(c);
  y = values.col(spec.outcome_col);
}

std::vector<std::string> analysis_param_names(const TargetAnalysisSpec& spec,
                                              const std::vector<ColumnMeta>& col_meta) {
  std::vector<std::string> names;
  if (spec.kind == AnalysisKind::mean) {
    names.push_back("mean");
    return names;
  }
  if (spec.intercept) names.push_back("intercept");
  for (int c : spec.covariate_cols) names.push_back(col_meta[static_cast<std::size_t>(c)].name);
  return names;
}

Eigen::VectorXd fit_point_estimate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& w, AnalysisKind kind,
                                   const Eigen::VectorXd* warm_start) {
  if (kind == AnalysisKind::logistic) {
    IrlsFit fit = fit_binomial(X, y, w, Eigen::VectorXd::Zero(X.rows()),
                               BinomialLink::logit, {}, warm_start);
    return fit.coef;
  }
  return weighted_least_squares(X, y, w).coef;
}

FitResult weighted_mean(const ImputedStack& stack, int col) {
  if (stack.rows() == 0) throw std::invalid_argument("empty stack");
  const double total_weight = stack.weight.sum();  // equals subject count
  const double theta = stack.weight.dot(stack.values.col(col)) / total_weight;

  FitResult fit;
  fit.theta = Eigen::VectorXd::Constant(1, theta);
  fit.param_names = {"mean"};
  fit.v_stack.resize(1, 1);
  if (stack.n > 1) {
    const Eigen::ArrayXd r = stack.values.col(col).array() - theta;
    const double s2 = (stack.weight.array() * r.square()).sum() / (stack.n - 1);
    fit.dispersion = s2;
    fit.v_stack(0, 0) = s2 / total_weight;
  } else {
    fit.v_stack(0, 0) = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

FitResult weighted_linear_fit(const ImputedStack& stack, const TargetAnalysisSpec& spec) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  analysis_design(stack.values, spec, X, y);
  const Eigen::Index q = X.cols();
  if (stack.n <= q) {
    throw std::runtime_error("too few subjects (" + std::to_string(stack.n) + ") for " +
                             std::to_string(q) + " parameters");
  }
  WlsFit wls = weighted_least_squares(X, y, stack.weight);

  FitResult fit;
  fit.theta = wls.coef;
  fit.param_names = analysis_param_names(spec, stack.col_meta);
  // Total weight is the subject count n, so the dispersion denominator is
  // n - q rather than the stacked row count.
  fit.dispersion = wls.weighted_rss / (stack.n - static_cast<int>(q));
  fit.v_stack = fit.dispersion * wls.xtwx_inv;
  return fit;
}

FitResult weighted_logistic_fit(const ImputedStack& stack, const TargetAnalysisSpec& spec) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  analysis_design(stack.values, spec, X, y);
  IrlsFit irls = fit_binomial(X, y, stack.weight, Eigen::VectorXd::Zero(X.rows()),
                              BinomialLink::logit);
  FitResult fit;
  fit.theta = irls.coef;
  fit.param_names = analysis_param_names(spec, stack.col_meta);
  fit.v_stack = irls.info_inv;
  return fit;
}

FitResult weighted_fit(const ImputedStack& stack, const TargetAnalysisSpec& spec) {
  switch (spec.kind) {
    case AnalysisKind::mean: return weighted_mean(stack, spec.outcome_col);
    case AnalysisKind::linear: return weighted_linear_fit(stack, spec);
    case AnalysisKind::logistic: return weighted_logistic_fit(stack, spec);
  }
  throw std::invalid_argument("unknown analysis kind");
}

namespace {

FitResult unweighted_values_fit(const Eigen::MatrixXd& values,
                                const std::vector<ColumnMeta>& col_meta,
                                const TargetAnalysisSpec& spec) {
  const Eigen::Index n = values.rows();
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  analysis_design(values, spec, X, y);
  const Eigen::Index q = X.cols();

  FitResult fit;
  fit.param_names = analysis_param_names(spec, col_meta);
  if (spec.kind == AnalysisKind::logistic) {
    IrlsFit irls = fit_binomial(X, y, BinomialLink::logit);
    fit.theta = irls.coef;
    fit.v_stack = irls.info_inv;
    return fit;
  }
  if (n <= q) {
    throw std::runtime_error("too few complete rows (" + std::to_string(n) + ") for " +
                             std::to_string(q) + " parameters");
  }
  WlsFit wls = weighted_least_squares(X, y, Eigen::VectorXd::Ones(n));
  fit.theta = wls.coef;
  fit.dispersion = wls.weighted_rss / static_cast<double>(n - q);
  fit.v_stack = fit.dispersion * wls.xtwx_inv;
  return fit;
}

}  // namespace

FitResult complete_case_fit(const DataMatrix& data, const TargetAnalysisSpec& spec) {
  std::vector<int> complete;
  for (int i = 0; i < data.n(); ++i) {
    bool ok = data.is_observed(i, spec.outcome_col);
    for (int c : spec.covariate_cols) ok = ok && data.is_observed(i, c);
    if (ok) complete.push_back(i);
  }
  const Eigen::Index q = static_cast<Eigen::Index>(spec.covariate_cols.size()) +
                         (spec.intercept || spec.kind == AnalysisKind::mean ? 1 : 0);
  if (static_cast<Eigen::Index>(complete.size()) <= q) {
    throw std::runtime_error("too few complete rows (" + std::to_string(complete.size()) +
                             ") for the requested analysis");
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(complete.size()), data.p());
  for (std::size_t r = 0; r < complete.size(); ++r) {
    values.row(static_cast<Eigen::Index>(r)) = data.values().row(complete[r]);
  }
  FitResult fit = unweighted_values_fit(values, data.col_meta(), spec);
  fit.method_tag = MethodTag::complete_case;
  return fit;
}

FitResult single_dataset_fit(const Eigen::MatrixXd& values, const TargetAnalysisSpec& spec) {
  std::vector<ColumnMeta> meta(static_cast<std::size_t>(values.cols()));
  for (std::size_t j = 0; j < meta.size(); ++j) meta[j].name = "col" + std::to_string(j + 1);
  return unweighted_values_fit(values, meta, spec);
}

FitResult carpenter_pool(const std::vector<FitResult>& per_imputation_fits,
                         const Eigen::VectorXd& alpha) {
  const int m = static_cast<int>(per_imputation_fits.size());
  if (m < 2) throw std::invalid_argument("pooling needs at least 2 imputations");
  if (alpha.size() != m) {
    throw std::invalid_argument("alpha length (" + std::to_string(alpha.size()) +
                                ") does not match fit count (" + std::to_string(m) + ")");
  }
  const Eigen::Index q = per_imputation_fits.front().theta.size();
  for (const auto& fit : per_imputation_fits) {
    if (fit.theta.size() != q || fit.v_stack.rows() != q || fit.v_stack.cols() != q) {
      throw std::invalid_argument("per-imputation fit dimensions disagree");
    }
  }

  FitResult pooled;
  pooled.method_tag = MethodTag::carpenter;
  pooled.param_names = per_imputation_fits.front().param_names;
  pooled.theta = Eigen::VectorXd::Zero(q);
  for (int k = 0; k < m; ++k) pooled.theta += alpha[k] * per_imputation_fits[static_cast<std::size_t>(k)].theta;

  Eigen::MatrixXd within = Eigen::MatrixXd::Zero(q, q);
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(q, q);
  for (int k = 0; k < m; ++k) {
    const auto& fit = per_imputation_fits[static_cast<std::size_t>(k)];
    within += alpha[k] * fit.v_stack;
    const Eigen::VectorXd d = fit.theta - pooled.theta;
    between += alpha[k] * (d * d.transpose());
  }
  pooled.v_stack = within;
  pooled.v_between = between;
  pooled.v_total = within + (1.0 + 1.0 / m) * between;
  return pooled;
}

ScoreInfo score_info_contributions(const ImputedStack& stack, const TargetAnalysisSpec& spec,
                                   const Eigen::VectorXd& theta,
                                   std::optional<double> dispersion) {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  analysis_design(stack.values, spec, X, y);
  if (theta.size() != X.cols()) {
    throw std::invalid_argument("theta length does not match the analysis design");
  }
  const Eigen::Index rows = X.rows();

  ScoreInfo out;
  out.design = std::move(X);
  out.score.resize(rows, theta.size());
  out.info_scale.resize(rows);

  if (spec.kind == AnalysisKind::logistic) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double mu = expit(out.design.row(r).dot(theta));
      out.score.row(r) = (y[r] - mu) * out.design.row(r);
      out.info_scale[r] = mu * (1.0 - mu);
    }
    return out;
  }

  // Linear and mean families: profile the dispersion at the weighted fit's
  // value (recomputed here from the residuals at theta) and treat it as
  // fixed in both U and J.
  const Eigen::Index q = out.design.cols();
  Eigen::VectorXd resid = y - out.design * theta;
  double s2;
  if (dispersion.has_value()) {
    s2 = *dispersion;
  } else {
    if (stack.n <= q) throw std::runtime_error("too few subjects for dispersion profiling");
    s2 = (stack.weight.array() * resid.array().square()).sum() /
         (stack.n - static_cast<int>(q));
  }
  if (!(s2 > 0.0)) throw std::runtime_error("profiled dispersion is not positive");
  out.dispersion = s2;
  for (Eigen::Index r = 0; r < rows; ++r) {
    out.score.row(r) = (resid[r] / s2) * out.design.row(r);
    out.info_scale[r] = 1.0 / s2;
  }
  return out;
}

}  // namespace stackmnar
