#include "stackmnar/mice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stackmnar/glm.hpp"
#include "stackmnar/numeric.hpp"

namespace stackmnar {

namespace {

// Lower-triangular Cholesky factor; symmetric PSD input expected.
Eigen::MatrixXd chol_lower(const Eigen::MatrixXd& A) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    // PSD but numerically on the boundary: fall back to eigen decomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal();
  }
  return llt.matrixL();
}

Eigen::VectorXd standard_normal_vector(Eigen::Index q, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(q);
  for (Eigen::Index i = 0; i < q; ++i) z[i] = normal(rng);
  return z;
}

void validate_config(const DataMatrix& data, const MiceConfig& config) {
  if (config.m_imputations < 1) {
    throw std::invalid_argument("m_imputations must be positive");
  }
  if (config.n_iterations < 1) {
    throw std::invalid_argument("n_iterations must be positive");
  }
  std::vector<int> covered(static_cast<std::size_t>(data.p()), 0);
  for (const auto& spec : config.models) {
    if (spec.target_col < 0 || spec.target_col >= data.p()) {
      throw std::invalid_argument("model target column out of range");
    }
    ++covered[static_cast<std::size_t>(spec.target_col)];
    for (int j : spec.predictor_cols) {
      if (j < 0 || j >= data.p()) {
        throw std::invalid_argument("model predictor column out of range");
      }
      if (j == spec.target_col) {
        throw std::invalid_argument("column '" + data.column_name(j) +
                                    "' cannot predict itself");
      }
    }
    const bool is_binary = data.column_kind(spec.target_col) == ColumnKind::binary;
    if (is_binary != (spec.family == ImputationFamily::logistic)) {
      throw std::invalid_argument("model family for column '" +
                                  data.column_name(spec.target_col) +
                                  "' does not match its kind");
    }
  }
  for (int j = 0; j < data.p(); ++j) {
    const int need = data.n_missing_in_column(j) > 0 ? 1 : 0;
    if (covered[static_cast<std::size_t>(j)] != need) {
      throw std::invalid_argument("column '" + data.column_name(j) + "' needs exactly " +
                                  std::to_string(need) + " conditional model, found " +
                                  std::to_string(covered[static_cast<std::size_t>(j)]));
    }
  }
}

}  // namespace

LinearParamDraw draw_linear_params(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                   Rng& rng, std::optional<double> fixed_sigma2) {
  const Eigen::Index n_obs = X.rows();
  const Eigen::Index q = X.cols();
  if (n_obs <= q) {
    throw std::runtime_error("too few observed rows (" + std::to_string(n_obs) +
                             ") for " + std::to_string(q) + " parameters");
  }
  WlsFit fit = weighted_least_squares(X, y, Eigen::VectorXd::Ones(n_obs));
  const double df = static_cast<double>(n_obs - q);
  const double sigma2_hat = fit.weighted_rss / df;

  double sigma2_draw;
  if (fixed_sigma2.has_value()) {
    sigma2_draw = *fixed_sigma2;
  } else {
    std::chi_squared_distribution<double> chisq(df);
    sigma2_draw = sigma2_hat * df / chisq(rng);
  }

  Eigen::VectorXd z = standard_normal_vector(q, rng);
  LinearParamDraw draw;
  draw.sigma = std::sqrt(sigma2_draw);
  draw.beta = fit.coef + draw.sigma * (chol_lower(fit.xtwx_inv) * z);
  return draw;
}

Eigen::VectorXd draw_logistic_params(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                     Rng& rng) {
  IrlsFit fit = fit_binomial(X, y, BinomialLink::logit);
  Eigen::VectorXd z = standard_normal_vector(X.cols(), rng);
  return fit.coef + chol_lower(fit.info_inv) * z;
}

void impute_variable_pass(Eigen::MatrixXd& work, const ConditionalModelSpec& spec,
                          const Mask& observed, Rng& rng,
                          std::optional<double> fixed_sigma2) {
  const int n = static_cast<int>(work.rows());
  const int j = spec.target_col;
  const Eigen::Index q = static_cast<Eigen::Index>(spec.predictor_cols.size()) + 1;

  std::vector<int> obs_rows, mis_rows;
  for (int i = 0; i < n; ++i) {
    (observed(i, j) ? obs_rows : mis_rows).push_back(i);
  }
  if (mis_rows.empty()) return;

  Eigen::RowVectorXd xi(q);
  auto design_row = [&](int i) -> const Eigen::RowVectorXd& {
    xi[0] = 1.0;
    for (std::size_t k = 0; k < spec.predictor_cols.size(); ++k) {
      xi[static_cast<Eigen::Index>(k) + 1] = work(i, spec.predictor_cols[k]);
    }
    return xi;
  };

  Eigen::MatrixXd X_obs(static_cast<Eigen::Index>(obs_rows.size()), q);
  Eigen::VectorXd y_obs(static_cast<Eigen::Index>(obs_rows.size()));
  for (std::size_t r = 0; r < obs_rows.size(); ++r) {
    X_obs.row(static_cast<Eigen::Index>(r)) = design_row(obs_rows[r]);
    y_obs[static_cast<Eigen::Index>(r)] = work(obs_rows[r], j);
  }

  if (spec.family == ImputationFamily::normal_linear) {
    LinearParamDraw draw = draw_linear_params(y_obs, X_obs, rng, fixed_sigma2);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int i : mis_rows) {
      work(i, j) = design_row(i).dot(draw.beta) + draw.sigma * noise(rng);
    }
  } else {
    Eigen::VectorXd beta = draw_logistic_params(y_obs, X_obs, rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i : mis_rows) {
      work(i, j) = unif(rng) < expit(design_row(i).dot(beta)) ? 1.0 : 0.0;
    }
  }
}

std::vector<CompletedDataset> run_mice(const DataMatrix& data, const MiceConfig& config) {
  validate_config(data, config);

  // Visit order: ascending target column index.
  std::vector<ConditionalModelSpec> models = config.models;
  std::sort(models.begin(), models.end(),
            [](const auto& a, const auto& b) { return a.target_col < b.target_col; });

  const int n = data.n();
  const int p = data.p();
  auto mask = std::make_shared<const Mask>(data.observed());

  // Observed values per column, for initialization draws.
  std::vector<std::vector<double>> observed_pool(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      if (data.is_observed(i, j)) {
        observed_pool[static_cast<std::size_t>(j)].push_back(data.value(i, j));
      }
    }
  }

  std::vector<CompletedDataset> out;
  out.reserve(static_cast<std::size_t>(config.m_imputations));
  for (int m = 0; m < config.m_imputations; ++m) {
    Rng rng = substream(config.seed, static_cast<std::uint64_t>(m) + 1);

    Eigen::MatrixXd work = data.values();
    for (int j = 0; j < p; ++j) {
      const auto& pool = observed_pool[static_cast<std::size_t>(j)];
      for (int i = 0; i < n; ++i) {
        if (!data.is_observed(i, j)) {
          if (pool.empty()) {
            throw std::runtime_error("column '" + data.column_name(j) +
                                     "' has no observed values to initialize from");
          }
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
          work(i, j) = pool[pick(rng)];
        }
      }
    }

    for (int it = 0; it < config.n_iterations; ++it) {
      for (const auto& spec : models) {
        impute_variable_pass(work, spec, data.observed(), rng, config.fixed_sigma2);
      }
    }

    if (!work.allFinite()) {
      throw std::runtime_error("non-finite imputed value in chain " + std::to_string(m + 1) +
                               " (imputation model blow-up)");
    }
    out.push_back(CompletedDataset{std::move(work), m, mask});
  }
  return out;
}

}  // namespace stackmnar
