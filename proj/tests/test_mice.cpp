#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stackmnar/mice.hpp"
#include "stackmnar/numeric.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace stackmnar;

namespace {

// n x 2 data with Z1 partially missing, Z2 complete: the single-missing-column
// design used throughout.
DataMatrix make_two_column(int n, int n_missing, std::uint64_t seed,
                           bool binary_target = false) {
  Rng rng = substream(seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd v(n, 2);
  Mask m = Mask::Constant(n, 2, true);
  for (int i = 0; i < n; ++i) {
    v(i, 1) = normal(rng);
    if (binary_target) {
      v(i, 0) = unif(rng) < expit(0.5 * v(i, 1)) ? 1.0 : 0.0;
    } else {
      v(i, 0) = 0.5 * v(i, 1) + normal(rng);
    }
    if (i < n_missing) m(i, 0) = false;
  }
  std::vector<ColumnMeta> meta{
      {"Z1", binary_target ? ColumnKind::binary : ColumnKind::continuous},
      {"Z2", ColumnKind::continuous}};
  return DataMatrix(std::move(v), std::move(m), std::move(meta));
}

MiceConfig basic_config(int m, std::uint64_t seed, ImputationFamily family,
                        int iterations = 10) {
  MiceConfig config;
  config.m_imputations = m;
  config.n_iterations = iterations;
  config.seed = seed;
  ConditionalModelSpec spec;
  spec.target_col = 0;
  spec.predictor_cols = {1};
  spec.family = family;
  config.models = {spec};
  return config;
}

}  // namespace

TEST_CASE("linear dispersion draw has the scaled inverse chi-square mean") {
  // Intercept-only design with sigma_hat^2 ~ 1: the mean of the dispersion
  // draws is sigma_hat^2 (n-q)/(n-q-2), within 2% of 1 at n = 10^4.
  const int n = 10000;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1.0 : -1.0;

  Rng rng = substream(42, 9);
  double sum = 0.0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    LinearParamDraw draw = draw_linear_params(y, X, rng);
    sum += draw.sigma * draw.sigma;
  }
  CHECK(std::abs(sum / draws - 1.0) < 0.02);
}

TEST_CASE("zero-noise data gives an exact degenerate draw") {
  // Orthogonal power-of-two design keeps every OLS step exact in floating
  // point, so sigma_hat^2 is exactly 0 and the draw returns beta0 bit for bit.
  Eigen::MatrixXd X(4, 2);
  X << 1, -1, 1, 1, 1, -1, 1, 1;
  Eigen::VectorXd beta0(2);
  beta0 << 0.5, 0.25;
  Eigen::VectorXd y = X * beta0;
  Rng rng = substream(1, 1);
  LinearParamDraw draw = draw_linear_params(y, X, rng);
  CHECK(draw.sigma == 0.0);
  CHECK(draw.beta[0] == 0.5);
  CHECK(draw.beta[1] == 0.25);
}

TEST_CASE("linear parameter draws are deterministic under a fixed seed") {
  const int n = 50;
  Rng data_rng = substream(5, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = normal(data_rng);
    y[i] = 1.0 + 2.0 * X(i, 1) + normal(data_rng);
  }
  Rng r1 = substream(99, 1);
  Rng r2 = substream(99, 1);
  LinearParamDraw a = draw_linear_params(y, X, r1);
  LinearParamDraw b = draw_linear_params(y, X, r2);
  CHECK(a.sigma == b.sigma);
  CHECK(a.beta == b.beta);
}

TEST_CASE("draw_linear_params rejects degenerate inputs") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 2);
  Eigen::VectorXd y(2);
  y << 1.0, 2.0;
  Rng rng = substream(1, 2);
  CHECK_THROWS_AS(draw_linear_params(y, X, rng), std::runtime_error);  // n_obs <= q

  Eigen::MatrixXd Xc(6, 2);
  for (int i = 0; i < 6; ++i) {
    Xc(i, 0) = 1.0;
    Xc(i, 1) = 3.0;  // collinear
  }
  Eigen::VectorXd yc = Eigen::VectorXd::LinSpaced(6, 0, 1);
  CHECK_THROWS_AS(draw_linear_params(yc, Xc, rng), std::runtime_error);
}

TEST_CASE("logistic draws center on the MLE (logit of 0.5 is 0)") {
  const int n = 200;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1.0 : 0.0;

  Rng rng = substream(17, 3);
  const int draws = 10000;
  double sum = 0.0;
  for (int d = 0; d < draws; ++d) sum += draw_logistic_params(y, X, rng)[0];
  // Draw variance is 4/n; the mean of 10^4 draws should sit within 3 SE of 0.
  const double se_mean = std::sqrt(4.0 / n) / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(sum / draws) < 3.0 * se_mean);
}

TEST_CASE("logistic draw is deterministic and rejects single-class outcomes") {
  const int n = 40;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1.0 : 0.0;
  Rng r1 = substream(7, 7);
  Rng r2 = substream(7, 7);
  CHECK(draw_logistic_params(y, X, r1) == draw_logistic_params(y, X, r2));

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Rng r3 = substream(7, 8);
  CHECK(testutil::contains(testutil::error_message([&] { draw_logistic_params(ones, X, r3); }), "single-class"));
}

TEST_CASE("impute pass leaves complete columns untouched") {
  DataMatrix d = make_two_column(30, 0, 81);
  Eigen::MatrixXd work = d.values();
  const Eigen::MatrixXd before = work;
  ConditionalModelSpec spec{0, {1}, ImputationFamily::normal_linear};
  Rng rng = substream(3, 3);
  impute_variable_pass(work, spec, d.observed(), rng);
  CHECK(work == before);
}

TEST_CASE("zero-dispersion pass imputes the regression mean deterministically") {
  // Zero-noise outcome on an exact design: the drawn coefficients equal the
  // generative ones and sigma_draw is 0, so imputed cells equal x'beta.
  Eigen::MatrixXd v(6, 2);
  Mask m = Mask::Constant(6, 2, true);
  const double beta0 = 0.5, beta1 = 0.25;
  for (int i = 0; i < 6; ++i) {
    v(i, 1) = i < 3 ? -1.0 : 1.0;
    v(i, 0) = beta0 + beta1 * v(i, 1);
  }
  m(0, 0) = false;
  m(5, 0) = false;
  v(0, 0) = 999.0;  // sentinel, must never leak
  v(5, 0) = -999.0;
  DataMatrix d(v, m, {{"Z1", ColumnKind::continuous}, {"Z2", ColumnKind::continuous}});

  Eigen::MatrixXd work = d.values();
  // The pass fits on observed rows only, so the sentinels do not enter; give
  // the working grid arbitrary starting values in the missing cells.
  work(0, 0) = 123.0;
  work(5, 0) = -7.0;
  ConditionalModelSpec spec{0, {1}, ImputationFamily::normal_linear};
  Rng rng = substream(4, 4);
  impute_variable_pass(work, spec, d.observed(), rng);
  CHECK(work(0, 0) == beta0 - beta1);
  CHECK(work(5, 0) == beta0 + beta1);
}

TEST_CASE("logistic pass with near-zero linear predictor imputes roughly half ones") {
  // Balanced observed outcome, intercept-only predictor set: the drawn
  // intercept is within O(2/sqrt(n_obs)) of 0, so missing cells are close to
  // Bernoulli(0.5). Tolerance combines the binomial SE with the draw spread.
  const int n_obs = 100000, n_mis = 10000;
  const int n = n_obs + n_mis;
  Eigen::MatrixXd v(n, 2);
  Mask m = Mask::Constant(n, 2, true);
  for (int i = 0; i < n; ++i) {
    v(i, 1) = 0.0;
    v(i, 0) = i % 2 == 0 ? 1.0 : 0.0;
    if (i >= n_obs) {
      m(i, 0) = false;
      v(i, 0) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  DataMatrix d(v, m, {{"Z1", ColumnKind::binary}, {"Z2", ColumnKind::continuous}});
  Eigen::MatrixXd work = d.values();
  for (int i = n_obs; i < n; ++i) work(i, 0) = 0.0;
  ConditionalModelSpec spec{0, {}, ImputationFamily::logistic};
  Rng rng = substream(5, 5);
  impute_variable_pass(work, spec, d.observed(), rng);

  double ones = 0.0;
  for (int i = n_obs; i < n; ++i) ones += work(i, 0);
  const double freq = ones / n_mis;
  const double binom_se = 0.5 / std::sqrt(static_cast<double>(n_mis));
  const double draw_sd_effect = 0.25 * 2.0 / std::sqrt(static_cast<double>(n_obs));
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(binom_se * binom_se +
                                               draw_sd_effect * draw_sd_effect));
}

TEST_CASE("run_mice returns identical copies when nothing is missing") {
  DataMatrix d = make_two_column(25, 0, 123);
  MiceConfig config = basic_config(4, 11, ImputationFamily::normal_linear);
  config.models.clear();  // no incomplete columns, so no models
  auto imps = run_mice(d, config);
  REQUIRE(imps.size() == 4);
  for (const auto& imp : imps) CHECK(imp.values == d.values());
}

TEST_CASE("run_mice is bit-identical under a fixed seed") {
  DataMatrix d = make_two_column(60, 20, 321);
  MiceConfig config = basic_config(5, 777, ImputationFamily::normal_linear, 3);
  auto a = run_mice(d, config);
  auto b = run_mice(d, config);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].values == b[k].values);
}

TEST_CASE("observed cells are preserved exactly and draws ignore sentinels") {
  DataMatrix d = make_two_column(80, 30, 654);
  MiceConfig config = basic_config(3, 888, ImputationFamily::normal_linear, 2);
  auto imps = run_mice(d, config);
  for (const auto& imp : imps) {
    for (int i = 0; i < d.n(); ++i) {
      for (int j = 0; j < d.p(); ++j) {
        if (d.is_observed(i, j)) CHECK(imp.values(i, j) == d.value(i, j));
      }
    }
  }

  // Adversarial sentinels in the missing cells must not change anything:
  // every code path is required to consult the mask instead.
  Eigen::MatrixXd poisoned = d.values();
  for (int i = 0; i < d.n(); ++i) {
    if (!d.is_observed(i, 0)) poisoned(i, 0) = 1e30;
  }
  DataMatrix d2(poisoned, d.observed(), d.col_meta());
  auto imps2 = run_mice(d2, config);
  for (std::size_t k = 0; k < imps.size(); ++k) {
    CHECK(imps[k].values == imps2[k].values);
  }
}

TEST_CASE("imputation is proper: imputed cells vary across chains") {
  DataMatrix d = make_two_column(100, 40, 2024);
  MiceConfig config = basic_config(8, 3131, ImputationFamily::normal_linear, 2);
  auto imps = run_mice(d, config);
  for (int i = 0; i < 40; ++i) {
    double mean = 0.0, ss = 0.0;
    for (const auto& imp : imps) mean += imp.values(i, 0);
    mean /= static_cast<double>(imps.size());
    for (const auto& imp : imps) ss += (imp.values(i, 0) - mean) * (imp.values(i, 0) - mean);
    CHECK(ss > 0.0);
  }
}

TEST_CASE("imputed-cell distribution matches a direct-sampling oracle (KS)") {
  // Single missing cell, M = 10^4 one-iteration chains. The oracle draws
  // from the same fitted conditional by explicit formulas: chi-square scaled
  // dispersion, bivariate-normal coefficients via a hand-rolled Cholesky,
  // then the normal predictive at the missing subject's covariate value.
  const int n_obs = 500;
  const double x_mis = 0.7;
  Rng data_rng = substream(10101, 0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd v(n_obs + 1, 2);
  Mask m = Mask::Constant(n_obs + 1, 2, true);
  std::vector<double> xs(n_obs), ys(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    v(i, 1) = normal(data_rng);
    v(i, 0) = 0.5 * v(i, 1) + normal(data_rng);
    xs[static_cast<std::size_t>(i)] = v(i, 1);
    ys[static_cast<std::size_t>(i)] = v(i, 0);
  }
  v(n_obs, 1) = x_mis;
  v(n_obs, 0) = std::numeric_limits<double>::quiet_NaN();
  m(n_obs, 0) = false;
  DataMatrix d(v, m, {{"Z1", ColumnKind::continuous}, {"Z2", ColumnKind::continuous}});

  const int n_draws = 10000;
  MiceConfig config = basic_config(n_draws, 55555, ImputationFamily::normal_linear, 1);
  auto imps = run_mice(d, config);
  std::vector<double> imputed(static_cast<std::size_t>(n_draws));
  for (int k = 0; k < n_draws; ++k) {
    imputed[static_cast<std::size_t>(k)] = imps[static_cast<std::size_t>(k)].values(n_obs, 0);
  }

  // Oracle: explicit posterior-predictive sampler for the same OLS fit.
  const auto ols = oracles::simple_ols(xs, ys);
  const double df = n_obs - 2;
  const double sigma2_hat = ols.rss / df;
  double xbar = 0.0;
  for (double x : xs) xbar += x;
  xbar /= n_obs;
  double sxx = 0.0;
  for (double x : xs) sxx += (x - xbar) * (x - xbar);
  // (X'X)^{-1} for the [1, x] design by the textbook formulas.
  const double inv00 = 1.0 / n_obs + xbar * xbar / sxx;
  const double inv01 = -xbar / sxx;
  const double inv11 = 1.0 / sxx;
  // Cholesky of the 2x2 matrix.
  const double l00 = std::sqrt(inv00);
  const double l10 = inv01 / l00;
  const double l11 = std::sqrt(inv11 - l10 * l10);

  Rng oracle_rng = substream(121212, 0);
  std::chi_squared_distribution<double> chisq(df);
  std::vector<double> direct(static_cast<std::size_t>(n_draws));
  for (int k = 0; k < n_draws; ++k) {
    const double s2 = sigma2_hat * df / chisq(oracle_rng);
    const double s = std::sqrt(s2);
    const double z0 = normal(oracle_rng);
    const double z1 = normal(oracle_rng);
    const double b0 = ols.intercept + s * (l00 * z0);
    const double b1 = ols.slope + s * (l10 * z0 + l11 * z1);
    direct[static_cast<std::size_t>(k)] = b0 + b1 * x_mis + s * normal(oracle_rng);
  }

  const double d_stat = oracles::ks_statistic(imputed, direct);
  CHECK(d_stat < oracles::ks_critical(1.628, imputed.size(), direct.size()));
}

TEST_CASE("config validation catches family and coverage mistakes") {
  DataMatrix d = make_two_column(40, 10, 99);
  MiceConfig config = basic_config(3, 1, ImputationFamily::logistic);  // wrong family
  CHECK_THROWS_AS(run_mice(d, config), std::invalid_argument);

  MiceConfig none = basic_config(3, 1, ImputationFamily::normal_linear);
  none.models.clear();  // missing column with no model
  CHECK_THROWS_AS(run_mice(d, none), std::invalid_argument);

  MiceConfig self = basic_config(3, 1, ImputationFamily::normal_linear);
  self.models[0].predictor_cols = {0};
  CHECK_THROWS_AS(run_mice(d, self), std::invalid_argument);
}
