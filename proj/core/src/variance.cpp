#include "stackmnar/variance.hpp"

#include <cmath>
#include <stdexcept>

#include "stackmnar/csv.hpp"
#include "stackmnar/rng.hpp"

namespace stackmnar {

const char* se_method_name(SeMethod method) {
  switch (method) {
    case SeMethod::louis: return "louis";
    case SeMethod::bootstrap: return "bootstrap";
    case SeMethod::jackknife: return "jackknife";
  }
  return "?";
}

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& A) {
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (asym > 1e-10 * scale) {
    throw std::runtime_error("covariance assembly produced an asymmetric matrix (asymmetry " +
                             csv::format_double(asym) + ")");
  }
  return 0.5 * (A + A.transpose());
}

// Refit machinery shared by bootstrap and jackknife: the design is built
// once and only the weight vector changes between refits.
struct RefitContext {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  AnalysisKind kind;
  Eigen::VectorXd theta_full;  // warm start

  RefitContext(const ImputedStack& stack, const TargetAnalysisSpec& spec) {
    analysis_design(stack.values, spec, X, y);
    kind = spec.kind == AnalysisKind::mean ? AnalysisKind::linear : spec.kind;
    theta_full = fit_point_estimate(X, y, stack.weight, kind, nullptr);
  }

  Eigen::VectorXd refit(const Eigen::VectorXd& w) const {
    return fit_point_estimate(X, y, w, kind, &theta_full);
  }
};

}  // namespace

Eigen::MatrixXd louis_cov(const ImputedStack& stack, const TargetAnalysisSpec& spec,
                          const Eigen::VectorXd& theta_hat) {
  const ScoreInfo contrib = score_info_contributions(stack, spec, theta_hat);
  const Eigen::Index q = contrib.design.cols();

  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index r = 0; r < contrib.design.rows(); ++r) {
    info.noalias() += (stack.weight[r] * contrib.info_scale[r]) *
                      (contrib.design.row(r).transpose() * contrib.design.row(r));
  }

  Eigen::VectorXd u_bar(q);
  for (int i = 0; i < stack.n; ++i) {
    u_bar.setZero();
    for (int k = 0; k < stack.m; ++k) {
      const int r = stack.row_index(i, k);
      u_bar += stack.weight[r] * contrib.score.row(r).transpose();
    }
    for (int k = 0; k < stack.m; ++k) {
      const int r = stack.row_index(i, k);
      const Eigen::VectorXd d = contrib.score.row(r).transpose() - u_bar;
      info.noalias() -= stack.weight[r] * (d * d.transpose());
    }
  }

  info = symmetrize(info);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigen decomposition of the observed information failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig <= 0.0) {
    throw std::runtime_error(
        "observed information is not positive definite (smallest eigenvalue " +
        csv::format_double(min_eig) + "); known failure mode at small n");
  }
  Eigen::MatrixXd cov = es.eigenvectors() *
                        es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
  return symmetrize(cov);
}

Eigen::MatrixXd bootstrap_between(const ImputedStack& stack, const TargetAnalysisSpec& spec,
                                  const VarianceRequest& request) {
  const int B = request.n_bootstrap;
  if (B < 2) throw std::invalid_argument("bootstrap needs at least 2 replicates");
  const int m = stack.m;

  const RefitContext ctx(stack, spec);
  const Eigen::Index q = ctx.X.cols();
  Eigen::MatrixXd estimates(B, q);
  Eigen::VectorXd w(stack.rows());
  std::vector<int> counts(static_cast<std::size_t>(m));

  for (int b = 0; b < B; ++b) {
    Rng rng = substream(request.seed, static_cast<std::uint64_t>(b) + 1);
    std::fill(counts.begin(), counts.end(), 0);
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (int d = 0; d < m; ++d) ++counts[static_cast<std::size_t>(pick(rng))];

    // A stack containing imputation m count[m] times, with weights rescaled
    // per subject, is equivalent to reweighting the original rows by
    // count[m] * w and renormalizing within subjects.
    for (int i = 0; i < stack.n; ++i) {
      double total = 0.0;
      for (int k = 0; k < m; ++k) {
        const int r = stack.row_index(i, k);
        w[r] = counts[static_cast<std::size_t>(k)] * stack.weight[r];
        total += w[r];
      }
      if (!(total > 0.0)) {
        throw std::runtime_error("bootstrap replicate " + std::to_string(b + 1) +
                                 ": subject " + std::to_string(i + 1) +
                                 " has zero resampled weight");
      }
      w.segment(static_cast<Eigen::Index>(i) * m, m) /= total;
    }

    try {
      estimates.row(b) = ctx.refit(w);
    } catch (const std::exception& e) {
      throw std::runtime_error("bootstrap replicate " + std::to_string(b + 1) +
                               " refit failed: " + e.what());
    }
  }

  const Eigen::RowVectorXd mean = estimates.colwise().mean();
  Eigen::MatrixXd centered = estimates.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / (B - 1);
  return symmetrize(cov);
}

Eigen::MatrixXd jackknife_between(const ImputedStack& stack, const TargetAnalysisSpec& spec) {
  const int m = stack.m;
  if (m < 2) throw std::invalid_argument("jackknife needs at least 2 imputations");

  const RefitContext ctx(stack, spec);
  const Eigen::Index q = ctx.X.cols();
  Eigen::MatrixXd estimates(m, q);
  Eigen::VectorXd w(stack.rows());

  for (int drop = 0; drop < m; ++drop) {
    for (int i = 0; i < stack.n; ++i) {
      double total = 0.0;
      for (int k = 0; k < m; ++k) {
        const int r = stack.row_index(i, k);
        w[r] = k == drop ? 0.0 : stack.weight[r];
        total += w[r];
      }
      if (!(total > 0.0)) {
        throw std::runtime_error("jackknife fold " + std::to_string(drop + 1) + ": subject " +
                                 std::to_string(i + 1) +
                                 " has zero weight after exclusion");
      }
      w.segment(static_cast<Eigen::Index>(i) * m, m) /= total;
    }
    try {
      estimates.row(drop) = ctx.refit(w);
    } catch (const std::exception& e) {
      throw std::runtime_error("jackknife fold " + std::to_string(drop + 1) +
                               " refit failed: " + e.what());
    }
  }

  const Eigen::RowVectorXd mean = estimates.colwise().mean();
  Eigen::MatrixXd centered = estimates.rowwise() - mean;
  Eigen::MatrixXd cov = (static_cast<double>(m - 1) / m) * (centered.transpose() * centered);
  return symmetrize(cov);
}

Eigen::MatrixXd combine_variance(const Eigen::MatrixXd& v_stack,
                                 const Eigen::MatrixXd& v_between, int m) {
  if (v_stack.rows() != v_between.rows() || v_stack.cols() != v_between.cols() ||
      v_stack.rows() != v_stack.cols()) {
    throw std::invalid_argument("covariance dimensions do not match");
  }
  return v_stack + (1.0 + m) * v_between;
}

}  // namespace stackmnar
