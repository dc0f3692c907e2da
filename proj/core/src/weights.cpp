#include "stackmnar/weights.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "stackmnar/glm.hpp"
#include "stackmnar/numeric.hpp"

namespace stackmnar {

namespace {

void require_finite_phi1(double phi1) {
  if (!std::isfinite(phi1)) throw std::invalid_argument("phi1 must be finite");
}

bool target_missing(const ImputedStack& s, int subject, int col) {
  return !s.observed(subject, col);
}

}  // namespace

ImputedStack weights_logistic(const ImputedStack& stack, const MnarWeightSpec& spec) {
  require_finite_phi1(spec.phi1);
  if (spec.target_col < 0 || spec.target_col >= static_cast<int>(stack.col_meta.size())) {
    throw std::invalid_argument("target column out of range");
  }
  ImputedStack out = stack;
  const double uniform = 1.0 / stack.m;
  Eigen::VectorXd exponents(stack.m);
  for (int i = 0; i < stack.n; ++i) {
    if (!target_missing(stack, i, spec.target_col)) {
      for (int k = 0; k < stack.m; ++k) out.weight[out.row_index(i, k)] = uniform;
      continue;
    }
    for (int k = 0; k < stack.m; ++k) {
      exponents[k] = -spec.phi1 * stack.values(stack.row_index(i, k), spec.target_col);
    }
    out.weight.segment(static_cast<Eigen::Index>(i) * stack.m, stack.m) =
        normalized_exp(exponents);
  }
  return out;
}

std::pair<double, Eigen::VectorXd> estimate_link_nuisance(const ImputedStack& stack,
                                                          const MnarWeightSpec& spec,
                                                          const Eigen::MatrixXd& W) {
  if (W.rows() != stack.n) {
    throw std::invalid_argument("W must have one row per subject");
  }
  const Eigen::Index rows = stack.rows();
  const Eigen::Index k = W.cols();
  Eigen::MatrixXd X(rows, 1 + k);
  Eigen::VectorXd y(rows), offset(rows);
  for (int i = 0; i < stack.n; ++i) {
    const double r = stack.observed(i, spec.target_col) ? 1.0 : 0.0;
    for (int m = 0; m < stack.m; ++m) {
      const int row = stack.row_index(i, m);
      X(row, 0) = 1.0;
      X.block(row, 1, 1, k) = W.row(i);
      y[row] = r;
      offset[row] = spec.phi1 * stack.values(row, spec.target_col);
    }
  }
  // Each stacked row carries likelihood weight 1/M so the effective sample
  // size stays at the subject count.
  const Eigen::VectorXd prior_w = Eigen::VectorXd::Constant(rows, 1.0 / stack.m);
  const BinomialLink link =
      spec.link == MissingnessLink::logistic ? BinomialLink::logit : BinomialLink::probit;
  IrlsFit fit = fit_binomial(X, y, prior_w, offset, link);
  return {fit.coef[0], fit.coef.tail(k)};
}

ImputedStack weights_general_link(const ImputedStack& stack, const MnarWeightSpec& spec,
                                  const Eigen::MatrixXd& W) {
  require_finite_phi1(spec.phi1);
  if (W.rows() != stack.n) {
    throw std::invalid_argument("W must have one row per subject");
  }
  double phi0;
  Eigen::VectorXd phi2;
  if (spec.phi0.has_value() && spec.phi2.has_value()) {
    phi0 = *spec.phi0;
    phi2 = *spec.phi2;
  } else {
    std::tie(phi0, phi2) = estimate_link_nuisance(stack, spec, W);
  }
  if (phi2.size() != W.cols()) {
    throw std::invalid_argument("phi2 length does not match W columns");
  }

  constexpr double kProbFloor = 1e-10;
  ImputedStack out = stack;
  const double uniform = 1.0 / stack.m;
  Eigen::VectorXd exponents(stack.m);
  long clamped = 0;
  long weighted_rows = 0;
  int first_clamped_subject = -1;

  for (int i = 0; i < stack.n; ++i) {
    if (!target_missing(stack, i, spec.target_col)) {
      for (int k = 0; k < stack.m; ++k) out.weight[out.row_index(i, k)] = uniform;
      continue;
    }
    const double wpart = phi0 + phi2.dot(W.row(i));
    for (int k = 0; k < stack.m; ++k) {
      const int row = stack.row_index(i, k);
      const double eta = wpart + spec.phi1 * stack.values(row, spec.target_col);
      ++weighted_rows;
      if (spec.link == MissingnessLink::logistic) {
        // log[(1-p)/p] = -eta exactly under the logistic link.
        exponents[k] = -eta;
        const double p = expit(eta);
        if (p < kProbFloor || p > 1.0 - kProbFloor) {
          ++clamped;
          if (first_clamped_subject < 0) first_clamped_subject = i;
        }
      } else {
        double p = link_inverse(BinomialLink::probit, eta);
        if (p < kProbFloor || p > 1.0 - kProbFloor) {
          ++clamped;
          if (first_clamped_subject < 0) first_clamped_subject = i;
          p = std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
        }
        exponents[k] = std::log1p(-p) - std::log(p);
      }
    }
    out.weight.segment(static_cast<Eigen::Index>(i) * stack.m, stack.m) =
        normalized_exp(exponents);
  }

  if (weighted_rows > 0 && clamped > 0 &&
      static_cast<double>(clamped) > 0.001 * static_cast<double>(weighted_rows)) {
    throw std::runtime_error(
        "fitted missingness probability is numerically 0 or 1 on " +
        std::to_string(clamped) + " of " + std::to_string(weighted_rows) +
        " weighted rows (first at subject " + std::to_string(first_clamped_subject + 1) +
        "); weights are unbounded");
  }
  return out;
}

ImputedStack weights_general_link(const ImputedStack& stack, const MnarWeightSpec& spec,
                                  const DataMatrix& data, const VariableRole& roles) {
  if (roles.fully_observed.empty()) {
    throw std::invalid_argument("general-link weights need at least one fully observed column");
  }
  Eigen::MatrixXd W(data.n(), static_cast<Eigen::Index>(roles.fully_observed.size()));
  for (std::size_t c = 0; c < roles.fully_observed.size(); ++c) {
    W.col(static_cast<Eigen::Index>(c)) = data.values().col(roles.fully_observed[c]);
  }
  return weights_general_link(stack, spec, W);
}

Eigen::VectorXd weights_carpenter(const std::vector<CompletedDataset>& imputations,
                                  double phi1, int target_col) {
  require_finite_phi1(phi1);
  const int m = static_cast<int>(imputations.size());
  if (m < 2) throw std::invalid_argument("need at least 2 imputations");
  if (!imputations.front().source_mask) {
    throw std::invalid_argument("completed dataset lacks a source mask");
  }
  const Mask& mask = *imputations.front().source_mask;
  const int n = static_cast<int>(imputations.front().values.rows());

  Eigen::VectorXd exponents(m);
  for (int k = 0; k < m; ++k) {
    double missing_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!mask(i, target_col)) {
        missing_sum += imputations[static_cast<std::size_t>(k)].values(i, target_col);
      }
    }
    exponents[k] = -phi1 * missing_sum;
  }
  return normalized_exp(exponents);
}

ImputedStack weights_multivar(const ImputedStack& stack,
                              const std::vector<std::pair<int, double>>& mnar_targets) {
  std::set<int> seen;
  for (const auto& [col, phi] : mnar_targets) {
    if (col < 0 || col >= static_cast<int>(stack.col_meta.size())) {
      throw std::invalid_argument("MNAR target column out of range");
    }
    if (!seen.insert(col).second) {
      throw std::invalid_argument("duplicate MNAR target column " + std::to_string(col));
    }
    require_finite_phi1(phi);
  }

  ImputedStack out = stack;
  const double uniform = 1.0 / stack.m;
  Eigen::VectorXd exponents(stack.m);
  for (int i = 0; i < stack.n; ++i) {
    bool any_missing = false;
    for (const auto& [col, phi] : mnar_targets) {
      if (!stack.observed(i, col)) {
        any_missing = true;
        break;
      }
    }
    if (!any_missing) {
      for (int k = 0; k < stack.m; ++k) out.weight[out.row_index(i, k)] = uniform;
      continue;
    }
    for (int k = 0; k < stack.m; ++k) {
      const int row = stack.row_index(i, k);
      double e = 0.0;
      for (const auto& [col, phi] : mnar_targets) {
        if (!stack.observed(i, col)) e -= phi * stack.values(row, col);
      }
      exponents[k] = e;
    }
    out.weight.segment(static_cast<Eigen::Index>(i) * stack.m, stack.m) =
        normalized_exp(exponents);
  }
  return out;
}

int sir_select(const Eigen::VectorXd& candidates, double phi1, Rng& rng) {
  require_finite_phi1(phi1);
  const Eigen::Index m = candidates.size();
  if (m < 1) throw std::invalid_argument("sir_select needs at least one candidate");
  if (m == 1) return 0;
  Eigen::VectorXd prob = normalized_exp(-phi1 * candidates);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cum += prob[k];
    if (u <= cum) return static_cast<int>(k);
  }
  return static_cast<int>(m - 1);
}

}  // namespace stackmnar
