// Row weights for not-at-random missingness. The subject-level weights
// rescale each subject's M imputed rows by the odds that the target value
// would have been missing given its imputed value; dataset-level weights
// (one per imputation) implement the comparison pooling method. All
// exponential weights are computed with max-subtraction per group.
#ifndef STACKMNAR_WEIGHTS_HPP
#define STACKMNAR_WEIGHTS_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "stackmnar/data.hpp"
#include "stackmnar/mice.hpp"
#include "stackmnar/rng.hpp"
#include "stackmnar/stack.hpp"

namespace stackmnar {

enum class MissingnessLink { logistic, probit };

// Assumed model for whether the target is observed:
//   g(P(observed | z, W)) = phi0 + phi1 * z + phi2' W.
// phi1 is the fixed sensitivity parameter (log-odds scale for the logistic
// link); phi0 and phi2 are nuisance parameters estimated from the stacked
// data when not supplied. Under the logistic link they cancel out of the
// normalized weights and are not needed.
struct MnarWeightSpec {
  int target_col = 0;
  double phi1 = 0.0;
  MissingnessLink link = MissingnessLink::logistic;
  std::optional<double> phi0;
  std::optional<Eigen::VectorXd> phi2;
  std::vector<std::pair<int, double>> mnar_targets;  // multi-variable case
};

// omega_im = exp(-phi1 z_im) / sum_k exp(-phi1 z_ik) for subjects with the
// target missing; subjects with the target observed keep exactly 1/M.
ImputedStack weights_logistic(const ImputedStack& stack, const MnarWeightSpec& spec);

// General-link weights: omega_im proportional to (1-p_im)/p_im with
// p_im = linkinv(phi0 + phi1 z_im + phi2' W_i), normalized per subject.
// W is the n x k subject-level design for the fully observed block (no
// intercept column; transformed or interaction columns are fine). When
// spec.phi0/phi2 are absent they are estimated by an offset fit on the
// stacked rows (each row weighted 1/M, response = target observed).
// Throws if fitted probabilities pin to {0,1} on more than 0.1% of the
// weighted rows (unbounded weights signal a misspecified model).
ImputedStack weights_general_link(const ImputedStack& stack, const MnarWeightSpec& spec,
                                  const Eigen::MatrixXd& W);

// Convenience: W assembled from the fully observed role columns.
ImputedStack weights_general_link(const ImputedStack& stack, const MnarWeightSpec& spec,
                                  const DataMatrix& data, const VariableRole& roles);

// Offset fit for the nuisance parameters (phi0, phi2) at fixed phi1.
std::pair<double, Eigen::VectorXd> estimate_link_nuisance(const ImputedStack& stack,
                                                          const MnarWeightSpec& spec,
                                                          const Eigen::MatrixXd& W);

// Dataset-level weights: alpha_m proportional to
// exp(-phi1 * sum over target-missing subjects of z_im), rescaled to sum
// to 1 over imputations.
Eigen::VectorXd weights_carpenter(const std::vector<CompletedDataset>& imputations,
                                  double phi1, int target_col);

// Multiple MNAR variables, each with its own sensitivity parameter and an
// independent logistic missingness mechanism: the exponent sums
// -phi_j z_ijm over the listed columns that are missing for subject i.
// Subjects with all listed columns observed keep exactly 1/M.
ImputedStack weights_multivar(const ImputedStack& stack,
                              const std::vector<std::pair<int, double>>& mnar_targets);

// Sampling-importance-resampling oracle: selects one of the M candidate
// draws with probability proportional to exp(-phi1 * candidate). Returns
// the selected index.
int sir_select(const Eigen::VectorXd& candidates, double phi1, Rng& rng);

}  // namespace stackmnar

#endif
