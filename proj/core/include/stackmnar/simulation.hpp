// Monte Carlo study harness: generates two-variable datasets, imposes
// missingness in the outcome through a logistic observation model, runs
// every requested method over a grid of assumed sensitivity values, and
// summarizes bias and confidence-interval coverage per cell.
#ifndef STACKMNAR_SIMULATION_HPP
#define STACKMNAR_SIMULATION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackmnar/data.hpp"
#include "stackmnar/estimators.hpp"
#include "stackmnar/rng.hpp"
#include "stackmnar/variance.hpp"

namespace stackmnar {

struct SimulationConfig {
  int n = 1000;
  AnalysisKind outcome_family = AnalysisKind::linear;  // linear or logistic
  double true_phi1 = 1.0;
  std::vector<double> assumed_phi1_grid{0.0, 0.2, 0.5, 0.8, 1.0, 1.2};
  int m_imputations = 50;
  int mice_iterations = 10;
  int n_replicates = 200;
  std::uint64_t seed = 20260401;
  std::vector<MethodTag> methods{MethodTag::complete_case, MethodTag::mar,
                                 MethodTag::carpenter, MethodTag::proposed};
  std::vector<SeMethod> se_methods{SeMethod::louis};
  int boot_reps = 200;
  int workers = 1;
  // Impute with the dispersion fixed at the generative truth instead of
  // drawing it (linear family robustness check).
  bool fixed_sigma = false;
};

void validate_config(const SimulationConfig& config);

// Thrown by impose_missingness when a realization leaves the target column
// with zero missing or zero observed cells; the caller resamples.
struct DegenerateMaskError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Z2 ~ N(0,1); Z1 ~ N(0.5 Z2, 1) for the linear family, or
// Z1 ~ Bernoulli(expit(0.5 Z2)) for the logistic family. Fully observed.
DataMatrix generate_dataset(const SimulationConfig& config, Rng& rng);

// Masks Z1 independently per subject with P(observed) = expit(phi1 Z1 + Z2)
// (no intercept; gives roughly 50% missingness under both families).
DataMatrix impose_missingness(const DataMatrix& data, double true_phi1, Rng& rng);

struct CellFit {
  MethodTag method;
  std::string se_method;  // "louis"/"bootstrap"/"jackknife", or the method's own
  double assumed_phi1 = 0.0;
  FitResult fit;
};

struct ReplicateResult {
  int replicate = 0;  // 1-based
  int degenerate_retries = 0;
  std::vector<CellFit> cells;
};

// One full replicate: generate, mask (resampling degenerate masks up to 100
// times), impute once, then evaluate every requested method; the single set
// of M imputations serves the whole assumed-phi1 grid.
ReplicateResult run_replicate(const SimulationConfig& config, int replicate_index);

struct ResultRow {
  int replicate = 0;
  std::string method;
  std::string se_method;
  double assumed_phi1 = 0.0;
  std::string parameter;
  double estimate = 0.0;
  double se = 0.0;       // NaN when no SE was requested
  int covered = -1;      // -1 when no SE was requested
};

struct CellSummary {
  std::string method;
  std::string se_method;
  double assumed_phi1 = 0.0;
  std::string parameter;
  int n_replicates = 0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rel_bias_pct = 0.0;  // NaN when the true value is 0
  double empirical_sd = 0.0;
  double mean_se = 0.0;       // NaN when no SE was requested
  double coverage = 0.0;      // NaN when no SE was requested
};

struct SimulationReport {
  std::vector<CellSummary> cells;
  int n_replicates_requested = 0;
  int n_replicates_done = 0;
  int degenerate_resamples = 0;
  std::vector<std::string> failures;
  double wall_seconds = 0.0;  // recorded, never asserted
};

// True generative value for a parameter name ("intercept" -> 0, "Z2" -> 0.5).
double true_parameter_value(const std::string& parameter);

std::vector<ResultRow> replicate_rows(const ReplicateResult& result,
                                      const SimulationConfig& config);

SimulationReport summarize_study(const std::vector<ResultRow>& rows,
                                 const SimulationConfig& config);

struct StudyOutput {
  std::vector<ResultRow> rows;
  SimulationReport report;
};

// Runs all replicates (parallel over replicates; identical results for any
// worker count), collects rows in replicate order, and summarizes.
StudyOutput run_study(const SimulationConfig& config);

void write_results_csv(const std::vector<ResultRow>& rows, const SimulationConfig& config,
                       const std::string& path);
void write_summary_csv(const SimulationReport& report, const SimulationConfig& config,
                       const std::string& path);

}  // namespace stackmnar

#endif
