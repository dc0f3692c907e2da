#include "stackmnar/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "stackmnar/csv.hpp"
#include "stackmnar/mice.hpp"
#include "stackmnar/numeric.hpp"
#include "stackmnar/parallel.hpp"
#include "stackmnar/weights.hpp"

namespace stackmnar {

namespace {

constexpr double kZ975 = 1.959963984540054;  // qnorm(0.975)

bool has_method(const SimulationConfig& c, MethodTag tag) {
  return std::find(c.methods.begin(), c.methods.end(), tag) != c.methods.end();
}

}  // namespace

void validate_config(const SimulationConfig& config) {
  if (config.n < 10) throw std::invalid_argument("n must be at least 10");
  if (config.outcome_family == AnalysisKind::mean) {
    throw std::invalid_argument("outcome family must be linear or logistic");
  }
  if (config.m_imputations < 2) throw std::invalid_argument("M must be at least 2");
  if (config.n_replicates < 1) throw std::invalid_argument("need at least 1 replicate");
  if (config.methods.empty()) throw std::invalid_argument("no methods requested");
  const bool needs_grid =
      has_method(config, MethodTag::proposed) || has_method(config, MethodTag::carpenter);
  if (needs_grid && config.assumed_phi1_grid.empty()) {
    throw std::invalid_argument("assumed phi1 grid must be nonempty for the requested methods");
  }
  for (double phi : config.assumed_phi1_grid) {
    if (!std::isfinite(phi)) throw std::invalid_argument("assumed phi1 values must be finite");
  }
  if (!std::isfinite(config.true_phi1)) {
    throw std::invalid_argument("true phi1 must be finite");
  }
  if (std::find(config.se_methods.begin(), config.se_methods.end(), SeMethod::bootstrap) !=
          config.se_methods.end() &&
      config.boot_reps < 2) {
    throw std::invalid_argument("bootstrap needs at least 2 replicates");
  }
}

DataMatrix generate_dataset(const SimulationConfig& config, Rng& rng) {
  const int n = config.n;
  Eigen::MatrixXd values(n, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const double z2 = normal(rng);
    values(i, 1) = z2;
    if (config.outcome_family == AnalysisKind::linear) {
      values(i, 0) = 0.5 * z2 + normal(rng);
    } else {
      values(i, 0) = unif(rng) < expit(0.5 * z2) ? 1.0 : 0.0;
    }
  }
  Mask observed = Mask::Constant(n, 2, true);
  std::vector<ColumnMeta> meta{
      {"Z1", config.outcome_family == AnalysisKind::logistic ? ColumnKind::binary
                                                             : ColumnKind::continuous},
      {"Z2", ColumnKind::continuous}};
  return DataMatrix(std::move(values), std::move(observed), std::move(meta));
}

DataMatrix impose_missingness(const DataMatrix& data, double true_phi1, Rng& rng) {
  const int n = data.n();
  Mask observed = data.observed();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int n_missing = 0;
  for (int i = 0; i < n; ++i) {
    const double p_obs = expit(true_phi1 * data.value(i, 0) + data.value(i, 1));
    if (unif(rng) >= p_obs) {
      observed(i, 0) = false;
      ++n_missing;
    }
  }
  if (n_missing == 0 || n_missing == n) {
    throw DegenerateMaskError("mask realization left Z1 with " +
                              std::to_string(n_missing) + " of " + std::to_string(n) +
                              " cells missing");
  }
  return DataMatrix(data.values(), std::move(observed), data.col_meta());
}

ReplicateResult run_replicate(const SimulationConfig& config, int replicate_index) {
  validate_config(config);
  ReplicateResult result;
  result.replicate = replicate_index + 1;

  const std::uint64_t rep = static_cast<std::uint64_t>(replicate_index) + 1;
  Rng gen_rng = substream(config.seed, rep, 1);
  Rng miss_rng = substream(config.seed, rep, 2);

  DataMatrix data = [&] {
    for (int attempt = 0; attempt <= 100; ++attempt) {
      DataMatrix full = generate_dataset(config, gen_rng);
      try {
        return impose_missingness(full, config.true_phi1, miss_rng);
      } catch (const DegenerateMaskError&) {
        ++result.degenerate_retries;
      }
    }
    throw std::runtime_error("replicate " + std::to_string(result.replicate) +
                             ": degenerate mask after 100 resampling attempts");
  }();

  VariableRole roles;
  roles.target_mnar = 0;
  roles.fully_observed = {1};
  validate_roles(data, roles);

  MiceConfig mice_config;
  mice_config.m_imputations = config.m_imputations;
  mice_config.n_iterations = config.mice_iterations;
  mice_config.seed = mix_seed(config.seed, rep, 3);
  ConditionalModelSpec model;
  model.target_col = 0;
  model.predictor_cols = {1};
  model.family = config.outcome_family == AnalysisKind::logistic
                     ? ImputationFamily::logistic
                     : ImputationFamily::normal_linear;
  mice_config.models = {model};
  if (config.fixed_sigma && config.outcome_family == AnalysisKind::linear) {
    mice_config.fixed_sigma2 = 1.0;  // generative residual variance
  }
  std::vector<CompletedDataset> imputations = run_mice(data, mice_config);
  ImputedStack base_stack = stack(imputations, data);

  TargetAnalysisSpec analysis;
  analysis.kind = config.outcome_family;
  analysis.outcome_col = 0;
  analysis.covariate_cols = {1};
  analysis.intercept = true;

  auto push_cell = [&](MethodTag method, const std::string& se_method, double phi1,
                       FitResult fit) {
    fit.method_tag = method;
    result.cells.push_back(CellFit{method, se_method, phi1, std::move(fit)});
  };

  // Stacked fit plus every requested variance method; shared by the MAR
  // baseline and the proposed method.
  auto stacked_cells = [&](MethodTag method, const ImputedStack& s, double phi1,
                           std::uint64_t se_stream) {
    FitResult fit = weighted_fit(s, analysis);
    if (config.se_methods.empty()) {
      push_cell(method, "none", phi1, fit);
      return;
    }
    for (std::size_t v = 0; v < config.se_methods.size(); ++v) {
      const SeMethod se = config.se_methods[v];
      FitResult with_se = fit;
      switch (se) {
        case SeMethod::louis:
          with_se.v_total = louis_cov(s, analysis, fit.theta);
          break;
        case SeMethod::bootstrap: {
          VarianceRequest request;
          request.method = SeMethod::bootstrap;
          request.n_bootstrap = config.boot_reps;
          request.seed = mix_seed(config.seed, rep, 4, se_stream);
          with_se.v_between = bootstrap_between(s, analysis, request);
          with_se.v_total = combine_variance(with_se.v_stack, *with_se.v_between, s.m);
          break;
        }
        case SeMethod::jackknife:
          with_se.v_between = jackknife_between(s, analysis);
          with_se.v_total = combine_variance(with_se.v_stack, *with_se.v_between, s.m);
          break;
      }
      push_cell(method, se_method_name(se), phi1, std::move(with_se));
    }
  };

  if (has_method(config, MethodTag::complete_case)) {
    FitResult fit = complete_case_fit(data, analysis);
    fit.v_total = fit.v_stack;
    push_cell(MethodTag::complete_case, "model", 0.0, std::move(fit));
  }

  if (has_method(config, MethodTag::mar)) {
    stacked_cells(MethodTag::mar, base_stack, 0.0, 0);
  }

  if (has_method(config, MethodTag::carpenter)) {
    std::vector<FitResult> per_imp;
    per_imp.reserve(imputations.size());
    for (const auto& imp : imputations) {
      per_imp.push_back(single_dataset_fit(imp.values, analysis));
    }
    // Reuse the parameter names of the target analysis.
    for (auto& fit : per_imp) fit.param_names = analysis_param_names(analysis, data.col_meta());
    for (double phi1 : config.assumed_phi1_grid) {
      const Eigen::VectorXd alpha = weights_carpenter(imputations, phi1, 0);
      FitResult pooled = carpenter_pool(per_imp, alpha);
      push_cell(MethodTag::carpenter, "pooled", phi1, std::move(pooled));
    }
  }

  if (has_method(config, MethodTag::proposed)) {
    MnarWeightSpec weight_spec;
    weight_spec.target_col = 0;
    weight_spec.link = MissingnessLink::logistic;
    for (std::size_t g = 0; g < config.assumed_phi1_grid.size(); ++g) {
      weight_spec.phi1 = config.assumed_phi1_grid[g];
      ImputedStack weighted = weights_logistic(base_stack, weight_spec);
      stacked_cells(MethodTag::proposed, weighted, weight_spec.phi1, g + 1);
    }
  }

  return result;
}

double true_parameter_value(const std::string& parameter) {
  if (parameter == "Z2") return 0.5;
  return 0.0;  // intercept
}

std::vector<ResultRow> replicate_rows(const ReplicateResult& result,
                                      const SimulationConfig& config) {
  (void)config;
  std::vector<ResultRow> rows;
  for (const auto& cell : result.cells) {
    for (Eigen::Index j = 0; j < cell.fit.theta.size(); ++j) {
      ResultRow row;
      row.replicate = result.replicate;
      row.method = method_name(cell.method);
      row.se_method = cell.se_method;
      row.assumed_phi1 = cell.assumed_phi1;
      row.parameter = cell.fit.param_names[static_cast<std::size_t>(j)];
      row.estimate = cell.fit.theta[j];
      if (cell.fit.v_total.has_value()) {
        row.se = std::sqrt((*cell.fit.v_total)(j, j));
        const double truth = true_parameter_value(row.parameter);
        row.covered = std::abs(row.estimate - truth) <= kZ975 * row.se ? 1 : 0;
      } else {
        row.se = std::numeric_limits<double>::quiet_NaN();
        row.covered = -1;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

SimulationReport summarize_study(const std::vector<ResultRow>& rows,
                                 const SimulationConfig& config) {
  if (rows.empty()) throw std::invalid_argument("no replicate results to summarize");
  SimulationReport report;
  report.n_replicates_requested = config.n_replicates;

  std::map<std::tuple<std::string, std::string, double, std::string>,
           std::vector<const ResultRow*>>
      cells;
  for (const auto& row : rows) {
    cells[{row.method, row.se_method, row.assumed_phi1, row.parameter}].push_back(&row);
  }

  for (const auto& [key, cell_rows] : cells) {
    CellSummary s;
    s.method = std::get<0>(key);
    s.se_method = std::get<1>(key);
    s.assumed_phi1 = std::get<2>(key);
    s.parameter = std::get<3>(key);
    s.n_replicates = static_cast<int>(cell_rows.size());

    double sum = 0.0;
    for (const auto* r : cell_rows) sum += r->estimate;
    s.mean_estimate = sum / s.n_replicates;

    const double truth = true_parameter_value(s.parameter);
    s.bias = s.mean_estimate - truth;
    s.rel_bias_pct = truth != 0.0 ? 100.0 * s.bias / truth
                                  : std::numeric_limits<double>::quiet_NaN();

    double ss = 0.0;
    for (const auto* r : cell_rows) ss += (r->estimate - s.mean_estimate) *
                                         (r->estimate - s.mean_estimate);
    s.empirical_sd = s.n_replicates > 1 ? std::sqrt(ss / (s.n_replicates - 1)) : 0.0;

    bool any_se = false;
    double se_sum = 0.0;
    int covered = 0, with_ci = 0;
    for (const auto* r : cell_rows) {
      if (r->covered < 0) continue;
      any_se = true;
      se_sum += r->se;
      covered += r->covered;
      ++with_ci;
    }
    if (any_se) {
      s.mean_se = se_sum / with_ci;
      s.coverage = static_cast<double>(covered) / with_ci;
    } else {
      s.mean_se = std::numeric_limits<double>::quiet_NaN();
      s.coverage = std::numeric_limits<double>::quiet_NaN();
    }
    report.cells.push_back(std::move(s));
  }
  return report;
}

StudyOutput run_study(const SimulationConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();

  std::vector<ReplicateResult> results(static_cast<std::size_t>(config.n_replicates));
  std::vector<std::string> failures(static_cast<std::size_t>(config.n_replicates));
  parallel_for(config.n_replicates, config.workers, [&](int r) {
    try {
      results[static_cast<std::size_t>(r)] = run_replicate(config, r);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(r)] =
          "replicate " + std::to_string(r + 1) + ": " + e.what();
    }
  });

  StudyOutput out;
  int done = 0, degenerate = 0;
  for (int r = 0; r < config.n_replicates; ++r) {
    const auto& failure = failures[static_cast<std::size_t>(r)];
    if (!failure.empty()) {
      out.report.failures.push_back(failure);
      continue;
    }
    const auto& result = results[static_cast<std::size_t>(r)];
    degenerate += result.degenerate_retries;
    ++done;
    auto rows = replicate_rows(result, config);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  if (done == 0) {
    throw std::runtime_error("every replicate failed; first failure: " +
                             (out.report.failures.empty() ? std::string("?")
                                                          : out.report.failures.front()));
  }
  auto failures_keep = std::move(out.report.failures);
  out.report = summarize_study(out.rows, config);
  out.report.failures = std::move(failures_keep);
  out.report.n_replicates_requested = config.n_replicates;
  out.report.n_replicates_done = done;
  out.report.degenerate_resamples = degenerate;
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

std::string family_name(AnalysisKind kind) {
  return kind == AnalysisKind::logistic ? "logistic" : "linear";
}

std::string csv_cell(double x) {
  return std::isnan(x) ? std::string() : csv::format_double(x);
}

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows, const SimulationConfig& config,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << "replicate,method,se_method,assumed_phi1,true_phi1,n,M,family,parameter,"
         "estimate,se,covered\n";
  for (const auto& r : rows) {
    out << r.replicate << ',' << r.method << ',' << r.se_method << ','
        << csv::format_double(r.assumed_phi1) << ',' << csv::format_double(config.true_phi1)
        << ',' << config.n << ',' << config.m_imputations << ','
        << family_name(config.outcome_family) << ',' << r.parameter << ','
        << csv::format_double(r.estimate) << ',' << csv_cell(r.se) << ','
        << (r.covered < 0 ? std::string() : std::to_string(r.covered)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary_csv(const SimulationReport& report, const SimulationConfig& config,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << "method,se_method,assumed_phi1,true_phi1,n,M,family,parameter,replicates,"
         "mean_estimate,bias,rel_bias_pct,empirical_sd,mean_se,coverage\n";
  for (const auto& c : report.cells) {
    out << c.method << ',' << c.se_method << ',' << csv::format_double(c.assumed_phi1) << ','
        << csv::format_double(config.true_phi1) << ',' << config.n << ','
        << config.m_imputations << ',' << family_name(config.outcome_family) << ','
        << c.parameter << ',' << c.n_replicates << ',' << csv::format_double(c.mean_estimate)
        << ',' << csv::format_double(c.bias) << ',' << csv_cell(c.rel_bias_pct) << ','
        << csv::format_double(c.empirical_sd) << ',' << csv_cell(c.mean_se) << ','
        << csv_cell(c.coverage) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stackmnar
