#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "stackmnar/csv.hpp"
#include "stackmnar/data.hpp"
#include "stackmnar/estimators.hpp"
#include "stackmnar/mice.hpp"
#include "stackmnar/numeric.hpp"
#include "stackmnar/simulation.hpp"
#include "stackmnar/stack.hpp"
#include "stackmnar/variance.hpp"
#include "stackmnar/version.hpp"
#include "stackmnar/weights.hpp"
#include "plots.hpp"

namespace stackmnar::cli {

namespace {

namespace fs = std::filesystem;

void print_banner(const RunConfig& config) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config.hash()));
  std::cout << "stackmnar " << kVersion << " " << config.subcommand
            << " seed=" << config.seed() << " config_hash=" << hash << "\n";
}

fs::path ensure_out_dir(const RunConfig& config) {
  fs::path dir(config.str("out_dir", "."));
  fs::create_directories(dir);
  return dir;
}

DataMatrix load_input(const RunConfig& config) {
  const std::string input = config.str("input");
  if (input.empty()) {
    throw std::invalid_argument("subcommand '" + config.subcommand +
                                "' requires key 'input'");
  }
  std::optional<std::set<std::string>> binary;
  if (config.has("binary")) {
    const auto names = config.name_list("binary");
    binary = std::set<std::string>(names.begin(), names.end());
  }
  return load_csv(input, config.str("na_token", "NA"), binary);
}

// Roles from the config keys; unlisted columns are classified by their
// observed missingness. The full degeneracy validation only applies when the
// target actually has missing cells (a complete target degrades gracefully
// to an unweighted analysis).
VariableRole resolve_roles(const DataMatrix& data, const RunConfig& config) {
  const std::string target = config.str("target");
  if (target.empty()) {
    throw std::invalid_argument("subcommand '" + config.subcommand +
                                "' requires key 'target'");
  }
  VariableRole roles;
  roles.target_mnar = data.column_index(target);

  std::set<int> assigned{roles.target_mnar};
  for (const auto& name : config.name_list("mar")) {
    roles.mar_missing.push_back(data.column_index(name));
    assigned.insert(roles.mar_missing.back());
  }
  for (const auto& name : config.name_list("observed")) {
    roles.fully_observed.push_back(data.column_index(name));
    assigned.insert(roles.fully_observed.back());
  }
  for (int j = 0; j < data.p(); ++j) {
    if (assigned.count(j)) continue;
    if (data.column_fully_observed(j)) {
      roles.fully_observed.push_back(j);
    } else {
      roles.mar_missing.push_back(j);
    }
  }
  if (data.n_missing_in_column(roles.target_mnar) > 0) {
    validate_roles(data, roles);
  } else {
    for (int j : roles.fully_observed) {
      if (!data.column_fully_observed(j)) {
        throw std::invalid_argument("column '" + data.column_name(j) +
                                    "' is declared fully observed but has missing cells");
      }
    }
  }
  return roles;
}

MiceConfig build_mice_config(const DataMatrix& data, const RunConfig& config,
                             int default_m) {
  MiceConfig mice;
  mice.m_imputations = config.integer("m", default_m);
  mice.n_iterations = config.integer("iterations", 10);
  mice.seed = config.seed();
  if (config.has("fixed_sigma")) mice.fixed_sigma2 = config.required_num("fixed_sigma");
  for (int j = 0; j < data.p(); ++j) {
    if (data.n_missing_in_column(j) == 0) continue;
    ConditionalModelSpec spec;
    spec.target_col = j;
    for (int k = 0; k < data.p(); ++k) {
      if (k != j) spec.predictor_cols.push_back(k);
    }
    spec.family = data.column_kind(j) == ColumnKind::binary ? ImputationFamily::logistic
                                                            : ImputationFamily::normal_linear;
    mice.models.push_back(std::move(spec));
  }
  return mice;
}

void write_imputations_csv(const std::vector<CompletedDataset>& imputations,
                           const DataMatrix& data, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path.string());
  out << "imputation";
  for (int j = 0; j < data.p(); ++j) out << ',' << data.column_name(j);
  out << '\n';
  for (const auto& imp : imputations) {
    for (int i = 0; i < data.n(); ++i) {
      out << (imp.imputation + 1);
      for (int j = 0; j < data.p(); ++j) out << ',' << csv::format_double(imp.values(i, j));
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<CompletedDataset> read_imputations_csv(const fs::path& path,
                                                   const DataMatrix& data) {
  const csv::Table t = csv::read_file(path.string());
  if (t.columns.empty() || t.columns[0] != "imputation") {
    throw std::runtime_error("imputations file must start with an 'imputation' column: " +
                             path.string());
  }
  if (static_cast<int>(t.columns.size()) != data.p() + 1) {
    throw std::runtime_error("imputations file has " +
                             std::to_string(t.columns.size() - 1) +
                             " variable columns, expected " + std::to_string(data.p()));
  }
  for (int j = 0; j < data.p(); ++j) {
    if (t.columns[static_cast<std::size_t>(j) + 1] != data.column_name(j)) {
      throw std::runtime_error("imputations column '" +
                               t.columns[static_cast<std::size_t>(j) + 1] +
                               "' does not match input column '" + data.column_name(j) + "'");
    }
  }
  const int n = data.n();
  if (t.rows.empty() || static_cast<int>(t.rows.size()) % n != 0) {
    throw std::runtime_error("imputations row count is not a multiple of the subject count");
  }
  const int m = static_cast<int>(t.rows.size()) / n;
  auto mask = std::make_shared<const Mask>(data.observed());
  std::vector<CompletedDataset> out;
  for (int k = 0; k < m; ++k) {
    Eigen::MatrixXd values(n, data.p());
    for (int i = 0; i < n; ++i) {
      const auto& row = t.rows[static_cast<std::size_t>(k * n + i)];
      const int imp_index = static_cast<int>(csv::parse_double(row[0], k * n + i + 1, "imputation"));
      if (imp_index != k + 1) {
        throw std::runtime_error("imputations rows out of order at data row " +
                                 std::to_string(k * n + i + 1));
      }
      for (int j = 0; j < data.p(); ++j) {
        values(i, j) = csv::parse_double(row[static_cast<std::size_t>(j) + 1],
                                         k * n + i + 1, data.column_name(j));
      }
    }
    out.push_back(CompletedDataset{std::move(values), k, mask});
  }
  return out;
}

MissingnessLink parse_link(const RunConfig& config) {
  const std::string link = config.str("link", "logistic");
  if (link == "logistic") return MissingnessLink::logistic;
  if (link == "probit") return MissingnessLink::probit;
  throw std::invalid_argument("unknown link '" + link + "' (expected logistic or probit)");
}

// "col:phi,col:phi" pairs for the multi-variable MNAR case.
std::vector<std::pair<int, double>> parse_mnar_vars(const RunConfig& config,
                                                    const DataMatrix& data) {
  std::vector<std::pair<int, double>> out;
  for (const auto& entry : config.name_list("mnar_vars")) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("mnar_vars entry '" + entry + "' is not name:phi");
    }
    const std::string name = entry.substr(0, colon);
    const std::string phi_text = entry.substr(colon + 1);
    out.emplace_back(data.column_index(name),
                     csv::parse_double(phi_text, 0, "mnar_vars"));
  }
  return out;
}

ImputedStack apply_weights(const ImputedStack& base, const RunConfig& config,
                           const DataMatrix& data, const VariableRole& roles,
                           double phi1) {
  if (config.has("mnar_vars")) {
    auto targets = parse_mnar_vars(config, data);
    return weights_multivar(base, targets);
  }
  MnarWeightSpec spec;
  spec.target_col = roles.target_mnar;
  spec.phi1 = phi1;
  spec.link = parse_link(config);
  if (spec.link == MissingnessLink::logistic) {
    return weights_logistic(base, spec);
  }
  return weights_general_link(base, spec, data, roles);
}

AnalysisKind parse_analysis_kind(const std::string& name) {
  if (name == "mean") return AnalysisKind::mean;
  if (name == "linear") return AnalysisKind::linear;
  if (name == "logistic") return AnalysisKind::logistic;
  throw std::invalid_argument("unknown analysis '" + name +
                              "' (expected mean, linear, or logistic)");
}

std::vector<SeMethod> parse_se_methods(const RunConfig& config,
                                       const std::string& fallback) {
  std::vector<SeMethod> out;
  const std::string text = config.str("se", fallback);
  RunConfig helper;
  helper.kv["se"] = text;
  for (const auto& name : helper.name_list("se")) {
    if (name == "louis") {
      out.push_back(SeMethod::louis);
    } else if (name == "bootstrap") {
      out.push_back(SeMethod::bootstrap);
    } else if (name == "jackknife") {
      out.push_back(SeMethod::jackknife);
    } else {
      throw std::invalid_argument("unknown se method '" + name + "'");
    }
  }
  return out;
}

constexpr double kZ975 = 1.959963984540054;

}  // namespace

int cmd_impute(const RunConfig& config) {
  print_banner(config);
  DataMatrix data = load_input(config);
  if (config.has("target")) resolve_roles(data, config);
  MiceConfig mice = build_mice_config(data, config, 20);
  auto imputations = run_mice(data, mice);
  const fs::path out = ensure_out_dir(config) / "imputations.csv";
  write_imputations_csv(imputations, data, out);
  std::cout << "wrote " << out.string() << " (M=" << mice.m_imputations << ")\n";
  return 0;
}

int cmd_weight(const RunConfig& config) {
  print_banner(config);
  DataMatrix data = load_input(config);
  VariableRole roles = resolve_roles(data, config);
  const fs::path dir = ensure_out_dir(config);
  const fs::path imp_path = config.has("imputations")
                                ? fs::path(config.str("imputations"))
                                : dir / "imputations.csv";
  auto imputations = read_imputations_csv(imp_path, data);
  ImputedStack base = stack(imputations, data);
  const double phi1 = config.has("mnar_vars") ? 0.0 : config.required_num("phi1");
  ImputedStack weighted = apply_weights(base, config, data, roles, phi1);
  const fs::path out = dir / "stack.csv";
  save_stack_csv(weighted, out.string());
  std::cout << "wrote " << out.string() << " (rows=" << weighted.rows() << ")\n";
  return 0;
}

int cmd_analyze(const RunConfig& config) {
  print_banner(config);
  DataMatrix data = load_input(config);
  VariableRole roles = resolve_roles(data, config);

  MiceConfig mice = build_mice_config(data, config, 50);
  auto imputations = run_mice(data, mice);
  ImputedStack base = stack(imputations, data);

  TargetAnalysisSpec analysis;
  analysis.kind = parse_analysis_kind(config.str("analysis", "linear"));
  analysis.outcome_col = config.has("outcome") ? data.column_index(config.str("outcome"))
                                               : roles.target_mnar;
  if (config.has("covariates")) {
    for (const auto& name : config.name_list("covariates")) {
      analysis.covariate_cols.push_back(data.column_index(name));
    }
  } else if (analysis.kind != AnalysisKind::mean) {
    for (int j = 0; j < data.p(); ++j) {
      if (j != analysis.outcome_col) analysis.covariate_cols.push_back(j);
    }
  }
  analysis.intercept = config.flag("intercept", true);

  std::vector<double> grid = config.has("phi1_grid") ? config.number_list("phi1_grid")
                             : config.has("phi1")
                                 ? std::vector<double>{config.required_num("phi1")}
                                 : std::vector<double>{0.0};
  if (grid.empty()) throw std::invalid_argument("phi1_grid is empty");
  std::sort(grid.begin(), grid.end());

  const std::vector<SeMethod> se_methods = parse_se_methods(config, "louis");
  const int boot_reps = config.integer("boot_reps", 200);

  const fs::path out_path = ensure_out_dir(config) / "results.csv";
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + out_path.string());
  out << "method,phi1,parameter,estimate,se_method,se,ci_low,ci_high\n";

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double phi1 = grid[g];
    ImputedStack weighted = apply_weights(base, config, data, roles, phi1);
    FitResult fit = weighted_fit(weighted, analysis);

    auto emit = [&](const std::string& se_name, const Eigen::MatrixXd& cov) {
      for (Eigen::Index j = 0; j < fit.theta.size(); ++j) {
        const double se = std::sqrt(cov(j, j));
        out << "proposed," << csv::format_double(phi1) << ','
            << fit.param_names[static_cast<std::size_t>(j)] << ','
            << csv::format_double(fit.theta[j]) << ',' << se_name << ','
            << csv::format_double(se) << ','
            << csv::format_double(fit.theta[j] - kZ975 * se) << ','
            << csv::format_double(fit.theta[j] + kZ975 * se) << '\n';
      }
    };

    for (SeMethod method : se_methods) {
      switch (method) {
        case SeMethod::louis:
          emit("louis", louis_cov(weighted, analysis, fit.theta));
          break;
        case SeMethod::bootstrap: {
          VarianceRequest request;
          request.method = SeMethod::bootstrap;
          request.n_bootstrap = boot_reps;
          request.seed = mix_seed(config.seed(), 0xB007, g);
          emit("bootstrap", combine_variance(fit.v_stack,
                                             bootstrap_between(weighted, analysis, request),
                                             weighted.m));
          break;
        }
        case SeMethod::jackknife:
          emit("jackknife", combine_variance(fit.v_stack,
                                             jackknife_between(weighted, analysis),
                                             weighted.m));
          break;
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + out_path.string());
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& config) {
  print_banner(config);
  SimulationConfig sim;
  sim.n = config.integer("n", 1000);
  const std::string family = config.str("family", "linear");
  sim.outcome_family = parse_analysis_kind(family);
  sim.true_phi1 = config.num("true_phi1", 1.0);
  if (config.has("phi1_grid")) sim.assumed_phi1_grid = config.number_list("phi1_grid");
  sim.m_imputations = config.integer("m", 50);
  sim.mice_iterations = config.integer("iterations", 10);
  sim.n_replicates = config.integer("replicates", 200);
  sim.seed = config.seed();
  sim.boot_reps = config.integer("boot_reps", 200);
  sim.workers = config.integer("workers", 1);
  sim.fixed_sigma = config.has("fixed_sigma") && config.flag("fixed_sigma");

  if (config.has("methods")) {
    sim.methods.clear();
    for (const auto& name : config.name_list("methods")) {
      if (name == "complete_case") {
        sim.methods.push_back(MethodTag::complete_case);
      } else if (name == "mar") {
        sim.methods.push_back(MethodTag::mar);
      } else if (name == "carpenter") {
        sim.methods.push_back(MethodTag::carpenter);
      } else if (name == "proposed") {
        sim.methods.push_back(MethodTag::proposed);
      } else {
        throw std::invalid_argument("unknown method '" + name + "'");
      }
    }
  }
  sim.se_methods = parse_se_methods(config, "louis");

  StudyOutput study = run_study(sim);

  const fs::path dir = ensure_out_dir(config);
  write_results_csv(study.rows, sim, (dir / "results.csv").string());
  write_summary_csv(study.report, sim, (dir / "summary.csv").string());
  if (!config.flag("no_plots", false)) {
    write_estimate_plot(study.report, sim, (dir / "estimates.svg").string());
    write_coverage_plot(study.report, sim, (dir / "coverage.svg").string());
  }

  // Human-readable summary table for the Z2 coefficient.
  std::printf("%-14s %-10s %12s %12s %10s %10s %10s\n", "method", "se", "assumed_phi1",
              "mean_est", "bias%", "emp_sd", "coverage");
  for (const auto& cell : study.report.cells) {
    if (cell.parameter != "Z2") continue;
    char coverage[16];
    if (std::isnan(cell.coverage)) {
      std::snprintf(coverage, sizeof(coverage), "-");
    } else {
      std::snprintf(coverage, sizeof(coverage), "%.3f", cell.coverage);
    }
    std::printf("%-14s %-10s %12.3f %12.5f %10.2f %10.4f %10s\n", cell.method.c_str(),
                cell.se_method.c_str(), cell.assumed_phi1, cell.mean_estimate,
                cell.rel_bias_pct, cell.empirical_sd, coverage);
  }
  std::cout << "replicates: " << study.report.n_replicates_done << "/"
            << study.report.n_replicates_requested
            << "  degenerate resamples: " << study.report.degenerate_resamples
            << "  failures: " << study.report.failures.size()
            << "  wall: " << study.report.wall_seconds << "s\n";
  for (const auto& failure : study.report.failures) {
    std::cerr << "failed " << failure << "\n";
  }
  return 0;
}

int run_subcommand(const RunConfig& config) {
  if (config.subcommand == "impute") return cmd_impute(config);
  if (config.subcommand == "weight") return cmd_weight(config);
  if (config.subcommand == "analyze") return cmd_analyze(config);
  if (config.subcommand == "simulate") return cmd_simulate(config);
  throw std::invalid_argument("unknown subcommand '" + config.subcommand + "'");
}

}  // namespace stackmnar::cli
