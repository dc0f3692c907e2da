// Command-line front end: impute / weight / analyze / simulate.
#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "commands.hpp"
#include "run_config.hpp"
#include "stackmnar/version.hpp"

namespace {

struct SubcommandFlags {
  std::string config_path;
  std::map<std::string, std::string> entries;
};

// Registers a flag that lands in the key=value map only when the user
// passes it, so config-file entries stay in force otherwise.
void add_kv_option(CLI::App* app, SubcommandFlags& flags, const std::string& flag,
                   const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
         flag, [&flags, key](const std::string& value) { flags.entries[key] = value; }, help)
      ->type_name("TEXT");
}

void add_common(CLI::App* app, SubcommandFlags& flags, bool needs_input) {
  app->add_option("--config", flags.config_path, "key=value config file; flags override");
  if (needs_input) {
    add_kv_option(app, flags, "--input", "input", "input CSV (header row, NA token for missing)");
  }
  add_kv_option(app, flags, "--out-dir", "out_dir", "output directory (default .)");
  add_kv_option(app, flags, "--seed", "seed", "RNG seed");
  add_kv_option(app, flags, "--workers", "workers", "worker threads (results identical for any count)");
}

void add_roles(CLI::App* app, SubcommandFlags& flags) {
  add_kv_option(app, flags, "--target", "target", "possibly-MNAR column name");
  add_kv_option(app, flags, "--mar", "mar", "comma list of other incomplete columns");
  add_kv_option(app, flags, "--observed", "observed", "comma list of fully observed columns");
  add_kv_option(app, flags, "--binary", "binary", "comma list of binary columns (overrides inference)");
  add_kv_option(app, flags, "--na-token", "na_token", "missing-value token (default NA)");
}

void add_imputation(CLI::App* app, SubcommandFlags& flags) {
  add_kv_option(app, flags, "--m", "m", "number of imputations M");
  add_kv_option(app, flags, "--iterations", "iterations", "chained-equation cycles (default 10)");
  add_kv_option(app, flags, "--fixed-sigma", "fixed_sigma", "fix the linear imputation dispersion at this value");
}

void add_weighting(CLI::App* app, SubcommandFlags& flags) {
  add_kv_option(app, flags, "--phi1", "phi1", "sensitivity parameter (log-odds scale)");
  add_kv_option(app, flags, "--link", "link", "missingness link: logistic (default) or probit");
  add_kv_option(app, flags, "--mnar-vars", "mnar_vars", "multi-variable case: name:phi,name:phi");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted stacked-imputation analysis under not-at-random missingness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(stackmnar::kVersion));

  SubcommandFlags impute_flags, weight_flags, analyze_flags, simulate_flags;

  CLI::App* impute = app.add_subcommand("impute", "chained-equations imputation to imputations.csv");
  add_common(impute, impute_flags, true);
  add_roles(impute, impute_flags);
  add_imputation(impute, impute_flags);

  CLI::App* weight = app.add_subcommand("weight", "attach MNAR weights to a stacked imputation set");
  add_common(weight, weight_flags, true);
  add_roles(weight, weight_flags);
  add_imputation(weight, weight_flags);
  add_weighting(weight, weight_flags);
  add_kv_option(weight, weight_flags, "--imputations", "imputations",
                "imputations.csv path (default <out-dir>/imputations.csv)");

  CLI::App* analyze = app.add_subcommand("analyze", "impute, weight over a phi1 grid, fit, and report");
  add_common(analyze, analyze_flags, true);
  add_roles(analyze, analyze_flags);
  add_imputation(analyze, analyze_flags);
  add_weighting(analyze, analyze_flags);
  add_kv_option(analyze, analyze_flags, "--phi1-grid", "phi1_grid", "comma list of assumed phi1 values");
  add_kv_option(analyze, analyze_flags, "--analysis", "analysis", "target analysis: mean, linear, or logistic");
  add_kv_option(analyze, analyze_flags, "--outcome", "outcome", "outcome column (default: target)");
  add_kv_option(analyze, analyze_flags, "--covariates", "covariates", "comma list (default: all other columns)");
  add_kv_option(analyze, analyze_flags, "--intercept", "intercept", "include an intercept (default 1)");
  add_kv_option(analyze, analyze_flags, "--se", "se", "comma subset of louis,bootstrap,jackknife");
  add_kv_option(analyze, analyze_flags, "--boot-reps", "boot_reps", "bootstrap replicates (default 200)");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study: bias and coverage by method");
  add_common(simulate, simulate_flags, false);
  add_kv_option(simulate, simulate_flags, "--n", "n", "subjects per replicate (default 1000)");
  add_kv_option(simulate, simulate_flags, "--family", "family", "outcome family: linear or logistic");
  add_kv_option(simulate, simulate_flags, "--true-phi1", "true_phi1", "generative phi1 (default 1)");
  add_kv_option(simulate, simulate_flags, "--phi1-grid", "phi1_grid", "assumed phi1 grid (default 0,0.2,0.5,0.8,1,1.2)");
  add_kv_option(simulate, simulate_flags, "--m", "m", "imputations per replicate (default 50)");
  add_kv_option(simulate, simulate_flags, "--iterations", "iterations", "chained-equation cycles (default 10)");
  add_kv_option(simulate, simulate_flags, "--replicates", "replicates", "Monte Carlo replicates (default 200)");
  add_kv_option(simulate, simulate_flags, "--methods", "methods",
                "comma subset of complete_case,mar,carpenter,proposed");
  add_kv_option(simulate, simulate_flags, "--se", "se", "comma subset of louis,bootstrap,jackknife");
  add_kv_option(simulate, simulate_flags, "--boot-reps", "boot_reps", "bootstrap replicates (default 200)");
  add_kv_option(simulate, simulate_flags, "--fixed-sigma", "fixed_sigma",
                "impute with dispersion fixed at the generative truth (bool)");
  simulate->add_flag_callback(
      "--no-plots", [&] { simulate_flags.entries["no_plots"] = "1"; },
      "skip SVG plot emission");

  CLI11_PARSE(app, argc, argv);

  const SubcommandFlags* flags = nullptr;
  std::string name;
  if (impute->parsed()) {
    flags = &impute_flags;
    name = "impute";
  } else if (weight->parsed()) {
    flags = &weight_flags;
    name = "weight";
  } else if (analyze->parsed()) {
    flags = &analyze_flags;
    name = "analyze";
  } else {
    flags = &simulate_flags;
    name = "simulate";
  }

  try {
    const auto config = stackmnar::cli::make_run_config(name, flags->config_path, flags->entries);
    return stackmnar::cli::run_subcommand(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
