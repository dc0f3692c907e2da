// Subcommand implementations behind the CLI front end; separated out so the
// test suite can drive them directly.
#ifndef STACKMNAR_TOOLS_COMMANDS_HPP
#define STACKMNAR_TOOLS_COMMANDS_HPP

#include "run_config.hpp"

namespace stackmnar::cli {

int cmd_impute(const RunConfig& config);
int cmd_weight(const RunConfig& config);
int cmd_analyze(const RunConfig& config);
int cmd_simulate(const RunConfig& config);

int run_subcommand(const RunConfig& config);

}  // namespace stackmnar::cli

#endif
