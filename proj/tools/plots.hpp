// Static SVG plots from study summaries. Output is an artifact, never an
// input: the CSV files are authoritative and plotting can be disabled.
#ifndef STACKMNAR_TOOLS_PLOTS_HPP
#define STACKMNAR_TOOLS_PLOTS_HPP

#include <string>

#include "stackmnar/simulation.hpp"

namespace stackmnar::cli {

// Mean estimate of the covariate coefficient against the assumed phi1, one
// polyline per method, with a horizontal line at the generative truth.
void write_estimate_plot(const SimulationReport& report, const SimulationConfig& config,
                         const std::string& path);

// Coverage against the assumed phi1, one polyline per (method, se method),
// with a horizontal line at the nominal 0.95.
void write_coverage_plot(const SimulationReport& report, const SimulationConfig& config,
                         const std::string& path);

}  // namespace stackmnar::cli

#endif
