#pragma once

#include <string>

#include "smrac/analysis.hpp"
#include "smrac/engine.hpp"

namespace smrac {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;
inline constexpr int kExitIo = 4;

/// Simulates a scenario and writes trace.csv, report.txt and plot.svg.
int cmd_run(const std::string& scenario_path, const std::string& out_dir, int decimate = 0);

/// Runs the scenario in memory and baseline modes and writes both traces,
/// comparison.txt and compare.svg.
int cmd_compare(const std::string& scenario_path, const std::string& out_dir);

/// Checks the scenario assumptions (input-matrix rank, Hurwitz reference,
/// matching residuals, grid alignment) and prints the matched gains.
int cmd_validate(const std::string& scenario_path);

/// Writes run outputs into dir; throws IoError on filesystem failures.
void emit_outputs(const RunResult& run, const ConvergenceReport& report,
                  const SimulationConfig& cfg, const std::string& dir);

std::string report_to_text(const ConvergenceReport& report);
std::string comparison_to_text(const ComparisonSummary& cmp);

/// SMRAC_LOG={info,debug} enables progress messages on stderr.
bool log_enabled();
void log_info(const std::string& message);

} // namespace smrac
