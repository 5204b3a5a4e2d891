#pragma once

#include <string>

#include "smrac/engine.hpp"

namespace smrac {

/// Parses a scenario file into a validated SimulationConfig.
/// Throws ConfigError with a line-anchored message on parse failures and a
/// field-anchored message on semantic failures.
SimulationConfig load_scenario_file(const std::string& path);

/// Parses scenario text (same format as the file contents). When validate is
/// false, structural parsing succeeds even if the config violates the model
/// assumptions; cmd_validate uses this to report every violation at once.
SimulationConfig parse_scenario_text(const std::string& text, const std::string& source_name,
                                     bool validate = true);

/// Serializes a config back to scenario text; numeric fields round-trip to
/// full precision (explicit switching instants, no interval shorthand).
std::string scenario_to_text(const SimulationConfig& cfg);

} // namespace smrac
