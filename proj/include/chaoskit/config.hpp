#pragma once

#include <filesystem>
#include <string>

#include "chaoskit/harness.hpp"

namespace chaoskit {

/// Parses and validates a JSON experiment config. Keys: schema_version,
/// scenario, d, study, p_values, particle_counts, proxy_count, dt,
/// dt_ladder, T, seeds, repetitions, output. Unknown keys are rejected.
/// Step sizes may be plain numbers or strings like "2^-8".
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical JSON echo of a resolved config; parse_config(echo_config(c))
/// reproduces c exactly.
std::string echo_config(const ExperimentConfig& config);

}  // namespace chaoskit
