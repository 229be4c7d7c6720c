#pragma once

#include <string>

#include "spikebench/harness.hpp"

namespace spikebench {

inline constexpr int kConfigSchemaVersion = 1;

// JSON with a schema_version field; unknown keys are rejected with ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace spikebench
