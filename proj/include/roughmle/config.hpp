#pragma once

#include <string>

#include "roughmle/experiment.hpp"

namespace roughmle {

/// Flat `key = value` text: lists as `[a, b]` or `a, b`, `#` comments,
/// optional quotes around strings. Unknown keys are a ConfigError.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Applies one key/value pair to an existing config.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace roughmle
