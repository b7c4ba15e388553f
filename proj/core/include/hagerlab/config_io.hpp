#pragma once

#include <filesystem>
#include <string>

#include "hagerlab/ensemble.hpp"

namespace hagerlab {

/// Parses the JSON experiment-config document.  Exactly one of "delta"
/// (number or the string "exp(-1/h)") and "epsilon0" may be present.
/// Malformed documents throw ConfigError with a position/field diagnostic.
ExperimentConfig config_from_json_text(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Serializes the config back to JSON (the manifest's config echo).
std::string config_to_json_text(const ExperimentConfig& config);

}  // namespace hagerlab
