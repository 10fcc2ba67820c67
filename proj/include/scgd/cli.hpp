#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "scgd/bench.hpp"

namespace scgd {

inline constexpr const char* kVersion = "0.1.0";

/// Flat `key = value` settings, `#` starts a comment.
using ConfigMap = std::map<std::string, std::string>;

/// Throws ConfigError on syntax errors, duplicate or unknown keys.
ConfigMap parse_config_text(const std::string& text);

/// Reads a key-value file or the "config" object of a run manifest.
/// Throws ConfigError naming the path when it cannot be read.
ConfigMap load_config_file(const std::filesystem::path& path);

/// Applies the documented defaults for missing keys. Throws ConfigError
/// naming the offending key.
ExperimentConfig config_from_map(const ConfigMap& map);

/// Every key with its resolved value (auto exploration length replaced by
/// its number); feeding it back to config_from_map gives the same config.
ConfigMap config_to_map(const ExperimentConfig& cfg);

/// Key reference printed by --help.
std::string config_reference();

/// Entry point of the `scgd` binary. Exit codes: 0 success, 2 configuration
/// or input error, 3 run failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scgd
