#pragma once

// YAML configuration files. Two optional top-level maps, `env` and `train`;
// every key is optional and unknown keys are rejected. See docs/config.md.

#include <filesystem>
#include <string>

#include "gridflux/config.hpp"

namespace gridflux {

struct RunConfig {
  EnvConfig env;
  TrainConfig train;
};

// Throws ConfigError naming the offending key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

// Resolved config, in the same format load_config accepts.
std::string dump_config(const RunConfig& cfg);

}  // namespace gridflux
