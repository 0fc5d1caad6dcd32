#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlbm/runtime.hpp"

namespace tlbm {

/// Default keys and values of one subcommand ("simulate", "plan", "bench", "validate").
/// Every accepted key appears here; anything else is a ConfigError.
nlohmann::json default_config(const std::string& subcommand);

/// Defaults, then the file (if any), then flag overrides given as text and
/// converted to the type of the default. Throws ConfigError on unknown keys,
/// type mismatches or unreadable files.
nlohmann::json merge_config(const std::string& subcommand, const std::filesystem::path& file,
                            const std::vector<std::pair<std::string, std::string>>& overrides);

/// "1-32", "1,2,4,8", "1-8,16,32" -> sorted unique integers, each >= min_value.
std::vector<int> parse_int_list(const std::string& text, int min_value = 1);

/// Simulation settings of a merged "simulate" config.
struct SimulateSettings {
  SimulationConfig sim;
  std::string init;
  std::filesystem::path output_dir;
  bool snapshot_csv = false;
  double tdp_watts = 0;
};

SimulateSettings simulate_settings(const nlohmann::json& cfg, const VelocitySet& vs);

}  // namespace tlbm
