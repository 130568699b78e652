#pragma once

#include <map>
#include <string>
#include <vector>

#include "swatsim/control.hpp"
#include "swatsim/invariants.hpp"
#include "swatsim/plant.hpp"

namespace swatsim {

struct DetectionParams {
  int window = 30;                  // SA window length n
  int settle_margin = 60;           // ticks after the last attack still credited to it
  double calibration_factor = 3.0;  // epsilon = factor * worst nominal window mean
  long calibration_ticks = 10000;
  double epsilon_floor = 1.0;       // lower bound on any calibrated epsilon
  std::map<std::string, double> epsilon;  // tank id -> threshold
};

/// Everything that parameterises a run.
struct Config {
  StageTopology topology = StageTopology::swat_defaults();
  NoiseSpec noise;
  std::map<std::string, double> setpoints;  // design values; PLCs start with a copy
  std::vector<ControlRule> rules;
  std::vector<SdInvariant> sd_invariants;
  std::vector<SaInvariant> sa_invariants;
  DetectionParams detection;

  /// SA epsilon for a tank, falling back to the floor.
  double epsilon_for(const std::string& tank) const;
};

/// Parses YAML text. Errors name `source` and the offending line.
Config parse_config(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::string& path);

/// Directory holding the shipped config and attack catalog.
std::string data_dir();
std::string default_config_path();

}  // namespace swatsim
