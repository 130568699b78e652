#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swatsim/attacks.hpp"
#include "swatsim/config.hpp"
#include "swatsim/detectors.hpp"
#include "swatsim/network.hpp"

namespace swatsim {

struct RunOptions {
  std::string profile;  // empty: v2016 for 2016 scenarios, v2017 otherwise
  std::uint64_t seed = 1;
  std::optional<int> settle_margin;  // overrides the config value
};

std::string default_profile(int year);

struct RunResult {
  std::string id;
  int year = 0;
  int row = 0;
  std::string category;
  std::string profile;
  Tick window_start = 0;
  Tick window_end = 0;
  Tick ticks = 0;
  bool wd = false;   // detected in-controller
  bool wdh = false;  // detected at the historian
  std::optional<Tick> first_wd;
  std::optional<Tick> first_wdh;
  long pre_attack_alarms = 0;
  long wd_skipped = 0;
  long wdh_skipped = 0;
  std::optional<bool> expected_wd;
  std::optional<bool> expected_wdh;
  std::vector<std::string> deviations;
  std::vector<Alarm> alarms;
  // Ground-truth summary; never consulted for verdicts.
  std::map<std::string, double> min_level;
  std::map<std::string, double> max_level;
  long dry_run_ticks = 0;
};

RunResult run_scenario(const AttackScenario& scenario, const Config& config, const RunOptions& options = {});

struct CategoryRate {
  std::string category;
  int total = 0;
  int wd = 0;
  int wdh = 0;
};

struct MatrixReport {
  int year = 0;
  std::string profile;
  std::vector<RunResult> runs;
  std::vector<CategoryRate> categories;  // first-seen order
  int total = 0;
  int wd = 0;
  int wdh = 0;
  int deviations = 0;
};

MatrixReport run_catalog(int year, const Config& config, const RunOptions& options = {},
                         const std::string& catalog_dir = data_dir() + "/catalog");

/// Percentage with two decimals, e.g. "67.74".
std::string percent(int part, int whole);

void write_text(std::ostream& out, const MatrixReport& report);
void write_csv(std::ostream& out, const MatrixReport& report);
void write_text(std::ostream& out, const RunResult& run);
void write_alarms_csv(std::ostream& out, const std::vector<Alarm>& alarms);

struct CalibrationReport {
  long ticks = 0;
  std::map<std::string, double> max_window_mean;  // tank -> worst nominal mean
  std::map<std::string, double> epsilon;          // tank -> tuned threshold
  long sd_alarms = 0;                              // during the measuring run
  long alarms_after = 0;                           // verification run with tuned epsilon
};

/// Measures nominal SA residuals, sets epsilon per tank in `config` and
/// re-runs to count alarms. Throws Error when a tank runs away under the
/// nominal rules.
CalibrationReport calibrate(Config& config, std::uint64_t seed = 2, const std::string& profile = "v2017");

void write_text(std::ostream& out, const CalibrationReport& report);

/// Alarms from a nominal run of `ticks` ticks.
std::vector<Alarm> nominal_alarms(const Config& config, Tick ticks, std::uint64_t seed, const std::string& profile);

/// Historian-placement alarms over a stored historian, exactly as the live
/// historian detector would raise them.
std::vector<Alarm> replay_historian(const HistorianStore& store, const Config& config, const std::string& profile,
                                    long* skipped = nullptr);

/// Runs a nominal simulation (or the scenario, when given) and returns the historian.
HistorianStore export_historian(const Config& config, Tick ticks, std::uint64_t seed, const std::string& profile,
                                const AttackScenario* scenario = nullptr);

}  // namespace swatsim
