#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "swatsim/tag.hpp"

namespace swatsim {

struct TankSpec {
  std::string tank;       // T101 ...
  std::string level_tag;  // LIT101 ...
  double alpha = 0.5;     // mm per (m3/h * tick)
  double dead_level = 150.0;
  double capacity = 1100.0;
  double initial_level = 650.0;
};

struct DosingSpec {
  std::string pump;
  std::string analyzer;
  double target = 7.0;  // pH the pump drives toward
  double rate = 0.004;  // pH units per tick
  std::string backup_of;  // shares a dosing line with this pump; counted once when both run
};

struct AnalyzerSpec {
  std::string tag;
  double nominal = 7.0;     // value the analyzer relaxes toward with no dosing
  double relax_rate = 0.002;
  double initial = 7.0;
};

struct UfSpec {
  double fouling_rate = 0.0002;  // bar per tick while filtering normally
  double blocked_rate = 0.01;    // bar per tick while the UF outlet valve is not open
  double backwash_rate = 0.01;   // bar per tick during backwash
  double baseline_dp = 0.05;
  double initial_dp = 0.1;
  double backwash_flow = 2.0;    // m3/h drawn from T601 during backwash
};

/// Parameters of the fixed six-stage flow path
/// T101 -> T301 -> UF -> T401 -> RO -> T601 (reject) / T602 (permeate) -> T101.
struct StageTopology {
  std::map<std::string, TankSpec> tanks;        // keyed by tank id
  std::map<std::string, double> pump_flow;      // rated m3/h for transfer pumps
  double inlet_flow = 2.5;                      // raw water through MV101
  double permeate_fraction = 0.6;
  int valve_transition_ticks = 5;
  UfSpec uf;
  std::map<std::string, DosingSpec> dosing;     // keyed by pump tag
  std::map<std::string, AnalyzerSpec> analyzers;
  std::map<std::string, Position> initial_actuators;

  const TankSpec& tank(const std::string& id) const;
  /// Tank measured by a level tag, or nullptr.
  const TankSpec* tank_for_level_tag(const std::string& tag) const;

  static StageTopology swat_defaults();
};

struct PlantState {
  Tick tick = 0;
  std::map<std::string, double> level;  // tank id -> mm
  std::map<std::string, double> flow;   // flow tag -> m3/h during [tick, tick+1)
  double dp = 0.0;                      // DPIT301, bar
  std::map<std::string, double> ph;     // analyzer tag -> pH
  std::map<std::string, ActuatorPosition> actuator;
  std::map<std::string, long> pump_dry_ticks;

  bool operator==(const PlantState&) const = default;
};

using Commands = std::map<std::string, Position>;

PlantState initial_plant_state(const StageTopology& topo);

/// Recomputes every flow meter from actuator positions and levels.
void compute_flows(PlantState& state, const StageTopology& topo);

/// Net flow (in - out, m3/h) into every tank for the current tick.
std::map<std::string, double> tank_net_flows(const PlantState& state, const StageTopology& topo);

/// Advances one tick. Levels, dp and pH integrate the flows of `state`;
/// `commands` move actuators for the next tick. Throws Error for a command on
/// an unknown or non-actuator tag.
PlantState step_plant(const PlantState& state, const Commands& commands, const StageTopology& topo);

/// Moves the analyzer fed by `pump` toward the pump's target by rate * dt.
/// Throws Error when `pump` is not a dosing pump.
PlantState apply_dosing(const PlantState& state, const std::string& pump, double dt,
                        const StageTopology& topo);

struct NoiseSpec {
  bool enabled = false;
  double level_mm = 1.0;
  double flow = 0.01;
  double dp = 0.002;
  double ph = 0.01;
};

/// Deterministic uniform source; portable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [-1, 1).
  double symmetric() { return static_cast<double>(engine_() >> 11) * 0x1.0p-52 - 1.0; }

 private:
  std::mt19937_64 engine_;
};

struct Measurement {
  double value = 0.0;
  std::string units;
};

/// Ground truth for a sensor tag plus bounded noise. Throws Error for an
/// actuator or unknown tag.
Measurement read_sensor(const PlantState& state, const std::string& tag, const NoiseSpec& noise,
                        Rng& rng, const StageTopology& topo);

/// Register code of an actuator's current position (valve/pump feedback).
double actuator_feedback(const PlantState& state, const std::string& tag);

}  // namespace swatsim
