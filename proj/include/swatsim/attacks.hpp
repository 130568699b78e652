#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swatsim/tag.hpp"

namespace swatsim {

enum class Access { Network, Panel, EngineeringTool, Physical };

enum class PrimitiveKind {
  SensorSpoofConstant,    // forged sensor reading on the RIO -> PLC link
  SensorOffset,           // reading shifted by an offset on the RIO -> PLC link
  L0MitmRewrite,          // rewrite a sensor reading or an actuator command on Level 0
  L1MitmRewrite,          // rewrite a tag on one Level-1 channel
  DropTrafficTo,          // drop every Level-1 message into an observer
  SynFloodPlc,            // the PLC's Level-1 replies never get out
  HistorianTamper,        // overwrite stored historian values
  RioDisconnect,          // RIO stops reporting some sensors
  ManualCableDisconnect,  // PLC <-> RIO cable pulled
  ActuatorOverrideHmi,    // PLC put in manual with forced actuator positions
  SetpointChange,         // PLC's copy of a setpoint rewritten
  PlcReprogramPin,        // PLC logic pins an input or output to a constant
  DosingOverride,         // dosing pump forced on or off
};

std::string_view to_string(PrimitiveKind k);
std::optional<PrimitiveKind> parse_primitive_kind(std::string_view s);
std::string_view to_string(Access a);
std::optional<Access> parse_access(std::string_view s);

struct AttackPrimitive {
  PrimitiveKind kind = PrimitiveKind::SensorSpoofConstant;
  Tick start = 0;
  Tick end = 0;  // inclusive
  Access access = Access::Network;

  std::string tag;
  double value = 0.0;
  int plc = 0;           // target PLC (manual, setpoint, flood, cable)
  std::string observer;  // DropTrafficTo / L1MitmRewrite destination
  std::string setpoint;
  std::vector<std::string> tags;               // RioDisconnect
  std::map<std::string, Position> overrides;   // ActuatorOverrideHmi
  std::string alternate_tag;                   // optional toggled actuator
  std::vector<Position> alternate_positions;
  int alternate_period = 1;

  /// Manual overrides in force at tick t (alternation applied).
  std::map<std::string, Position> overrides_at(Tick t) const;
};

enum class AttackerProfile { Insider, CyberCriminal };

std::string_view to_string(AttackerProfile p);
std::optional<AttackerProfile> parse_profile(std::string_view s);

struct AttackScenario {
  std::string id;
  int year = 0;
  int row = 0;
  AttackerProfile profile = AttackerProfile::Insider;
  std::string target;
  std::string category;
  std::string notes;
  std::optional<bool> expected_wd;
  std::optional<bool> expected_wdh;
  std::map<std::string, double> initial_levels;         // tank id -> mm
  std::map<std::string, Position> initial_actuators;
  std::vector<AttackPrimitive> timeline;

  Tick first_start() const;
  Tick last_end() const;
};

/// Throws Error naming the first primitive the profile does not permit.
void validate_profile(const AttackScenario& s);

/// Parses one scenario. Errors name `source` and the offending line.
AttackScenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
AttackScenario load_scenario(const std::string& path);

/// Scenarios of one year, in row order, as listed by `<dir>/index.yaml`.
std::vector<AttackScenario> load_catalog(int year, const std::string& dir);

}  // namespace swatsim
