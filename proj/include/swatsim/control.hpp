#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swatsim/expr.hpp"
#include "swatsim/plant.hpp"
#include "swatsim/tag.hpp"

namespace swatsim {

enum class PlcMode { Auto, Manual };

struct Register {
  double value = 0.0;
  Tick received = -1;  // tick of the delivery that last wrote the register
};

/// guard => action. An action either commands an actuator or sets a PLC
/// memory bit. For each target the highest-priority firing rule wins; when no
/// rule fires the previous command (or memory value) holds.
struct ControlRule {
  std::string id;
  int plc = 0;
  Expr guard;
  std::string target;
  std::optional<Position> position;  // actuator command
  double memory_value = 0.0;         // used when position is empty
  int priority = 0;

  bool sets_memory() const { return !position.has_value(); }
};

/// Per-PLC state; `registers` is the PLC's view of the plant.
struct PlcState {
  int id = 0;
  PlcMode mode = PlcMode::Auto;
  std::map<std::string, Register> registers;
  std::map<std::string, Position> manual_overrides;
  std::map<std::string, double> program_patches;  // sensor tag -> pinned input, actuator tag -> pinned output
  std::map<std::string, double> setpoints;        // this PLC's copy of markers and setpoints
  std::map<std::string, double> memory;
  std::map<std::string, Position> last_commands;

  /// Ticks since the register was last written, or nullopt if never written.
  std::optional<Tick> staleness(const std::string& tag, Tick now) const;
};

/// Evaluation context over a PLC register file with program patches applied.
class PlcContext : public EvalContext {
 public:
  explicit PlcContext(const PlcState& plc) : plc_(plc) {}
  std::optional<double> tag(std::string_view name) const override;
  std::optional<double> setpoint(std::string_view name) const override;
  std::optional<double> memory(std::string_view name) const override;

 private:
  const PlcState& plc_;
};

PlcState make_plc(int id, const std::map<std::string, double>& setpoints, const PlantState& initial);

/// Writes a delivered value into a register, then re-applies any input patch.
void receive(PlcState& plc, const std::string& tag, double value, Tick tick);

/// Overwrites registers of patched sensor tags with their pinned constants.
void apply_input_patches(PlcState& plc);

/// One scan. Auto: rule-derived commands (holding the last command where no
/// rule fires). Manual: last commands overlaid with the manual overrides.
/// Output patches pin actuator commands in either mode. Returns a command for
/// every actuator the PLC owns.
Commands plc_scan(PlcState& plc, const std::vector<ControlRule>& rules);

/// Switches mode. Manual installs `overrides`; Auto clears them. Throws Error
/// when an override names a tag outside the PLC's stage.
void set_mode(PlcState& plc, PlcMode mode, const std::map<std::string, Position>& overrides = {});

/// Level-1 read request from one PLC for a tag owned by another.
struct RemoteRead {
  int from = 0;
  int owner = 0;
  std::string tag;
};

/// Throws Error if the tag is owned by the requesting PLC.
RemoteRead request_remote_tag(int from, const std::string& tag);

/// Tags outside the PLC's own stage that its rules reference.
std::vector<std::string> remote_tags_for(int plc, const std::vector<ControlRule>& rules);

}  // namespace swatsim
