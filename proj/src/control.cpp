#include "swatsim/control.hpp"

#include <algorithm>

namespace swatsim {

std::optional<Tick> PlcState::staleness(const std::string& tag, Tick now) const {
  auto it = registers.find(tag);
  if (it == registers.end() || it->second.received < 0) return std::nullopt;
  return now - it->second.received;
}

std::optional<double> PlcContext::tag(std::string_view name) const {
  std::string key(name);
  if (auto p = plc_.program_patches.find(key); p != plc_.program_patches.end()) return p->second;
  auto it = plc_.registers.find(key);
  if (it == plc_.registers.end()) return std::nullopt;
  return it->second.value;
}

std::optional<double> PlcContext::setpoint(std::string_view name) const {
  auto it = plc_.setpoints.find(std::string(name));
  if (it == plc_.setpoints.end()) return std::nullopt;
  return it->second;
}

std::optional<double> PlcContext::memory(std::string_view name) const {
  auto it = plc_.memory.find(std::string(name));
  return it == plc_.memory.end() ? 0.0 : it->second;
}

PlcState make_plc(int id, const std::map<std::string, double>& setpoints, const PlantState& initial) {
  PlcState plc;
  plc.id = id;
  plc.setpoints = setpoints;
  const auto& reg = TagRegistry::swat();
  for (const auto& t : reg.all()) {
    if (t.stage != id || !is_actuator(t.kind)) continue;
    auto it = initial.actuator.find(t.name);
    Position p = it != initial.actuator.end() ? it->second.value
                                              : (t.kind == TagKind::Valve ? Position::Closed : Position::Off);
    if (p == Position::Opening) p = Position::Open;
    if (p == Position::Closing) p = Position::Closed;
    plc.last_commands[t.name] = p;
  }
  return plc;
}

void receive(PlcState& plc, const std::string& tag, double value, Tick tick) {
  plc.registers[tag] = {value, tick};
  if (auto p = plc.program_patches.find(tag); p != plc.program_patches.end()) plc.registers[tag].value = p->second;
}

void apply_input_patches(PlcState& plc) {
  const auto& reg = TagRegistry::swat();
  for (const auto& [tag, value] : plc.program_patches) {
    const TagInfo* info = reg.find(tag);
    if (info && is_sensor(info->kind)) plc.registers[tag].value = value;
  }
}

namespace {

std::vector<const ControlRule*> rules_of(int plc, const std::vector<ControlRule>& rules) {
  std::vector<const ControlRule*> out;
  for (const auto& r : rules)
    if (r.plc == plc) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(),
                   [](const ControlRule* a, const ControlRule* b) { return a->priority > b->priority; });
  return out;
}

Position output_patch(const std::string& tag, double value) {
  bool valve = TagRegistry::swat().at(tag).kind == TagKind::Valve;
  if (valve) return value != 0.0 ? Position::Open : Position::Closed;
  return value != 0.0 ? Position::On : Position::Off;
}

}  // namespace

Commands plc_scan(PlcState& plc, const std::vector<ControlRule>& rules) {
  apply_input_patches(plc);
  Commands out = plc.last_commands;

  if (plc.mode == PlcMode::Auto) {
    auto mine = rules_of(plc.id, rules);
    // Memory bits first so actuator rules see this scan's latch values.
    std::map<std::string, bool> decided;
    for (const ControlRule* r : mine) {
      if (!r->sets_memory() || decided[r->target]) continue;
      PlcContext ctx(plc);
      if (r->guard.test(ctx).value_or(false)) {
        plc.memory[r->target] = r->memory_value;
        decided[r->target] = true;
      }
    }
    PlcContext ctx(plc);
    for (const ControlRule* r : mine) {
      if (r->sets_memory() || decided[r->target]) continue;
      if (r->guard.test(ctx).value_or(false)) {
        out[r->target] = *r->position;
        decided[r->target] = true;
      }
    }
  } else {
    for (const auto& [tag, pos] : plc.manual_overrides) out[tag] = pos;
  }

  const auto& reg = TagRegistry::swat();
  for (const auto& [tag, value] : plc.program_patches) {
    const TagInfo* info = reg.find(tag);
    if (info && is_actuator(info->kind) && out.count(tag)) out[tag] = output_patch(tag, value);
  }
  plc.last_commands = out;
  return out;
}

void set_mode(PlcState& plc, PlcMode mode, const std::map<std::string, Position>& overrides) {
  const auto& reg = TagRegistry::swat();
  for (const auto& [tag, pos] : overrides) {
    const TagInfo& info = reg.at(tag);
    if (info.stage != plc.id || !is_actuator(info.kind))
      throw Error("override for " + tag + " rejected: not an actuator of PLC" + std::to_string(plc.id));
  }
  plc.mode = mode;
  if (mode == PlcMode::Auto) {
    plc.manual_overrides.clear();
  } else {
    plc.manual_overrides = overrides;
  }
}

RemoteRead request_remote_tag(int from, const std::string& tag) {
  const TagInfo& info = TagRegistry::swat().at(tag);
  if (info.stage == from) throw Error(tag + " is owned by PLC" + std::to_string(from) + "; no remote read needed");
  return {from, info.stage, tag};
}

std::vector<std::string> remote_tags_for(int plc, const std::vector<ControlRule>& rules) {
  const auto& reg = TagRegistry::swat();
  std::vector<std::string> out;
  for (const auto& r : rules) {
    if (r.plc != plc) continue;
    for (const auto& t : r.guard.tags())
      if (reg.at(t).stage != plc && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

}  // namespace swatsim
