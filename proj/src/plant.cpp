#include "swatsim/plant.hpp"

#include <algorithm>
#include <cmath>

namespace swatsim {

namespace {

bool is(const PlantState& s, const char* tag, Position p) {
  auto it = s.actuator.find(tag);
  return it != s.actuator.end() && it->second.value == p;
}

double level_of(const PlantState& s, const char* tank) {
  auto it = s.level.find(tank);
  return it == s.level.end() ? 0.0 : it->second;
}

double rated(const StageTopology& t, const char* pump) {
  auto it = t.pump_flow.find(pump);
  return it == t.pump_flow.end() ? 0.0 : it->second;
}

double on_flow(const PlantState& s, const StageTopology& t, const char* pump) {
  return is(s, pump, Position::On) ? rated(t, pump) : 0.0;
}

bool above_dead(const PlantState& s, const StageTopology& t, const char* tank) {
  return level_of(s, tank) > t.tank(tank).dead_level;
}

// Source tank of every transfer pump; dosing pumps have none.
const std::map<std::string, std::string>& pump_sources() {
  static const std::map<std::string, std::string> m = {
      {"P101", "T101"}, {"P102", "T101"}, {"P301", "T301"}, {"P302", "T301"},
      {"P501", "T401"}, {"P601", "T601"}, {"P602", "T602"}};
  return m;
}

double move_toward(double value, double target, double step) {
  if (value < target) return std::min(target, value + step);
  return std::max(target, value - step);
}

}  // namespace

const TankSpec& StageTopology::tank(const std::string& id) const {
  auto it = tanks.find(id);
  if (it == tanks.end()) throw Error("unknown tank '" + id + "'");
  return it->second;
}

const TankSpec* StageTopology::tank_for_level_tag(const std::string& tag) const {
  for (const auto& [id, spec] : tanks)
    if (spec.level_tag == tag) return &spec;
  return nullptr;
}

StageTopology StageTopology::swat_defaults() {
  StageTopology t;
  t.tanks["T101"] = {"T101", "LIT101", 0.5, 150.0, 1100.0, 650.0};
  t.tanks["T301"] = {"T301", "LIT301", 0.5, 150.0, 1100.0, 650.0};
  t.tanks["T401"] = {"T401", "LIT401", 0.5, 150.0, 1100.0, 650.0};
  t.tanks["T601"] = {"T601", "LIT601", 1.0, 50.0, 1000.0, 400.0};
  t.tanks["T602"] = {"T602", "LIT602", 1.0, 50.0, 1000.0, 400.0};
  t.pump_flow = {{"P101", 2.0}, {"P102", 2.0}, {"P301", 1.5}, {"P302", 1.5},
                 {"P501", 1.0}, {"P601", 1.0}, {"P602", 1.0}};
  t.dosing["P201"] = {"P201", "AIT202", 8.6, 0.006, ""};
  t.dosing["P203"] = {"P203", "AIT202", 6.0, 0.004, ""};
  t.dosing["P204"] = {"P204", "AIT202", 6.0, 0.004, "P203"};
  t.dosing["P205"] = {"P205", "AIT202", 9.0, 0.008, ""};
  t.dosing["P403"] = {"P403", "AIT503", 6.0, 0.004, ""};
  t.dosing["P404"] = {"P404", "AIT503", 6.0, 0.004, "P403"};
  t.analyzers["AIT202"] = {"AIT202", 7.8, 0.002, 7.3};
  t.analyzers["AIT503"] = {"AIT503", 7.2, 0.002, 7.2};
  t.initial_actuators = {
      {"MV101", Position::Closed}, {"P101", Position::Off},    {"P102", Position::Off},
      {"MV201", Position::Closed}, {"P201", Position::Off},    {"P203", Position::Off},
      {"P204", Position::Off},     {"P205", Position::Off},    {"MV301", Position::Closed},
      {"MV302", Position::Open},   {"MV303", Position::Closed}, {"MV304", Position::Closed},
      {"P301", Position::Off},     {"P302", Position::Off},    {"P403", Position::Off},
      {"P404", Position::Off},     {"P501", Position::On},     {"P601", Position::Off},
      {"P602", Position::Off}};
  return t;
}

PlantState initial_plant_state(const StageTopology& topo) {
  PlantState s;
  for (const auto& [id, spec] : topo.tanks) s.level[id] = spec.initial_level;
  for (const auto& [tag, pos] : topo.initial_actuators) s.actuator[tag] = {pos, 0};
  for (const auto& [tag, a] : topo.analyzers) s.ph[tag] = a.initial;
  s.ph["AIT504"] = s.ph.count("AIT503") ? s.ph["AIT503"] : 7.0;
  s.dp = topo.uf.initial_dp;
  for (const auto& [pump, src] : pump_sources()) s.pump_dry_ticks[pump] = 0;
  compute_flows(s, topo);
  return s;
}

void compute_flows(PlantState& s, const StageTopology& t) {
  s.flow["FIT101"] = is(s, "MV101", Position::Open) ? t.inlet_flow : 0.0;

  double stage1 = on_flow(s, t, "P101") + on_flow(s, t, "P102");
  s.flow["FIT201"] = above_dead(s, t, "T101") && is(s, "MV201", Position::Open) ? stage1 : 0.0;

  double uf_feed = on_flow(s, t, "P301") + on_flow(s, t, "P302");
  bool uf_outlet = is(s, "MV302", Position::Open) || is(s, "MV304", Position::Open);
  s.flow["FIT301"] = above_dead(s, t, "T301") && uf_outlet ? uf_feed : 0.0;

  s.flow["FIT501"] = above_dead(s, t, "T401") ? on_flow(s, t, "P501") : 0.0;

  double backwash = is(s, "MV301", Position::Open) && is(s, "MV303", Position::Open) && above_dead(s, t, "T601")
                        ? t.uf.backwash_flow
                        : 0.0;
  double drain = above_dead(s, t, "T601") ? on_flow(s, t, "P601") : 0.0;
  s.flow["FIT601"] = drain + backwash;
  s.flow["FIT602"] = above_dead(s, t, "T602") ? on_flow(s, t, "P602") : 0.0;
}

std::map<std::string, double> tank_net_flows(const PlantState& s, const StageTopology& t) {
  auto f = [&](const char* tag) {
    auto it = s.flow.find(tag);
    return it == s.flow.end() ? 0.0 : it->second;
  };
  double to_t401 = is(s, "MV302", Position::Open) ? f("FIT301") : 0.0;
  return {
      {"T101", f("FIT101") + f("FIT602") - f("FIT201")},
      {"T301", f("FIT201") - f("FIT301")},
      {"T401", to_t401 - f("FIT501")},
      {"T601", (1.0 - t.permeate_fraction) * f("FIT501") - f("FIT601")},
      {"T602", t.permeate_fraction * f("FIT501") - f("FIT602")},
  };
}

PlantState apply_dosing(const PlantState& state, const std::string& pump, double dt,
                        const StageTopology& topo) {
  auto it = topo.dosing.find(pump);
  if (it == topo.dosing.end()) throw Error("wrong kind: " + pump + " is not a dosing pump");
  PlantState next = state;
  double& ph = next.ph[it->second.analyzer];
  ph = move_toward(ph, it->second.target, it->second.rate * dt);
  if (it->second.analyzer == "AIT503") next.ph["AIT504"] = ph;
  return next;
}

PlantState step_plant(const PlantState& state, const Commands& commands, const StageTopology& topo) {
  const auto& registry = TagRegistry::swat();
  for (const auto& [tag, pos] : commands) {
    const TagInfo* info = registry.find(tag);
    if (!info || !is_actuator(info->kind)) throw Error("rejected command for tag '" + tag + "'");
    bool valve_pos = pos == Position::Open || pos == Position::Closed;
    bool pump_pos = pos == Position::On || pos == Position::Off;
    if ((info->kind == TagKind::Valve && !valve_pos) || (info->kind == TagKind::Pump && !pump_pos))
      throw Error("rejected command for tag '" + tag + "': position " + std::string(to_string(pos)));
  }

  PlantState next = state;
  next.tick = state.tick + 1;

  // Levels integrate the flows in effect during [tick, tick+1).
  for (const auto& [tank, net] : tank_net_flows(state, topo)) {
    const TankSpec& spec = topo.tank(tank);
    next.level[tank] = std::clamp(state.level.at(tank) + spec.alpha * net, 0.0, spec.capacity);
  }

  // Ultrafiltration differential pressure.
  bool uf_running = (is(state, "P301", Position::On) || is(state, "P302", Position::On)) &&
                    above_dead(state, topo, "T301");
  double dp = state.dp;
  if (uf_running)
    dp += is(state, "MV302", Position::Open) ? topo.uf.fouling_rate : topo.uf.blocked_rate;
  if (is(state, "MV301", Position::Open) && is(state, "MV303", Position::Open))
    dp = std::max(topo.uf.baseline_dp, dp - topo.uf.backwash_rate);
  next.dp = std::max(0.0, dp);

  // Chemistry: running dosing pumps drive their analyzer; otherwise it relaxes.
  std::map<std::string, bool> dosed;
  for (const auto& [pump, spec] : topo.dosing) {
    if (!is(state, pump.c_str(), Position::On)) continue;
    if (!spec.backup_of.empty() && is(state, spec.backup_of.c_str(), Position::On)) continue;
    next = apply_dosing(next, pump, 1.0, topo);
    dosed[spec.analyzer] = true;
  }
  for (const auto& [tag, spec] : topo.analyzers)
    if (!dosed[tag]) next.ph[tag] = move_toward(next.ph[tag], spec.nominal, spec.relax_rate);
  if (next.ph.count("AIT503")) next.ph["AIT504"] = next.ph["AIT503"];

  for (const auto& [pump, src] : pump_sources()) {
    bool dry = is(state, pump.c_str(), Position::On) && !above_dead(state, topo, src.c_str());
    next.pump_dry_ticks[pump] = dry ? state.pump_dry_ticks.at(pump) + 1 : 0;
  }

  // Actuators: pumps switch at once, valves travel for valve_transition_ticks.
  for (auto& [tag, act] : next.actuator) {
    auto cmd = commands.find(tag);
    if (cmd != commands.end()) {
      Position want = cmd->second;
      bool valve = registry.at(tag).kind == TagKind::Valve;
      if (!valve) {
        act = {want, 0};
        continue;
      }
      Position settled_target = want;
      Position travel = want == Position::Open ? Position::Opening : Position::Closing;
      bool already = act.value == settled_target || act.value == travel;
      if (!already) act = {travel, topo.valve_transition_ticks};
    }
    if (act.value == Position::Opening || act.value == Position::Closing) {
      if (--act.transition_ticks_remaining <= 0)
        act = {act.value == Position::Opening ? Position::Open : Position::Closed, 0};
    }
  }

  compute_flows(next, topo);
  return next;
}

double actuator_feedback(const PlantState& state, const std::string& tag) {
  auto it = state.actuator.find(tag);
  if (it == state.actuator.end()) throw Error("unknown actuator '" + tag + "'");
  return position_code(it->second.value);
}

Measurement read_sensor(const PlantState& state, const std::string& tag, const NoiseSpec& noise, Rng& rng,
                        const StageTopology& topo) {
  const TagInfo& info = TagRegistry::swat().at(tag);
  if (!is_sensor(info.kind)) throw Error("wrong kind: " + tag + " is a " + std::string(to_string(info.kind)));
  Measurement m;
  double bound = 0.0;
  switch (info.kind) {
    case TagKind::LevelSensor: {
      const TankSpec* spec = topo.tank_for_level_tag(tag);
      if (!spec) throw Error("no tank measured by " + tag);
      m = {state.level.at(spec->tank), "mm"};
      bound = noise.level_mm;
      break;
    }
    case TagKind::FlowSensor:
      m = {state.flow.at(tag), "m3/h"};
      bound = noise.flow;
      break;
    case TagKind::DpSensor:
      m = {state.dp, "bar"};
      bound = noise.dp;
      break;
    case TagKind::Analyzer:
      m = {state.ph.at(tag), "pH"};
      bound = noise.ph;
      break;
    default: break;
  }
  if (noise.enabled && bound > 0.0) m.value += bound * rng.symmetric();
  return m;
}

}  // namespace swatsim
