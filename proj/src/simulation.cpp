#include "swatsim/simulation.hpp"

#include <algorithm>

namespace swatsim {

namespace {

std::string plc_name(int id) { return "PLC" + std::to_string(id); }
std::string rio_name(int id) { return "RIO" + std::to_string(id); }

bool valid_observer(const std::string& o) {
  if (o == "SCADA" || o == "HISTORIAN") return true;
  return o.size() == 4 && o.rfind("PLC", 0) == 0 && o[3] >= '1' && o[3] <= '6';
}

Position decode_command(const std::string& tag, double value) {
  bool valve = TagRegistry::swat().at(tag).kind == TagKind::Valve;
  if (valve) return value >= 0.5 ? Position::Open : Position::Closed;
  return value >= 0.5 ? Position::On : Position::Off;
}

}  // namespace

Simulation::Simulation(Config config, const std::string& invariant_profile, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  truth_ = initial_plant_state(config_.topology);
  InvariantSet set = load_invariant_set(config_.sd_invariants, config_.sa_invariants, invariant_profile);

  int next_id = 0;
  auto add = [&](int level, const std::string& from, const std::string& to) {
    channels_[{from, to}] = std::make_unique<Channel>(next_id++, level, from, to);
  };
  for (int p = 1; p <= 6; ++p) {
    add(0, rio_name(p), plc_name(p));
    add(0, plc_name(p), rio_name(p));
    for (int q = 1; q <= 6; ++q)
      if (q != p) add(1, plc_name(p), plc_name(q));
    add(1, plc_name(p), "SCADA");
    add(1, plc_name(p), "HISTORIAN");
  }

  const auto& reg = TagRegistry::swat();
  for (int p = 1; p <= 6; ++p) {
    plcs_.push_back(make_plc(p, config_.setpoints, truth_));
    wd_.emplace_back(Placement::InPlc, set, p, config_.setpoints);
    auto tags = remote_tags_for(p, config_.rules);
    for (const auto& t : wd_.back().tags())
      if (reg.at(t).stage != p && std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
    remote_tags_.push_back(std::move(tags));
  }
  wdh_ = std::make_unique<Detector>(Placement::Historian, set, std::nullopt, config_.setpoints);
}

Channel& Simulation::channel(const std::string& from, const std::string& to) {
  auto it = channels_.find({from, to});
  if (it == channels_.end()) throw Error("no channel " + from + "->" + to);
  return *it->second;
}

std::vector<Channel*> Simulation::channels_into(const std::string& observer) {
  std::vector<Channel*> out;
  for (auto& [key, ch] : channels_)
    if (key.second == observer) out.push_back(ch.get());
  return out;
}

long Simulation::skipped(Placement p) const {
  if (p == Placement::Historian) return wdh_->skipped();
  long n = 0;
  for (const auto& d : wd_) n += d.skipped();
  return n;
}

void Simulation::schedule(const AttackScenario& scenario) {
  if (truth_.tick != 0) throw Error("scenarios must be scheduled before the first tick");
  validate_profile(scenario);

  for (const auto& [tank, level] : scenario.initial_levels) {
    const TankSpec& spec = config_.topology.tank(tank);
    if (level < 0.0 || level > spec.capacity) throw Error("initial level for " + tank + " out of range");
    truth_.level[tank] = level;
  }
  for (const auto& [tag, pos] : scenario.initial_actuators) {
    truth_.actuator[tag] = {pos, 0};
    plcs_.at(static_cast<std::size_t>(TagRegistry::swat().at(tag).stage - 1)).last_commands[tag] = pos;
  }
  compute_flows(truth_, config_.topology);

  for (const auto& p : scenario.timeline) {
    auto label = [&](TamperHook h) {
      h.label = scenario.id + ":" + std::string(to_string(p.kind));
      return h;
    };
    const auto& reg = TagRegistry::swat();
    switch (p.kind) {
      case PrimitiveKind::SensorSpoofConstant: {
        int s = reg.at(p.tag).stage;
        channel(rio_name(s), plc_name(s)).install(label(TamperHook::rewrite(p.tag, p.value, p.start, p.end)));
        break;
      }
      case PrimitiveKind::SensorOffset: {
        int s = reg.at(p.tag).stage;
        channel(rio_name(s), plc_name(s)).install(label(TamperHook::shift(p.tag, p.value, p.start, p.end)));
        break;
      }
      case PrimitiveKind::L0MitmRewrite: {
        int s = reg.at(p.tag).stage;
        bool command = is_actuator(reg.at(p.tag).kind);
        auto& ch = command ? channel(plc_name(s), rio_name(s)) : channel(rio_name(s), plc_name(s));
        ch.install(label(TamperHook::rewrite(p.tag, p.value, p.start, p.end)));
        break;
      }
      case PrimitiveKind::L1MitmRewrite:
        if (!valid_observer(p.observer)) throw Error("unknown observer '" + p.observer + "'");
        channel(plc_name(p.plc), p.observer).install(label(TamperHook::rewrite(p.tag, p.value, p.start, p.end)));
        break;
      case PrimitiveKind::DropTrafficTo:
        if (!valid_observer(p.observer)) throw Error("unknown observer '" + p.observer + "'");
        for (Channel* ch : channels_into(p.observer)) ch->install(label(TamperHook::drop("", p.start, p.end)));
        break;
      case PrimitiveKind::SynFloodPlc:
        for (auto& [key, ch] : channels_)
          if (key.first == plc_name(p.plc) && ch->level() == 1) ch->install(label(TamperHook::drop("", p.start, p.end)));
        break;
      case PrimitiveKind::RioDisconnect:
        for (const auto& t : p.tags)
          channel(rio_name(p.plc), plc_name(p.plc)).install(label(TamperHook::drop(t, p.start, p.end)));
        break;
      case PrimitiveKind::ManualCableDisconnect:
        channel(rio_name(p.plc), plc_name(p.plc)).install(label(TamperHook::disconnect(p.start, p.end)));
        channel(plc_name(p.plc), rio_name(p.plc)).install(label(TamperHook::disconnect(p.start, p.end)));
        break;
      case PrimitiveKind::SetpointChange:
        if (!config_.setpoints.count(p.setpoint)) throw Error("unknown setpoint '" + p.setpoint + "'");
        [[fallthrough]];
      case PrimitiveKind::HistorianTamper:
      case PrimitiveKind::ActuatorOverrideHmi:
      case PrimitiveKind::PlcReprogramPin:
      case PrimitiveKind::DosingOverride:
        timeline_.push_back(p);
        break;
    }
  }
}

void Simulation::arm(Tick k) {
  for (auto& [key, ch] : channels_) ch->expire(k);
  for (const auto& p : timeline_) {
    bool starting = k == p.start;
    bool active = k >= p.start && k <= p.end;
    bool ending = k == p.end + 1;
    PlcState& plc = plcs_.at(static_cast<std::size_t>(std::max(p.plc, 1) - 1));
    switch (p.kind) {
      case PrimitiveKind::ActuatorOverrideHmi:
        if (active) set_mode(plc, PlcMode::Manual, p.overrides_at(k));
        if (ending) set_mode(plc, PlcMode::Auto);
        break;
      case PrimitiveKind::SetpointChange:
        if (starting) plc.setpoints[p.setpoint] = p.value;
        if (ending) plc.setpoints[p.setpoint] = config_.setpoints.at(p.setpoint);
        break;
      case PrimitiveKind::PlcReprogramPin:
      case PrimitiveKind::DosingOverride:
        if (starting) plc.program_patches[p.tag] = p.value;
        if (ending) plc.program_patches.erase(p.tag);
        break;
      default:
        break;
    }
  }
}

void Simulation::uplink(Tick k) {
  const auto& reg = TagRegistry::swat();
  for (int p = 1; p <= 6; ++p) {
    Channel& ch = channel(rio_name(p), plc_name(p));
    PlcState& plc = plcs_[static_cast<std::size_t>(p - 1)];
    for (const auto& tag : reg.stage_tags(p)) {
      double v = is_actuator(reg.at(tag).kind) ? actuator_feedback(truth_, tag)
                                               : read_sensor(truth_, tag, config_.noise, rng_, config_.topology).value;
      if (auto m = deliver(ch, {k, rio_name(p), plc_name(p), tag, v})) receive(plc, m->tag, m->value, k);
    }
    for (const auto& m : ch.release(k)) receive(plc, m.tag, m.value, k);
    apply_input_patches(plc);
  }
}

void Simulation::remote_reads(Tick k) {
  const auto& reg = TagRegistry::swat();
  for (int p = 1; p <= 6; ++p) {
    PlcState& plc = plcs_[static_cast<std::size_t>(p - 1)];
    for (const auto& tag : remote_tags_[static_cast<std::size_t>(p - 1)]) {
      int owner = reg.at(tag).stage;
      const PlcState& src = plcs_[static_cast<std::size_t>(owner - 1)];
      auto it = src.registers.find(tag);
      if (it == src.registers.end() || it->second.received < 0) continue;
      Channel& ch = channel(plc_name(owner), plc_name(p));
      if (auto m = deliver(ch, {k, plc_name(owner), plc_name(p), tag, it->second.value})) receive(plc, tag, m->value, k);
    }
  }
}

void Simulation::level1(Tick k) {
  std::vector<Message> to_scada;
  std::size_t scada_sent = 0;
  for (auto& m : pending_) {
    Channel& ch = channel(m.source, m.destination);
    bool scada = m.destination == "SCADA";
    if (scada) ++scada_sent;
    if (auto d = deliver(ch, m)) {
      if (scada) to_scada.push_back(*d);
      else historian_latest_[d->tag] = d->value;
    }
  }
  for (auto& [key, ch] : channels_) {
    if (ch->level() != 1 || (key.second != "SCADA" && key.second != "HISTORIAN")) continue;
    for (auto& m : ch->release(k)) {
      if (key.second == "SCADA") to_scada.push_back(m);
      else historian_latest_[m.tag] = m.value;
    }
  }
  pending_.clear();

  if (!historian_latest_.empty()) {
    historian_.append(k, historian_latest_);
    for (const auto& p : timeline_)
      if (p.kind == PrimitiveKind::HistorianTamper && k >= p.start && k <= p.end && historian_latest_.count(p.tag))
        historian_.mutate(p.tag, k, p.value);
  }
  scada_.update(k, scada_sent, to_scada);

  const auto& reg = TagRegistry::swat();
  for (int p = 1; p <= 6; ++p) {
    const PlcState& plc = plcs_[static_cast<std::size_t>(p - 1)];
    for (const auto& tag : reg.stage_tags(p)) {
      auto it = plc.registers.find(tag);
      if (it == plc.registers.end() || it->second.received < 0) continue;
      for (const char* dest : {"SCADA", "HISTORIAN"}) pending_.push_back({k + 1, plc_name(p), dest, tag, it->second.value});
    }
  }
}

Commands Simulation::downlink(Tick k, const std::vector<Commands>& commands) {
  Commands out;
  for (int p = 1; p <= 6; ++p) {
    Channel& ch = channel(plc_name(p), rio_name(p));
    for (const auto& [tag, pos] : commands[static_cast<std::size_t>(p - 1)])
      if (auto m = deliver(ch, {k, plc_name(p), rio_name(p), tag, position_code(pos)}))
        out[tag] = decode_command(tag, m->value);
    for (const auto& m : ch.release(k)) out[m.tag] = decode_command(m.tag, m.value);
  }
  return out;
}

void Simulation::step() {
  Tick k = truth_.tick;
  arm(k);
  uplink(k);
  remote_reads(k);

  std::vector<Commands> commands;
  for (auto& plc : plcs_) commands.push_back(plc_scan(plc, config_.rules));

  for (int p = 1; p <= 6; ++p) {
    std::map<std::string, double> values;
    for (const auto& [tag, r] : plcs_[static_cast<std::size_t>(p - 1)].registers)
      if (r.received >= 0) values[tag] = r.value;
    for (auto& a : wd_[static_cast<std::size_t>(p - 1)].evaluate(values, k)) {
      a.detail = plc_name(p) + ": " + a.detail;
      alarms_.push_back(std::move(a));
    }
  }

  level1(k);
  if (historian_.last_tick() == k)
    for (auto& a : wdh_->evaluate(historian_.row(k), k)) alarms_.push_back(std::move(a));

  truth_ = step_plant(truth_, downlink(k, commands), config_.topology);
}

void Simulation::run_until(Tick tick) {
  while (truth_.tick < tick) step();
}

}  // namespace swatsim
