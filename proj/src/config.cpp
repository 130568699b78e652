#include "swatsim/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#ifndef SWATSIM_DATA_DIR
#define SWATSIM_DATA_DIR "data"
#endif

namespace swatsim {

double Config::epsilon_for(const std::string& tank) const {
  auto it = detection.epsilon.find(tank);
  double e = it == detection.epsilon.end() ? detection.epsilon_floor : it->second;
  return std::max(e, detection.epsilon_floor);
}

std::string data_dir() { return SWATSIM_DATA_DIR; }
std::string default_config_path() { return data_dir() + "/config/swat.yaml"; }

namespace {

struct Ctx {
  std::string source;

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    std::string where = source;
    if (n.IsDefined() && n.Mark().line >= 0) where += ":" + std::to_string(n.Mark().line + 1);
    throw Error(where + ": " + msg);
  }

  template <class T>
  T get(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "bad value for '" + what + "'");
    }
  }

  template <class T>
  void opt(const YAML::Node& parent, const char* key, T& out) const {
    if (auto n = parent[key]) out = get<T>(n, key);
  }

  template <class T>
  T req(const YAML::Node& parent, const char* key) const {
    auto n = parent[key];
    if (!n) fail(parent, std::string("missing '") + key + "'");
    return get<T>(n, key);
  }

  Expr expr(const YAML::Node& parent, const char* key) const {
    auto n = parent[key];
    if (!n) fail(parent, std::string("missing '") + key + "'");
    try {
      return Expr::parse(get<std::string>(n, key));
    } catch (const ExprParseError& e) {
      fail(n, std::string("in '") + key + "': " + e.what());
    }
  }
};

void parse_plant(const Ctx& c, const YAML::Node& p, StageTopology& t) {
  c.opt(p, "inlet_flow", t.inlet_flow);
  c.opt(p, "permeate_fraction", t.permeate_fraction);
  c.opt(p, "valve_transition_ticks", t.valve_transition_ticks);
  if (auto tanks = p["tanks"]) {
    for (const auto& kv : tanks) {
      auto id = c.get<std::string>(kv.first, "tank");
      TankSpec& s = t.tanks[id];
      s.tank = id;
      c.opt(kv.second, "level_tag", s.level_tag);
      c.opt(kv.second, "alpha", s.alpha);
      c.opt(kv.second, "dead_level", s.dead_level);
      c.opt(kv.second, "capacity", s.capacity);
      c.opt(kv.second, "initial_level", s.initial_level);
      if (!TagRegistry::swat().contains(s.level_tag)) c.fail(kv.second, "tank " + id + " has unknown level tag");
    }
  }
  if (auto pumps = p["pump_flow"])
    for (const auto& kv : pumps) t.pump_flow[c.get<std::string>(kv.first, "pump")] = c.get<double>(kv.second, "pump_flow");
  if (auto uf = p["uf"]) {
    c.opt(uf, "fouling_rate", t.uf.fouling_rate);
    c.opt(uf, "blocked_rate", t.uf.blocked_rate);
    c.opt(uf, "backwash_rate", t.uf.backwash_rate);
    c.opt(uf, "baseline_dp", t.uf.baseline_dp);
    c.opt(uf, "initial_dp", t.uf.initial_dp);
    c.opt(uf, "backwash_flow", t.uf.backwash_flow);
  }
  if (auto dosing = p["dosing"]) {
    for (const auto& kv : dosing) {
      auto pump = c.get<std::string>(kv.first, "pump");
      DosingSpec& d = t.dosing[pump];
      d.pump = pump;
      c.opt(kv.second, "analyzer", d.analyzer);
      c.opt(kv.second, "target", d.target);
      c.opt(kv.second, "rate", d.rate);
      c.opt(kv.second, "backup_of", d.backup_of);
    }
  }
  if (auto an = p["analyzers"]) {
    for (const auto& kv : an) {
      auto tag = c.get<std::string>(kv.first, "analyzer");
      AnalyzerSpec& a = t.analyzers[tag];
      a.tag = tag;
      c.opt(kv.second, "nominal", a.nominal);
      c.opt(kv.second, "relax_rate", a.relax_rate);
      c.opt(kv.second, "initial", a.initial);
    }
  }
  if (auto init = p["initial_actuators"]) {
    for (const auto& kv : init) {
      auto tag = c.get<std::string>(kv.first, "actuator");
      const TagInfo* info = TagRegistry::swat().find(tag);
      if (!info || !is_actuator(info->kind)) c.fail(kv.first, "'" + tag + "' is not an actuator");
      auto pos = parse_position(c.get<std::string>(kv.second, tag));
      if (!pos) c.fail(kv.second, "bad position for " + tag);
      t.initial_actuators[tag] = *pos;
    }
  }
}

void parse_noise(const Ctx& c, const YAML::Node& n, NoiseSpec& s) {
  c.opt(n, "enabled", s.enabled);
  c.opt(n, "level_mm", s.level_mm);
  c.opt(n, "flow", s.flow);
  c.opt(n, "dp", s.dp);
  c.opt(n, "ph", s.ph);
}

ControlRule parse_rule(const Ctx& c, const YAML::Node& n) {
  const auto& reg = TagRegistry::swat();
  ControlRule r;
  r.id = c.req<std::string>(n, "id");
  r.plc = c.req<int>(n, "plc");
  if (r.plc < 1 || r.plc > 6) c.fail(n, "rule " + r.id + ": plc must be 1..6");
  r.guard = c.expr(n, "when");
  c.opt(n, "priority", r.priority);
  if (auto set = n["set"]) {
    r.target = c.get<std::string>(set, "set");
    const TagInfo* info = reg.find(r.target);
    if (!info || !is_actuator(info->kind) || info->stage != r.plc)
      c.fail(set, "rule " + r.id + ": '" + r.target + "' is not an actuator of PLC" + std::to_string(r.plc));
    auto pos = parse_position(c.req<std::string>(n, "to"));
    if (!pos) c.fail(n["to"], "rule " + r.id + ": bad position");
    r.position = *pos;
  } else if (auto mem = n["memory"]) {
    r.target = c.get<std::string>(mem, "memory");
    if (reg.contains(r.target)) c.fail(mem, "rule " + r.id + ": memory bit may not be named after a tag");
    r.memory_value = c.req<double>(n, "value");
  } else {
    c.fail(n, "rule " + r.id + ": needs 'set' or 'memory'");
  }
  return r;
}

std::vector<std::string> parse_profiles(const Ctx& c, const YAML::Node& n) {
  auto p = n["profiles"];
  if (!p) return known_profiles();
  auto out = c.get<std::vector<std::string>>(p, "profiles");
  for (const auto& s : out)
    if (std::find(known_profiles().begin(), known_profiles().end(), s) == known_profiles().end())
      c.fail(p, "unknown profile '" + s + "'");
  return out;
}

SdInvariant parse_sd(const Ctx& c, const YAML::Node& n) {
  SdInvariant inv;
  inv.id = c.req<std::string>(n, "id");
  inv.owner = c.req<int>(n, "owner");
  inv.guard = c.expr(n, "guard");
  inv.consequent = c.expr(n, "consequent");
  c.opt(n, "grace", inv.grace_ticks);
  inv.profiles = parse_profiles(c, n);
  for (const auto* e : {&inv.guard, &inv.consequent})
    if (!e->memory().empty()) c.fail(n, "invariant " + inv.id + ": unknown identifier '" + e->memory()[0] + "'");
  return inv;
}

std::vector<FlowTerm> parse_terms(const Ctx& c, const YAML::Node& n) {
  std::vector<FlowTerm> out;
  if (!n) return out;
  for (const auto& e : n) {
    FlowTerm f;
    if (e.IsScalar()) {
      f.tag = c.get<std::string>(e, "flow");
    } else {
      f.tag = c.req<std::string>(e, "tag");
      c.opt(e, "weight", f.weight);
    }
    const TagInfo* info = TagRegistry::swat().find(f.tag);
    if (!info || info->kind != TagKind::FlowSensor) c.fail(e, "'" + f.tag + "' is not a flow sensor");
    out.push_back(f);
  }
  return out;
}

SaInvariant parse_sa(const Ctx& c, const YAML::Node& n, const StageTopology& topo) {
  SaInvariant inv;
  inv.id = c.req<std::string>(n, "id");
  inv.owner = c.req<int>(n, "owner");
  inv.tank = c.req<std::string>(n, "tank");
  if (!topo.tanks.count(inv.tank)) c.fail(n, "unknown tank '" + inv.tank + "'");
  const TankSpec& t = topo.tank(inv.tank);
  inv.level_tag = t.level_tag;
  inv.alpha = t.alpha;
  inv.inflows = parse_terms(c, n["in"]);
  inv.outflows = parse_terms(c, n["out"]);
  inv.profiles = parse_profiles(c, n);
  return inv;
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source) {
  Ctx c{source};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  Config cfg;
  if (auto p = root["plant"]) parse_plant(c, p, cfg.topology);
  if (auto n = root["noise"]) parse_noise(c, n, cfg.noise);
  if (auto s = root["setpoints"])
    for (const auto& kv : s) cfg.setpoints[c.get<std::string>(kv.first, "setpoint")] = c.get<double>(kv.second, "setpoint");
  if (auto rules = root["rules"])
    for (const auto& r : rules) cfg.rules.push_back(parse_rule(c, r));
  if (auto d = root["detection"]) {
    c.opt(d, "window", cfg.detection.window);
    c.opt(d, "settle_margin", cfg.detection.settle_margin);
    c.opt(d, "calibration_factor", cfg.detection.calibration_factor);
    c.opt(d, "calibration_ticks", cfg.detection.calibration_ticks);
    c.opt(d, "epsilon_floor", cfg.detection.epsilon_floor);
    if (auto e = d["epsilon"])
      for (const auto& kv : e) cfg.detection.epsilon[c.get<std::string>(kv.first, "tank")] = c.get<double>(kv.second, "epsilon");
    if (cfg.detection.window < 1) c.fail(d, "window must be positive");
  }
  if (auto inv = root["invariants"])
    for (const auto& n : inv) cfg.sd_invariants.push_back(parse_sd(c, n));
  if (auto mb = root["mass_balance"])
    for (const auto& n : mb) {
      SaInvariant s = parse_sa(c, n, cfg.topology);
      s.window = cfg.detection.window;
      s.epsilon = cfg.epsilon_for(s.tank);
      cfg.sa_invariants.push_back(std::move(s));
    }

  auto check_setpoints = [&](const Expr& e, const std::string& who) {
    for (const auto& s : e.setpoints())
      if (!cfg.setpoints.count(s)) throw Error(source + ": " + who + " references undefined setpoint '" + s + "'");
  };
  for (const auto& r : cfg.rules) check_setpoints(r.guard, "rule " + r.id);
  for (const auto& i : cfg.sd_invariants) {
    check_setpoints(i.guard, "invariant " + i.id);
    check_setpoints(i.consequent, "invariant " + i.id);
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace swatsim
