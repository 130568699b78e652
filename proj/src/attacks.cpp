#include "swatsim/attacks.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace swatsim {

namespace {

constexpr std::array<std::pair<PrimitiveKind, std::string_view>, 13> kKinds{{
    {PrimitiveKind::SensorSpoofConstant, "SensorSpoofConstant"},
    {PrimitiveKind::SensorOffset, "SensorOffset"},
    {PrimitiveKind::L0MitmRewrite, "L0MitmRewrite"},
    {PrimitiveKind::L1MitmRewrite, "L1MitmRewrite"},
    {PrimitiveKind::DropTrafficTo, "DropTrafficTo"},
    {PrimitiveKind::SynFloodPlc, "SynFloodPlc"},
    {PrimitiveKind::HistorianTamper, "HistorianTamper"},
    {PrimitiveKind::RioDisconnect, "RioDisconnect"},
    {PrimitiveKind::ManualCableDisconnect, "ManualCableDisconnect"},
    {PrimitiveKind::ActuatorOverrideHmi, "ActuatorOverrideHmi"},
    {PrimitiveKind::SetpointChange, "SetpointChange"},
    {PrimitiveKind::PlcReprogramPin, "PlcReprogramPin"},
    {PrimitiveKind::DosingOverride, "DosingOverride"},
}};

constexpr std::array<std::pair<Access, std::string_view>, 4> kAccess{{
    {Access::Network, "network"},
    {Access::Panel, "panel"},
    {Access::EngineeringTool, "engineering-tool"},
    {Access::Physical, "physical"},
}};

bool physical_only(PrimitiveKind k) {
  return k == PrimitiveKind::ManualCableDisconnect || k == PrimitiveKind::RioDisconnect;
}

}  // namespace

std::string_view to_string(PrimitiveKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "?";
}

std::optional<PrimitiveKind> parse_primitive_kind(std::string_view s) {
  for (const auto& [kind, name] : kKinds)
    if (name == s) return kind;
  return std::nullopt;
}

std::string_view to_string(Access a) {
  for (const auto& [acc, name] : kAccess)
    if (acc == a) return name;
  return "?";
}

std::optional<Access> parse_access(std::string_view s) {
  for (const auto& [acc, name] : kAccess)
    if (name == s) return acc;
  return std::nullopt;
}

std::string_view to_string(AttackerProfile p) {
  return p == AttackerProfile::Insider ? "insider" : "cyber-criminal";
}

std::optional<AttackerProfile> parse_profile(std::string_view s) {
  if (s == "insider") return AttackerProfile::Insider;
  if (s == "cyber-criminal") return AttackerProfile::CyberCriminal;
  return std::nullopt;
}

std::map<std::string, Position> AttackPrimitive::overrides_at(Tick t) const {
  auto out = overrides;
  if (!alternate_tag.empty() && !alternate_positions.empty()) {
    long slot = (t - start) / std::max(1, alternate_period);
    out[alternate_tag] = alternate_positions[static_cast<std::size_t>(slot) % alternate_positions.size()];
  }
  return out;
}

Tick AttackScenario::first_start() const {
  Tick t = timeline.empty() ? 0 : timeline.front().start;
  for (const auto& p : timeline) t = std::min(t, p.start);
  return t;
}

Tick AttackScenario::last_end() const {
  Tick t = timeline.empty() ? 0 : timeline.front().end;
  for (const auto& p : timeline) t = std::max(t, p.end);
  return t;
}

void validate_profile(const AttackScenario& s) {
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    const auto& p = s.timeline[i];
    std::string who = "scenario " + s.id + " step " + std::to_string(i + 1) + " (" + std::string(to_string(p.kind)) +
                      ", access " + std::string(to_string(p.access)) + ")";
    if (physical_only(p.kind) && p.access != Access::Physical) throw Error(who + ": needs physical access");
    if (s.profile == AttackerProfile::CyberCriminal && p.access != Access::Network)
      throw Error(who + ": not available to a cyber-criminal attacker");
  }
}

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
  T req(const YAML::Node& parent, const char* key) const {
    auto n = parent[key];
    if (!n) fail(parent, std::string("missing '") + key + "'");
    return get<T>(n, key);
  }

  Position position(const YAML::Node& n, const std::string& what) const {
    auto p = parse_position(get<std::string>(n, what));
    if (!p || !is_settled(*p)) fail(n, "bad position for '" + what + "'");
    return *p;
  }

  const TagInfo& tag(const YAML::Node& n, const std::string& name) const {
    const TagInfo* info = TagRegistry::swat().find(name);
    if (!info) fail(n, "unknown tag '" + name + "'");
    return *info;
  }
};

std::optional<bool> parse_verdict(const Ctx& c, const YAML::Node& n) {
  if (!n) return std::nullopt;
  auto s = c.get<std::string>(n, "expected");
  if (s == "D") return true;
  if (s == "ND") return false;
  c.fail(n, "expected verdict must be D or ND");
}

AttackPrimitive parse_primitive(const Ctx& c, const YAML::Node& n) {
  AttackPrimitive p;
  auto kind = parse_primitive_kind(c.req<std::string>(n, "kind"));
  if (!kind) c.fail(n["kind"], "unknown primitive kind");
  p.kind = *kind;
  p.start = c.req<long>(n, "start");
  p.end = c.req<long>(n, "end");
  if (p.start < 1 || p.end < p.start) c.fail(n, "primitive window must satisfy 1 <= start <= end");
  auto access = parse_access(c.req<std::string>(n, "access"));
  if (!access) c.fail(n["access"], "unknown access kind");
  p.access = *access;

  auto need_tag = [&](auto pred, const char* what) {
    p.tag = c.req<std::string>(n, "tag");
    if (!pred(c.tag(n["tag"], p.tag).kind)) c.fail(n["tag"], "'" + p.tag + "' is not " + what);
  };
  auto sensor = [](TagKind k) { return is_sensor(k); };
  auto actuator = [](TagKind k) { return is_actuator(k); };
  auto need_plc = [&] {
    p.plc = c.req<int>(n, "plc");
    if (p.plc < 1 || p.plc > 6) c.fail(n["plc"], "plc must be 1..6");
  };

  switch (p.kind) {
    case PrimitiveKind::SensorSpoofConstant:
      need_tag(sensor, "a sensor");
      p.value = c.req<double>(n, "value");
      break;
    case PrimitiveKind::SensorOffset:
      need_tag(sensor, "a sensor");
      p.value = c.req<double>(n, "offset");
      break;
    case PrimitiveKind::L0MitmRewrite:
    case PrimitiveKind::HistorianTamper:
      need_tag([](TagKind) { return true; }, "a tag");
      if (is_actuator(TagRegistry::swat().at(p.tag).kind) && n["position"])
        p.value = position_code(c.position(n["position"], p.tag));
      else
        p.value = c.req<double>(n, "value");
      break;
    case PrimitiveKind::L1MitmRewrite:
      need_tag([](TagKind) { return true; }, "a tag");
      p.observer = c.req<std::string>(n, "observer");
      p.plc = TagRegistry::swat().at(p.tag).stage;
      if (n["position"])
        p.value = position_code(c.position(n["position"], p.tag));
      else
        p.value = c.req<double>(n, "value");
      break;
    case PrimitiveKind::DropTrafficTo:
      p.observer = c.req<std::string>(n, "observer");
      break;
    case PrimitiveKind::SynFloodPlc:
    case PrimitiveKind::ManualCableDisconnect:
      need_plc();
      break;
    case PrimitiveKind::RioDisconnect:
      p.tags = c.req<std::vector<std::string>>(n, "tags");
      if (p.tags.empty()) c.fail(n["tags"], "no tags");
      for (const auto& t : p.tags)
        if (!is_sensor(c.tag(n["tags"], t).kind)) c.fail(n["tags"], "'" + t + "' is not a sensor");
      p.plc = TagRegistry::swat().at(p.tags.front()).stage;
      for (const auto& t : p.tags)
        if (TagRegistry::swat().at(t).stage != p.plc) c.fail(n["tags"], "tags span several RIOs");
      break;
    case PrimitiveKind::ActuatorOverrideHmi: {
      need_plc();
      if (auto o = n["overrides"]) {
        for (const auto& kv : o) {
          auto tag = c.get<std::string>(kv.first, "override");
          const auto& info = c.tag(kv.first, tag);
          if (!is_actuator(info.kind) || info.stage != p.plc)
            c.fail(kv.first, "'" + tag + "' is not an actuator of PLC" + std::to_string(p.plc));
          p.overrides[tag] = c.position(kv.second, tag);
        }
      }
      if (auto a = n["alternate"]) {
        p.alternate_tag = c.req<std::string>(a, "tag");
        const auto& info = c.tag(a["tag"], p.alternate_tag);
        if (!is_actuator(info.kind) || info.stage != p.plc)
          c.fail(a["tag"], "'" + p.alternate_tag + "' is not an actuator of PLC" + std::to_string(p.plc));
        auto pos = a["positions"];
        if (!pos || pos.size() == 0) c.fail(a, "alternate needs positions");
        for (const auto& e : pos) p.alternate_positions.push_back(c.position(e, p.alternate_tag));
        p.alternate_period = c.req<int>(a, "period");
        if (p.alternate_period < 1) c.fail(a["period"], "period must be positive");
      }
      if (p.overrides.empty() && p.alternate_tag.empty()) c.fail(n, "manual override without actuators");
      break;
    }
    case PrimitiveKind::SetpointChange:
      need_plc();
      p.setpoint = c.req<std::string>(n, "setpoint");
      p.value = c.req<double>(n, "value");
      break;
    case PrimitiveKind::PlcReprogramPin:
      need_tag([](TagKind) { return true; }, "a tag");
      p.plc = TagRegistry::swat().at(p.tag).stage;
      if (is_actuator(TagRegistry::swat().at(p.tag).kind))
        p.value = is_active(c.position(n["position"], p.tag)) ? 1.0 : 0.0;
      else
        p.value = c.req<double>(n, "value");
      break;
    case PrimitiveKind::DosingOverride:
      need_tag(actuator, "an actuator");
      p.plc = TagRegistry::swat().at(p.tag).stage;
      p.value = is_active(c.position(n["position"], p.tag)) ? 1.0 : 0.0;
      break;
  }
  return p;
}

}  // namespace

AttackScenario parse_scenario(const std::string& text, const std::string& source) {
  Ctx c{source};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(source + ": scenario must be a mapping");
  AttackScenario s;
  s.id = c.req<std::string>(root, "id");
  s.year = c.req<int>(root, "year");
  s.row = c.req<int>(root, "row");
  auto prof = parse_profile(c.req<std::string>(root, "profile"));
  if (!prof) c.fail(root["profile"], "profile must be insider or cyber-criminal");
  s.profile = *prof;
  if (auto n = root["target"]) s.target = c.get<std::string>(n, "target");
  if (auto n = root["category"]) s.category = c.get<std::string>(n, "category");
  if (auto n = root["notes"]) s.notes = c.get<std::string>(n, "notes");
  if (auto e = root["expected"]) {
    s.expected_wd = parse_verdict(c, e["wd"]);
    s.expected_wdh = parse_verdict(c, e["wdh"]);
  }
  if (auto init = root["initial"]) {
    if (auto lv = init["levels"])
      for (const auto& kv : lv) s.initial_levels[c.get<std::string>(kv.first, "tank")] = c.get<double>(kv.second, "level");
    if (auto act = init["actuators"])
      for (const auto& kv : act) {
        auto tag = c.get<std::string>(kv.first, "actuator");
        if (!is_actuator(c.tag(kv.first, tag).kind)) c.fail(kv.first, "'" + tag + "' is not an actuator");
        s.initial_actuators[tag] = c.position(kv.second, tag);
      }
  }
  auto tl = root["timeline"];
  if (!tl || !tl.IsSequence() || tl.size() == 0) c.fail(root, "timeline must be a non-empty list");
  for (const auto& n : tl) s.timeline.push_back(parse_primitive(c, n));
  return s;
}

AttackScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::vector<AttackScenario> load_catalog(int year, const std::string& dir) {
  std::string index = dir + "/index.yaml";
  YAML::Node root;
  try {
    root = YAML::LoadFile(index);
  } catch (const YAML::Exception& e) {
    throw Error("cannot read catalog index '" + index + "': " + e.what());
  }
  auto list = root[std::to_string(year)];
  if (!list) throw Error("catalog index has no entry for year " + std::to_string(year));
  std::vector<AttackScenario> out;
  for (const auto& f : list) {
    auto s = load_scenario(dir + "/" + f.as<std::string>());
    if (s.year != year) throw Error("scenario " + s.id + " listed under " + std::to_string(year));
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.row < b.row; });
  return out;
}

}  // namespace swatsim
