#include "swatsim/tag.hpp"

#include <algorithm>

namespace swatsim {

std::string_view to_string(TagKind kind) {
  switch (kind) {
    case TagKind::LevelSensor: return "level-sensor";
    case TagKind::FlowSensor: return "flow-sensor";
    case TagKind::Analyzer: return "analyzer";
    case TagKind::DpSensor: return "dp-sensor";
    case TagKind::Valve: return "valve";
    case TagKind::Pump: return "pump";
  }
  return "?";
}

std::optional<TagKind> kind_from_prefix(std::string_view name) {
  auto starts = [&](std::string_view p) { return name.substr(0, p.size()) == p; };
  // DPIT must be tested before the single-letter P prefix.
  if (starts("DPIT")) return TagKind::DpSensor;
  if (starts("LIT")) return TagKind::LevelSensor;
  if (starts("FIT")) return TagKind::FlowSensor;
  if (starts("AIT")) return TagKind::Analyzer;
  if (starts("MV")) return TagKind::Valve;
  if (starts("P")) return TagKind::Pump;
  return std::nullopt;
}

TagRegistry::TagRegistry(std::vector<TagInfo> tags) : tags_(std::move(tags)) {
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    const auto& t = tags_[i];
    if (kind_from_prefix(t.name) != t.kind)
      throw Error("tag " + t.name + " kind does not match its name prefix");
    if (t.stage < 1 || t.stage > 6) throw Error("tag " + t.name + " has stage out of 1..6");
    for (std::size_t j = 0; j < i; ++j)
      if (tags_[j].name == t.name) throw Error("duplicate tag " + t.name);
  }
}

const TagRegistry& TagRegistry::swat() {
  using K = TagKind;
  static const TagRegistry reg({
      {"LIT101", K::LevelSensor, 1}, {"FIT101", K::FlowSensor, 1}, {"MV101", K::Valve, 1},
      {"P101", K::Pump, 1},          {"P102", K::Pump, 1},

      {"FIT201", K::FlowSensor, 2},  {"AIT202", K::Analyzer, 2},  {"MV201", K::Valve, 2},
      {"P201", K::Pump, 2},          {"P203", K::Pump, 2},        {"P204", K::Pump, 2},
      {"P205", K::Pump, 2},

      {"LIT301", K::LevelSensor, 3}, {"FIT301", K::FlowSensor, 3}, {"DPIT301", K::DpSensor, 3},
      {"MV301", K::Valve, 3},        {"MV302", K::Valve, 3},       {"MV303", K::Valve, 3},
      {"MV304", K::Valve, 3},        {"P301", K::Pump, 3},         {"P302", K::Pump, 3},

      {"LIT401", K::LevelSensor, 4}, {"P403", K::Pump, 4},         {"P404", K::Pump, 4},

      {"FIT501", K::FlowSensor, 5},  {"AIT503", K::Analyzer, 5},  {"AIT504", K::Analyzer, 5},
      {"P501", K::Pump, 5},

      {"LIT601", K::LevelSensor, 6}, {"LIT602", K::LevelSensor, 6}, {"FIT601", K::FlowSensor, 6},
      {"FIT602", K::FlowSensor, 6},  {"P601", K::Pump, 6},          {"P602", K::Pump, 6},
  });
  return reg;
}

const TagInfo* TagRegistry::find(std::string_view name) const {
  auto it = std::find_if(tags_.begin(), tags_.end(), [&](const TagInfo& t) { return t.name == name; });
  return it == tags_.end() ? nullptr : &*it;
}

const TagInfo& TagRegistry::at(std::string_view name) const {
  if (auto* t = find(name)) return *t;
  throw Error("unknown tag '" + std::string(name) + "'");
}

std::vector<std::string> TagRegistry::stage_tags(int stage) const {
  std::vector<std::string> out;
  for (const auto& t : tags_)
    if (t.stage == stage) out.push_back(t.name);
  return out;
}

double position_code(Position p) {
  switch (p) {
    case Position::Off:
    case Position::Closed: return 0.0;
    case Position::On:
    case Position::Open: return 1.0;
    case Position::Opening: return 2.0;
    case Position::Closing: return 3.0;
  }
  return 0.0;
}

std::string_view to_string(Position p) {
  switch (p) {
    case Position::Off: return "Off";
    case Position::On: return "On";
    case Position::Closed: return "Closed";
    case Position::Open: return "Open";
    case Position::Opening: return "Opening";
    case Position::Closing: return "Closing";
  }
  return "?";
}

std::optional<Position> parse_position(std::string_view s) {
  if (s == "Off") return Position::Off;
  if (s == "On") return Position::On;
  if (s == "Closed") return Position::Closed;
  if (s == "Open") return Position::Open;
  if (s == "Opening") return Position::Opening;
  if (s == "Closing") return Position::Closing;
  return std::nullopt;
}

}  // namespace swatsim
