#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swatsim {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TagKind { LevelSensor, FlowSensor, Analyzer, DpSensor, Valve, Pump };

std::string_view to_string(TagKind kind);

inline bool is_sensor(TagKind k) {
  return k == TagKind::LevelSensor || k == TagKind::FlowSensor || k == TagKind::Analyzer ||
         k == TagKind::DpSensor;
}
inline bool is_actuator(TagKind k) { return k == TagKind::Valve || k == TagKind::Pump; }

struct TagInfo {
  std::string name;
  TagKind kind;
  int stage;  // 1..6; the PLC with the same number owns the tag
};

/// The fixed tag vocabulary of the plant. Lookup is by name.
class TagRegistry {
 public:
  static const TagRegistry& swat();

  const TagInfo* find(std::string_view name) const;
  const TagInfo& at(std::string_view name) const;  // throws Error naming the tag
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::vector<TagInfo>& all() const { return tags_; }
  std::vector<std::string> stage_tags(int stage) const;

  explicit TagRegistry(std::vector<TagInfo> tags);

 private:
  std::vector<TagInfo> tags_;
};

/// Kind implied by a tag-name prefix, or nullopt for an unrecognised prefix.
std::optional<TagKind> kind_from_prefix(std::string_view name);

/// Actuator positions. Registers carry them as numeric codes
/// (Off/Closed = 0, On/Open = 1, Opening = 2, Closing = 3).
enum class Position { Off, On, Closed, Open, Opening, Closing };

double position_code(Position p);
std::string_view to_string(Position p);
std::optional<Position> parse_position(std::string_view s);

inline bool is_settled(Position p) { return p != Position::Opening && p != Position::Closing; }
inline bool is_active(Position p) { return p == Position::On || p == Position::Open; }

struct ActuatorPosition {
  Position value = Position::Off;
  int transition_ticks_remaining = 0;

  bool operator==(const ActuatorPosition&) const = default;
};

using Tick = long;

}  // namespace swatsim
