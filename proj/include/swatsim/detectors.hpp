#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swatsim/invariants.hpp"

namespace swatsim {

enum class Placement { InPlc, Historian };

/// "WD" for the in-controller placement, "WDH" for the historian placement.
std::string_view to_string(Placement p);

/// One copy of the invariant engine with its own per-invariant state.
/// In-controller instances carry the invariants owned by one PLC; the
/// historian instance carries all of them.
class Detector {
 public:
  Detector(Placement placement, const InvariantSet& set, std::optional<int> owner,
           std::map<std::string, double> design_setpoints);

  /// Evaluates every invariant against `values` for `tick`.
  std::vector<Alarm> evaluate(const std::map<std::string, double>& values, Tick tick);

  Placement placement() const { return placement_; }
  long skipped() const { return skipped_; }
  const std::vector<SdInvariant>& sd() const { return sd_; }
  const std::vector<SaInvariant>& sa() const { return sa_; }
  const std::vector<SaState>& sa_states() const { return sa_state_; }
  /// Tags this detector needs to see.
  std::vector<std::string> tags() const;

 private:
  Placement placement_;
  std::vector<SdInvariant> sd_;
  std::vector<SaInvariant> sa_;
  std::vector<SdState> sd_state_;
  std::vector<SaState> sa_state_;
  std::map<std::string, double> setpoints_;
  long skipped_ = 0;
};

/// Whether any alarm of `placement` falls inside [from, to].
bool detected_in(const std::vector<Alarm>& alarms, Placement placement, Tick from, Tick to);

}  // namespace swatsim
