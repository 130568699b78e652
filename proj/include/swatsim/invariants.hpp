#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swatsim/expr.hpp"
#include "swatsim/tag.hpp"

namespace swatsim {

/// What an observer believes each tag's value is, plus the detector's own
/// (design) setpoints.
class DataView : public EvalContext {
 public:
  DataView() = default;
  DataView(std::map<std::string, double> values, const std::map<std::string, double>* setpoints)
      : values_(std::move(values)), setpoints_(setpoints) {}

  std::optional<double> tag(std::string_view name) const override;
  std::optional<double> setpoint(std::string_view name) const override;
  bool has(const std::string& tag) const { return values_.count(tag) > 0; }
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
  const std::map<std::string, double>* setpoints_ = nullptr;
};

/// guard => consequent. The consequent must hold once the guard has held
/// continuously for grace_ticks.
struct SdInvariant {
  std::string id;
  int owner = 0;  // PLC that evaluates it under in-controller placement
  Expr guard;
  Expr consequent;
  int grace_ticks = 0;
  std::vector<std::string> profiles;
};

struct FlowTerm {
  std::string tag;
  double weight = 1.0;
};

/// Windowed mass-balance residual test for one tank.
struct SaInvariant {
  std::string id;
  int owner = 0;
  std::string tank;
  std::string level_tag;
  std::vector<FlowTerm> inflows;
  std::vector<FlowTerm> outflows;
  double alpha = 0.5;
  int window = 30;
  double epsilon = 3.0;
  std::vector<std::string> profiles;

  std::vector<std::string> tags() const;
};

struct SdState {
  long guard_age = -1;  // ticks the guard has held continuously; -1 when false
};

/// Estimator and residual window for an SaInvariant. The window tumbles: when
/// it fills, the estimate is re-synchronised to the measurement.
struct SaState {
  bool primed = false;
  double estimate = 0.0;  // predicted level for the next sample
  std::deque<double> residuals;
  bool window_complete = false;
  double last_mean = 0.0;
};

struct Alarm {
  Tick tick = 0;
  std::string invariant_id;
  std::string placement;
  std::map<std::string, double> snapshot;  // referenced tag values at the alarm
  std::string detail;
};

struct SdOutcome {
  std::optional<Alarm> alarm;
  bool skipped = false;  // a referenced tag was missing from the view
};

SdOutcome eval_sd(const SdInvariant& inv, SdState& state, const DataView& view, Tick tick,
                  const std::string& placement = {});

/// Feeds one sample; returns the mean absolute residual of the current window.
double sa_update(const SaInvariant& inv, SaState& state, double level, double inflow, double outflow);

/// Alarm iff the window just completed and its mean exceeds epsilon.
std::optional<Alarm> eval_sa(const SaInvariant& inv, const SaState& state, Tick tick,
                             const std::string& placement = {});

struct InvariantSet {
  std::string profile;
  std::vector<SdInvariant> sd;
  std::vector<SaInvariant> sa;
};

/// Selects the invariants tagged with `profile`. Throws Error listing the
/// valid profiles when the profile is not recognised.
InvariantSet load_invariant_set(const std::vector<SdInvariant>& sd, const std::vector<SaInvariant>& sa,
                                const std::string& profile);

const std::vector<std::string>& known_profiles();

}  // namespace swatsim
