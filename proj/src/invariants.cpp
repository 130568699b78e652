#include "swatsim/invariants.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace swatsim {

std::optional<double> DataView::tag(std::string_view name) const {
  auto it = values_.find(std::string(name));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> DataView::setpoint(std::string_view name) const {
  if (!setpoints_) return std::nullopt;
  auto it = setpoints_->find(std::string(name));
  if (it == setpoints_->end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> SaInvariant::tags() const {
  std::vector<std::string> out{level_tag};
  for (const auto& f : inflows) out.push_back(f.tag);
  for (const auto& f : outflows) out.push_back(f.tag);
  return out;
}

SdOutcome eval_sd(const SdInvariant& inv, SdState& state, const DataView& view, Tick tick,
                  const std::string& placement) {
  SdOutcome out;
  auto guard = inv.guard.test(view);
  if (!guard) {
    out.skipped = true;
    return out;
  }
  if (!*guard) {
    state.guard_age = -1;
    return out;
  }
  ++state.guard_age;
  auto consequent = inv.consequent.test(view);
  if (!consequent) {
    out.skipped = true;
    return out;
  }
  if (state.guard_age >= inv.grace_ticks && !*consequent) {
    Alarm a;
    a.tick = tick;
    a.invariant_id = inv.id;
    a.placement = placement;
    for (const auto* e : {&inv.guard, &inv.consequent})
      for (const auto& t : e->tags())
        if (auto v = view.tag(t)) a.snapshot[t] = *v;
    a.detail = inv.guard.text() + " => " + inv.consequent.text();
    out.alarm = std::move(a);
  }
  return out;
}

double sa_update(const SaInvariant& inv, SaState& state, double level, double inflow, double outflow) {
  if (state.window_complete) {
    state.residuals.clear();
    state.window_complete = false;
  }
  if (!state.primed) {
    state.primed = true;
    state.estimate = level + inv.alpha * (inflow - outflow);
    return 0.0;
  }
  state.residuals.push_back(std::abs(state.estimate - level));
  double mean = std::accumulate(state.residuals.begin(), state.residuals.end(), 0.0) /
                static_cast<double>(state.residuals.size());
  if (static_cast<int>(state.residuals.size()) >= inv.window) {
    state.window_complete = true;
    state.last_mean = mean;
    state.estimate = level;  // re-synchronise at the window boundary
  }
  state.estimate += inv.alpha * (inflow - outflow);
  return mean;
}

std::optional<Alarm> eval_sa(const SaInvariant& inv, const SaState& state, Tick tick, const std::string& placement) {
  if (!state.window_complete || !(state.last_mean > inv.epsilon)) return std::nullopt;
  Alarm a;
  a.tick = tick;
  a.invariant_id = inv.id;
  a.placement = placement;
  char buf[96];
  std::snprintf(buf, sizeof buf, "residual mean %.4f > epsilon %.4f", state.last_mean, inv.epsilon);
  a.detail = buf;
  return a;
}

const std::vector<std::string>& known_profiles() {
  static const std::vector<std::string> p{"v2016", "v2017"};
  return p;
}

InvariantSet load_invariant_set(const std::vector<SdInvariant>& sd, const std::vector<SaInvariant>& sa,
                                const std::string& profile) {
  const auto& known = known_profiles();
  if (std::find(known.begin(), known.end(), profile) == known.end()) {
    std::string msg = "unknown invariant profile '" + profile + "'; valid profiles:";
    for (const auto& k : known) msg += " " + k;
    throw Error(msg);
  }
  auto in = [&](const std::vector<std::string>& ps) { return std::find(ps.begin(), ps.end(), profile) != ps.end(); };
  InvariantSet set;
  set.profile = profile;
  for (const auto& i : sd)
    if (in(i.profiles)) set.sd.push_back(i);
  for (const auto& i : sa)
    if (in(i.profiles)) set.sa.push_back(i);
  return set;
}

}  // namespace swatsim
