#include "swatsim/detectors.hpp"

#include <algorithm>

namespace swatsim {

std::string_view to_string(Placement p) { return p == Placement::InPlc ? "WD" : "WDH"; }

Detector::Detector(Placement placement, const InvariantSet& set, std::optional<int> owner,
                   std::map<std::string, double> design_setpoints)
    : placement_(placement), setpoints_(std::move(design_setpoints)) {
  for (const auto& i : set.sd)
    if (!owner || i.owner == *owner) sd_.push_back(i);
  for (const auto& i : set.sa)
    if (!owner || i.owner == *owner) sa_.push_back(i);
  sd_state_.resize(sd_.size());
  sa_state_.resize(sa_.size());
}

std::vector<std::string> Detector::tags() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (const auto& i : sd_) {
    for (const auto& t : i.guard.tags()) add(t);
    for (const auto& t : i.consequent.tags()) add(t);
  }
  for (const auto& i : sa_)
    for (const auto& t : i.tags()) add(t);
  return out;
}

std::vector<Alarm> Detector::evaluate(const std::map<std::string, double>& values, Tick tick) {
  std::vector<Alarm> out;
  DataView view(values, &setpoints_);
  std::string name(to_string(placement_));
  for (std::size_t i = 0; i < sd_.size(); ++i) {
    auto r = eval_sd(sd_[i], sd_state_[i], view, tick, name);
    if (r.skipped) ++skipped_;
    if (r.alarm) out.push_back(std::move(*r.alarm));
  }
  for (std::size_t i = 0; i < sa_.size(); ++i) {
    const auto& inv = sa_[i];
    auto level = view.tag(inv.level_tag);
    bool complete = level.has_value();
    auto sum = [&](const std::vector<FlowTerm>& terms) {
      double s = 0.0;
      for (const auto& f : terms) {
        auto v = view.tag(f.tag);
        if (!v) complete = false;
        else s += f.weight * *v;
      }
      return s;
    };
    double in = sum(inv.inflows);
    double outflow = sum(inv.outflows);
    if (!complete) {
      ++skipped_;
      continue;
    }
    sa_update(inv, sa_state_[i], *level, in, outflow);
    if (auto a = eval_sa(inv, sa_state_[i], tick, name)) {
      for (const auto& t : inv.tags())
        if (auto v = view.tag(t)) a->snapshot[t] = *v;
      out.push_back(std::move(*a));
    }
  }
  return out;
}

bool detected_in(const std::vector<Alarm>& alarms, Placement placement, Tick from, Tick to) {
  std::string name(to_string(placement));
  return std::any_of(alarms.begin(), alarms.end(),
                     [&](const Alarm& a) { return a.placement == name && a.tick >= from && a.tick <= to; });
}

}  // namespace swatsim
