#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "swatsim/attacks.hpp"
#include "swatsim/config.hpp"
#include "swatsim/control.hpp"
#include "swatsim/detectors.hpp"
#include "swatsim/network.hpp"
#include "swatsim/plant.hpp"

namespace swatsim {

/// Plant, six PLCs, both networks and both detector placements, advanced
/// one tick at a time.
///
/// Per tick k: attacks arm/disarm; each RIO reports its stage to its PLC;
/// PLCs exchange remote reads; PLCs scan; in-controller detectors evaluate
/// the registers; messages queued at k-1 reach SCADA and the historian, which
/// records row k; the historian detector evaluates row k; commands travel to
/// the RIOs; the plant steps to k+1.
class Simulation {
 public:
  Simulation(Config config, const std::string& invariant_profile, std::uint64_t seed);

  /// Validates the scenario, applies its initial-state overrides and arms its
  /// timeline. Must be called before the first step.
  void schedule(const AttackScenario& scenario);

  void step();
  /// Steps until now() == tick.
  void run_until(Tick tick);

  Tick now() const { return truth_.tick; }
  const PlantState& truth() const { return truth_; }
  const PlcState& plc(int id) const { return plcs_.at(static_cast<std::size_t>(id - 1)); }
  const HistorianStore& historian() const { return historian_; }
  const ScadaView& scada() const { return scada_; }
  const std::vector<Alarm>& alarms() const { return alarms_; }
  const Config& config() const { return config_; }
  long skipped(Placement p) const;
  const std::vector<Detector>& wd_detectors() const { return wd_; }
  const Detector& wdh_detector() const { return *wdh_; }

  /// Throws Error when no such channel exists.
  Channel& channel(const std::string& from, const std::string& to);

 private:
  void arm(Tick k);
  void uplink(Tick k);
  void remote_reads(Tick k);
  void level1(Tick k);
  Commands downlink(Tick k, const std::vector<Commands>& commands);
  std::vector<Channel*> channels_into(const std::string& observer);

  Config config_;
  Rng rng_;
  PlantState truth_;
  std::vector<PlcState> plcs_;
  std::vector<std::vector<std::string>> remote_tags_;
  std::map<std::pair<std::string, std::string>, std::unique_ptr<Channel>> channels_;
  HistorianStore historian_;
  ScadaView scada_;
  std::map<std::string, double> historian_latest_;
  std::vector<Message> pending_;
  std::vector<Detector> wd_;
  std::unique_ptr<Detector> wdh_;
  std::vector<Alarm> alarms_;
  std::vector<AttackPrimitive> timeline_;
};

}  // namespace swatsim
