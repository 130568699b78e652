#include "swatsim/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

#include "swatsim/simulation.hpp"

namespace swatsim {

std::string default_profile(int year) { return year == 2016 ? "v2016" : "v2017"; }

namespace {

const char* verdict(bool d) { return d ? "D" : "ND"; }

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

RunResult run_scenario(const AttackScenario& scenario, const Config& config, const RunOptions& options) {
  RunResult r;
  r.id = scenario.id;
  r.year = scenario.year;
  r.row = scenario.row;
  r.category = scenario.category;
  r.profile = options.profile.empty() ? default_profile(scenario.year) : options.profile;
  r.expected_wd = scenario.expected_wd;
  r.expected_wdh = scenario.expected_wdh;
  int margin = options.settle_margin.value_or(config.detection.settle_margin);
  if (margin < 0) throw Error("settle margin must not be negative");
  r.window_start = scenario.first_start();
  r.window_end = scenario.last_end() + margin;
  r.ticks = r.window_end + 1;

  Simulation sim(config, r.profile, options.seed);
  sim.schedule(scenario);
  for (const auto& [tank, level] : sim.truth().level) r.min_level[tank] = r.max_level[tank] = level;
  while (sim.now() < r.ticks) {
    sim.step();
    for (const auto& [tank, level] : sim.truth().level) {
      r.min_level[tank] = std::min(r.min_level[tank], level);
      r.max_level[tank] = std::max(r.max_level[tank], level);
    }
    for (const auto& [pump, n] : sim.truth().pump_dry_ticks)
      if (n > 0) ++r.dry_run_ticks;
  }

  r.alarms = sim.alarms();
  r.wd_skipped = sim.skipped(Placement::InPlc);
  r.wdh_skipped = sim.skipped(Placement::Historian);
  for (const auto& a : r.alarms) {
    if (a.tick < r.window_start) {
      ++r.pre_attack_alarms;
      continue;
    }
    if (a.tick > r.window_end) continue;
    auto& first = a.placement == "WD" ? r.first_wd : r.first_wdh;
    if (!first) first = a.tick;
  }
  r.wd = r.first_wd.has_value();
  r.wdh = r.first_wdh.has_value();

  if (r.expected_wd && *r.expected_wd != r.wd)
    r.deviations.push_back(std::string("WD ") + verdict(r.wd) + ", expected " + verdict(*r.expected_wd));
  if (r.expected_wdh && *r.expected_wdh != r.wdh)
    r.deviations.push_back(std::string("WDH ") + verdict(r.wdh) + ", expected " + verdict(*r.expected_wdh));
  if (r.pre_attack_alarms > 0)
    r.deviations.push_back(std::to_string(r.pre_attack_alarms) + " alarms before the attack started");
  return r;
}

std::string percent(int part, int whole) {
  if (whole == 0) return "-";
  return fmt(100.0 * part / whole, 2);
}

MatrixReport run_catalog(int year, const Config& config, const RunOptions& options, const std::string& catalog_dir) {
  MatrixReport m;
  m.year = year;
  m.profile = options.profile.empty() ? default_profile(year) : options.profile;
  for (const auto& s : load_catalog(year, catalog_dir)) {
    RunResult r = run_scenario(s, config, options);
    ++m.total;
    m.wd += r.wd;
    m.wdh += r.wdh;
    m.deviations += static_cast<int>(r.deviations.size());
    auto it = std::find_if(m.categories.begin(), m.categories.end(),
                           [&](const CategoryRate& c) { return c.category == r.category; });
    if (it == m.categories.end()) it = m.categories.insert(m.categories.end(), CategoryRate{r.category});
    ++it->total;
    it->wd += r.wd;
    it->wdh += r.wdh;
    m.runs.push_back(std::move(r));
  }
  return m;
}

void write_text(std::ostream& out, const MatrixReport& m) {
  out << "catalog " << m.year << " (profile " << m.profile << ")\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-10s %-18s %-4s %-4s %-8s %-8s %s\n", "row", "id", "category", "WD", "WDH",
                "first_wd", "first_wdh", "status");
  out << line;
  for (const auto& r : m.runs) {
    std::string status = r.deviations.empty() ? "ok" : "DEVIATION:";
    for (const auto& d : r.deviations) status += " " + d + ";";
    std::snprintf(line, sizeof line, "%-4d %-10s %-18s %-4s %-4s %-8s %-8s ", r.row, r.id.c_str(), r.category.c_str(),
                  verdict(r.wd), verdict(r.wdh), r.first_wd ? std::to_string(*r.first_wd).c_str() : "-",
                  r.first_wdh ? std::to_string(*r.first_wdh).c_str() : "-");
    out << line << status << '\n';
  }
  out << "\ncategory            total  WD%     WDH%\n";
  for (const auto& c : m.categories) {
    std::snprintf(line, sizeof line, "%-18s  %5d  %-6s  %-6s\n", c.category.c_str(), c.total,
                  percent(c.wd, c.total).c_str(), percent(c.wdh, c.total).c_str());
    out << line;
  }
  out << "\ntotal " << m.total << ": WD " << m.wd << " (" << percent(m.wd, m.total) << "%), WDH " << m.wdh << " ("
      << percent(m.wdh, m.total) << "%)\n";
  out << "deviations: " << m.deviations << '\n';
}

void write_csv(std::ostream& out, const MatrixReport& m) {
  out << "year,row,id,category,profile,wd,wdh,expected_wd,expected_wdh,first_wd,first_wdh,pre_attack_alarms,"
         "wd_skipped,wdh_skipped,deviation\n";
  auto exp = [](const std::optional<bool>& e) { return e ? std::string(verdict(*e)) : std::string(); };
  auto tick = [](const std::optional<Tick>& t) { return t ? std::to_string(*t) : std::string(); };
  for (const auto& r : m.runs) {
    std::string dev;
    for (const auto& d : r.deviations) dev += (dev.empty() ? "" : "; ") + d;
    out << r.year << ',' << r.row << ',' << r.id << ',' << r.category << ',' << r.profile << ',' << verdict(r.wd)
        << ',' << verdict(r.wdh) << ',' << exp(r.expected_wd) << ',' << exp(r.expected_wdh) << ',' << tick(r.first_wd)
        << ',' << tick(r.first_wdh) << ',' << r.pre_attack_alarms << ',' << r.wd_skipped << ',' << r.wdh_skipped
        << ',' << dev << '\n';
  }
  for (const auto& c : m.categories)
    out << m.year << ",,category:" << c.category << ",,," << percent(c.wd, c.total) << ','
        << percent(c.wdh, c.total) << ",,,,,,,," << '\n';
  out << m.year << ",,total,,," << percent(m.wd, m.total) << ',' << percent(m.wdh, m.total) << ",,,,,,,,"
      << m.deviations << '\n';
}

void write_text(std::ostream& out, const RunResult& r) {
  out << "scenario " << r.id << " (profile " << r.profile << ")\n";
  out << "window " << r.window_start << ".." << r.window_end << '\n';
  out << "WD  " << verdict(r.wd);
  if (r.first_wd) out << " first alarm at " << *r.first_wd;
  if (r.expected_wd) out << " (expected " << verdict(*r.expected_wd) << ")";
  out << "\nWDH " << verdict(r.wdh);
  if (r.first_wdh) out << " first alarm at " << *r.first_wdh;
  if (r.expected_wdh) out << " (expected " << verdict(*r.expected_wdh) << ")";
  out << "\nalarms " << r.alarms.size() << ", skipped evaluations WD " << r.wd_skipped << " WDH " << r.wdh_skipped
      << '\n';
  out << "trace:";
  for (const auto& [tank, lo] : r.min_level) out << ' ' << tank << " [" << fmt(lo, 1) << ", " << fmt(r.max_level.at(tank), 1) << "]";
  out << ", pump dry-run ticks " << r.dry_run_ticks << '\n';
  for (const auto& d : r.deviations) out << "DEVIATION: " << d << '\n';
}

void write_alarms_csv(std::ostream& out, const std::vector<Alarm>& alarms) {
  out << "tick,placement,invariant_id,detail\n";
  for (const auto& a : alarms) {
    std::string detail = a.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    out << a.tick << ',' << a.placement << ',' << a.invariant_id << ',' << detail << '\n';
  }
}

namespace {

void check_convergent(const PlantState& s, const StageTopology& topo) {
  for (const auto& [tank, level] : s.level) {
    const TankSpec& spec = topo.tank(tank);
    if (level <= 0.0 || level >= spec.capacity)
      throw Error("non-convergent plant: tank " + tank + " reached " + fmt(level, 1) + " mm at tick " +
                  std::to_string(s.tick) + " under nominal rules");
  }
}

}  // namespace

CalibrationReport calibrate(Config& config, std::uint64_t seed, const std::string& profile) {
  CalibrationReport rep;
  rep.ticks = config.detection.calibration_ticks;

  Config probe = config;
  for (auto& sa : probe.sa_invariants) sa.epsilon = std::numeric_limits<double>::infinity();
  Simulation sim(probe, profile, seed);
  for (const auto& sa : probe.sa_invariants) rep.max_window_mean[sa.tank] = 0.0;
  auto harvest = [&](const Detector& d) {
    for (std::size_t i = 0; i < d.sa().size(); ++i)
      if (d.sa_states()[i].window_complete)
        rep.max_window_mean[d.sa()[i].tank] = std::max(rep.max_window_mean[d.sa()[i].tank], d.sa_states()[i].last_mean);
  };
  while (sim.now() < rep.ticks) {
    sim.step();
    check_convergent(sim.truth(), probe.topology);
    for (const auto& d : sim.wd_detectors()) harvest(d);
    harvest(sim.wdh_detector());
  }
  rep.sd_alarms = static_cast<long>(sim.alarms().size());

  for (const auto& [tank, worst] : rep.max_window_mean) {
    double eps = std::max(config.detection.calibration_factor * worst, config.detection.epsilon_floor);
    rep.epsilon[tank] = eps;
    config.detection.epsilon[tank] = eps;
  }
  for (auto& sa : config.sa_invariants) sa.epsilon = config.epsilon_for(sa.tank);

  rep.alarms_after = static_cast<long>(nominal_alarms(config, rep.ticks, seed, profile).size());
  return rep;
}

void write_text(std::ostream& out, const CalibrationReport& r) {
  out << "calibration over " << r.ticks << " nominal ticks\n";
  out << "tank   max_window_mean  epsilon\n";
  char line[128];
  for (const auto& [tank, worst] : r.max_window_mean) {
    std::snprintf(line, sizeof line, "%-6s %15.4f  %7.4f\n", tank.c_str(), worst, r.epsilon.at(tank));
    out << line;
  }
  out << "state-dependent alarms while measuring: " << r.sd_alarms << '\n';
  out << "alarms with tuned epsilon: " << r.alarms_after << '\n';
}

std::vector<Alarm> nominal_alarms(const Config& config, Tick ticks, std::uint64_t seed, const std::string& profile) {
  Simulation sim(config, profile, seed);
  sim.run_until(ticks);
  return sim.alarms();
}

std::vector<Alarm> replay_historian(const HistorianStore& store, const Config& config, const std::string& profile,
                                    long* skipped) {
  InvariantSet set = load_invariant_set(config.sd_invariants, config.sa_invariants, profile);
  Detector det(Placement::Historian, set, std::nullopt, config.setpoints);
  std::vector<Alarm> out;
  for (Tick t : store.ticks())
    for (auto& a : det.evaluate(store.row(t), t)) out.push_back(std::move(a));
  if (skipped) *skipped = det.skipped();
  return out;
}

HistorianStore export_historian(const Config& config, Tick ticks, std::uint64_t seed, const std::string& profile,
                                const AttackScenario* scenario) {
  Simulation sim(config, profile, seed);
  if (scenario) sim.schedule(*scenario);
  sim.run_until(ticks);
  return sim.historian();
}

}  // namespace swatsim
