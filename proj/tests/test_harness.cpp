#include <gtest/gtest.h>

#include <sstream>

#include "swatsim/harness.hpp"
#include "swatsim/simulation.hpp"

using namespace swatsim;

namespace {

const Config& cfg() {
  static const Config c = load_config(default_config_path());
  return c;
}

AttackScenario catalog_entry(int year, int row) {
  char name[64];
  std::snprintf(name, sizeof name, "/catalog/%d/%02d.yaml", year, row);
  return load_scenario(data_dir() + name);
}

std::vector<std::pair<Tick, std::string>> keys(const std::vector<Alarm>& alarms, const std::string& placement) {
  std::vector<std::pair<Tick, std::string>> out;
  for (const auto& a : alarms)
    if (a.placement == placement) out.emplace_back(a.tick, a.invariant_id);
  return out;
}

}  // namespace

TEST(Harness, SpoofedLowLevelDetectedInController) {
  RunResult r = run_scenario(catalog_entry(2016, 5), cfg());
  EXPECT_EQ(r.profile, "v2016");
  EXPECT_TRUE(r.wd);
  EXPECT_TRUE(r.deviations.empty());
  ASSERT_TRUE(r.first_wd);
  EXPECT_GE(*r.first_wd, 300);
}

TEST(Harness, Row2016_2NotDetected) {
  RunResult r = run_scenario(catalog_entry(2016, 2), cfg());
  EXPECT_FALSE(r.wd);
  EXPECT_TRUE(r.deviations.empty());
}

TEST(Harness, HistorianOnlyRewriteSplitsPlacements) {
  RunResult r = run_scenario(catalog_entry(2017, 17), cfg());
  EXPECT_FALSE(r.wd);
  EXPECT_TRUE(r.wdh);
  EXPECT_TRUE(r.deviations.empty());
}

TEST(Harness, MismatchReportedAsDeviation) {
  AttackScenario s = catalog_entry(2016, 2);
  s.expected_wd = true;
  RunResult r = run_scenario(s, cfg());
  ASSERT_EQ(r.deviations.size(), 1u);
  EXPECT_NE(r.deviations[0].find("WD"), std::string::npos);
}

TEST(Harness, ReplayEqualsLiveHistorianDetector) {
  AttackScenario s = catalog_entry(2017, 17);
  Simulation sim(cfg(), "v2017", 1);
  sim.schedule(s);
  sim.run_until(s.last_end() + 200);
  std::stringstream csv;
  sim.historian().write_csv(csv);
  HistorianStore back = HistorianStore::read_csv(csv);
  auto replayed = replay_historian(back, cfg(), "v2017");
  EXPECT_FALSE(replayed.empty());
  EXPECT_EQ(keys(replayed, "WDH"), keys(sim.alarms(), "WDH"));
}

TEST(Harness, ExportMatchesSimulation) {
  AttackScenario s = catalog_entry(2017, 17);
  HistorianStore h = export_historian(cfg(), 1200, 1, "v2017", &s);
  Simulation sim(cfg(), "v2017", 1);
  sim.schedule(s);
  sim.run_until(1200);
  EXPECT_EQ(h.series(), sim.historian().series());
}

TEST(Harness, DeletedColumnCountsSkippedEvaluations) {
  HistorianStore h = export_historian(cfg(), 600, 1, "v2017");
  std::stringstream csv;
  h.write_csv(csv);
  std::string text = csv.str(), out;
  std::istringstream lines(text);
  int drop = -1;
  for (std::string line; std::getline(lines, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (drop < 0)
      for (size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == "FIT201") drop = static_cast<int>(i);
    cells.erase(cells.begin() + drop);
    for (size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += '\n';
  }
  std::istringstream in(out);
  std::vector<std::string> missing;
  HistorianStore cut = HistorianStore::read_csv(in, &missing);
  EXPECT_EQ(missing, std::vector<std::string>{"FIT201"});
  long skipped = 0;
  replay_historian(cut, cfg(), "v2017", &skipped);
  EXPECT_GT(skipped, 0);
  long full_skipped = 0;
  replay_historian(h, cfg(), "v2017", &full_skipped);
  EXPECT_EQ(full_skipped, 0);
}

TEST(Harness, ForgedConstantLevelRaisesMassBalanceAlarm) {
  HistorianStore h = export_historian(cfg(), 3000, 1, "v2017");
  for (Tick t : h.ticks()) h.mutate("LIT101", t, 600.0);
  auto alarms = replay_historian(h, cfg(), "v2017");
  bool sa = false;
  for (const auto& a : alarms) sa = sa || a.invariant_id == "SA-T101";
  EXPECT_TRUE(sa);
}

TEST(Harness, NoiselessCalibrationFallsToFloor) {
  Config c = cfg();
  c.noise.enabled = false;
  c.detection.calibration_ticks = 3000;
  CalibrationReport rep = calibrate(c);
  for (const auto& [tank, eps] : rep.epsilon) EXPECT_DOUBLE_EQ(eps, c.detection.epsilon_floor) << tank;
  EXPECT_EQ(rep.alarms_after, 0);
}

TEST(Harness, CalibrationIsFactorTimesWorstMean) {
  Config c = cfg();
  c.detection.calibration_ticks = 3000;
  CalibrationReport rep = calibrate(c);
  for (const auto& [tank, worst] : rep.max_window_mean) {
    EXPECT_GT(worst, 0.0);
    EXPECT_DOUBLE_EQ(rep.epsilon.at(tank), std::max(3.0 * worst, 1.0));
    EXPECT_DOUBLE_EQ(c.epsilon_for(tank), rep.epsilon.at(tank));
  }
}

TEST(Harness, TightEpsilonCountsNominalAlarms) {
  Config c = cfg();
  for (auto& sa : c.sa_invariants) sa.epsilon *= 0.25;
  EXPECT_GT(nominal_alarms(c, 3000, 2, "v2017").size(), 0u);
  EXPECT_TRUE(nominal_alarms(cfg(), 3000, 2, "v2017").empty());
}

TEST(Harness, PercentRounding) {
  EXPECT_EQ(percent(21, 31), "67.74");
  EXPECT_EQ(percent(24, 31), "77.42");
  EXPECT_EQ(percent(0, 0), "-");
}

TEST(Harness, CatalogCsvIsDeterministic) {
  std::ostringstream a, b;
  write_csv(a, run_catalog(2016, cfg()));
  write_csv(b, run_catalog(2016, cfg()));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("year,row,id,", 0), 0u) << a.str().substr(0, 80);
}
