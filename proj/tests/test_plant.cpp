#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swatsim/plant.hpp"

using namespace swatsim;

namespace {

const StageTopology& topo() {
  static const StageTopology t = StageTopology::swat_defaults();
  return t;
}

bool open(const PlantState& s, const char* tag) { return s.actuator.at(tag).value == Position::Open; }

// Net inflow per tank written out from the process flow path, independent of
// the library's own bookkeeping.
std::map<std::string, double> expected_net(const PlantState& s) {
  const auto& f = s.flow;
  double permeate = topo().permeate_fraction;
  return {
      {"T101", f.at("FIT101") + f.at("FIT602") - f.at("FIT201")},
      {"T301", f.at("FIT201") - f.at("FIT301")},
      {"T401", (open(s, "MV302") ? f.at("FIT301") : 0.0) - f.at("FIT501")},
      {"T601", (1.0 - permeate) * f.at("FIT501") - f.at("FIT601")},
      {"T602", permeate * f.at("FIT501") - f.at("FIT602")},
  };
}

Commands random_commands(std::mt19937_64& rng) {
  Commands c;
  std::bernoulli_distribution coin(0.5);
  for (const char* v : {"MV101", "MV201", "MV301", "MV302", "MV303", "MV304"})
    c[v] = coin(rng) ? Position::Open : Position::Closed;
  for (const char* p : {"P101", "P102", "P201", "P203", "P204", "P205", "P301", "P302", "P403", "P404", "P501",
                        "P601", "P602"})
    c[p] = coin(rng) ? Position::On : Position::Off;
  return c;
}

}  // namespace

TEST(Plant, InitialStateMatchesTopology) {
  PlantState s = initial_plant_state(topo());
  EXPECT_EQ(s.tick, 0);
  EXPECT_DOUBLE_EQ(s.level.at("T101"), 650.0);
  EXPECT_DOUBLE_EQ(s.level.at("T601"), 400.0);
  EXPECT_DOUBLE_EQ(s.dp, 0.1);
  EXPECT_EQ(s.actuator.at("MV302").value, Position::Open);
  EXPECT_DOUBLE_EQ(s.flow.at("FIT501"), 1.0);  // P501 starts on
  EXPECT_DOUBLE_EQ(s.flow.at("FIT101"), 0.0);
}

TEST(Plant, MassConservationUnderRandomCommands) {
  std::mt19937_64 rng(7);
  PlantState s = initial_plant_state(topo());
  int checked = 0;
  for (int k = 0; k < 5000; ++k) {
    auto net = expected_net(s);
    PlantState next = step_plant(s, random_commands(rng), topo());
    for (const auto& [tank, n] : net) {
      const TankSpec& spec = topo().tank(tank);
      double want = s.level.at(tank) + spec.alpha * n;
      if (want <= 0.0 || want >= spec.capacity) continue;  // clamped at the tank walls
      double got = next.level.at(tank);
      EXPECT_LE(std::abs(got - want), 1e-9 * std::max(1.0, std::abs(want))) << tank << " at tick " << k;
      ++checked;
    }
    s = next;
  }
  EXPECT_GT(checked, 20000);
}

TEST(Plant, LibraryNetFlowsAgreeWithFlowPath) {
  std::mt19937_64 rng(11);
  PlantState s = initial_plant_state(topo());
  for (int k = 0; k < 500; ++k) {
    auto lib = tank_net_flows(s, topo());
    for (const auto& [tank, n] : expected_net(s)) EXPECT_NEAR(lib.at(tank), n, 1e-12) << tank;
    s = step_plant(s, random_commands(rng), topo());
  }
}

TEST(Plant, LevelsIntegrateFlowsOfCurrentTick) {
  PlantState s = initial_plant_state(topo());
  // P501 on, everything else idle: T401 drains 0.5 mm per tick.
  PlantState next = step_plant(s, {}, topo());
  EXPECT_DOUBLE_EQ(next.level.at("T401"), 649.5);
  EXPECT_DOUBLE_EQ(next.level.at("T601"), 400.0 + topo().tank("T601").alpha * 0.4);
  EXPECT_DOUBLE_EQ(next.level.at("T602"), 400.0 + topo().tank("T602").alpha * 0.6);
  EXPECT_EQ(next.tick, 1);
}

TEST(Plant, PumpsSwitchAtOnceValvesTravel) {
  PlantState s = initial_plant_state(topo());
  s = step_plant(s, {{"P101", Position::On}, {"MV201", Position::Open}}, topo());
  EXPECT_EQ(s.actuator.at("P101").value, Position::On);
  EXPECT_EQ(s.actuator.at("MV201").value, Position::Opening);
  EXPECT_DOUBLE_EQ(s.flow.at("FIT201"), 0.0);  // valve still travelling
  int ticks = 1;
  while (s.actuator.at("MV201").value == Position::Opening) {
    s = step_plant(s, {}, topo());
    ++ticks;
  }
  EXPECT_EQ(ticks, topo().valve_transition_ticks);
  EXPECT_EQ(s.actuator.at("MV201").value, Position::Open);
  EXPECT_DOUBLE_EQ(s.flow.at("FIT201"), 2.0);
}

TEST(Plant, RepeatedCommandDoesNotRestartTravel) {
  PlantState s = initial_plant_state(topo());
  s = step_plant(s, {{"MV101", Position::Open}}, topo());
  int remaining = s.actuator.at("MV101").transition_ticks_remaining;
  s = step_plant(s, {{"MV101", Position::Open}}, topo());
  EXPECT_EQ(s.actuator.at("MV101").transition_ticks_remaining, remaining - 1);
}

TEST(Plant, PumpBelowDeadLevelRunsDry) {
  PlantState s = initial_plant_state(topo());
  s.level["T101"] = 150.0;
  s.actuator["MV201"] = {Position::Open, 0};
  s.actuator["P101"] = {Position::On, 0};
  compute_flows(s, topo());
  EXPECT_DOUBLE_EQ(s.flow.at("FIT201"), 0.0);
  s = step_plant(s, {}, topo());
  s = step_plant(s, {}, topo());
  EXPECT_EQ(s.pump_dry_ticks.at("P101"), 2);
  EXPECT_DOUBLE_EQ(s.level.at("T101"), 150.0);
}

TEST(Plant, UfPressureFoulsBlocksAndBackwashes) {
  PlantState s = initial_plant_state(topo());
  s.actuator["P301"] = {Position::On, 0};
  compute_flows(s, topo());
  PlantState n = step_plant(s, {}, topo());
  EXPECT_NEAR(n.dp, 0.1 + topo().uf.fouling_rate, 1e-12);

  s.actuator["MV302"] = {Position::Closed, 0};
  compute_flows(s, topo());
  n = step_plant(s, {}, topo());
  EXPECT_NEAR(n.dp, 0.1 + topo().uf.blocked_rate, 1e-12);

  PlantState b = initial_plant_state(topo());
  b.dp = 0.4;
  b.actuator["MV301"] = {Position::Open, 0};
  b.actuator["MV303"] = {Position::Open, 0};
  compute_flows(b, topo());
  EXPECT_DOUBLE_EQ(b.flow.at("FIT601"), topo().uf.backwash_flow);
  n = step_plant(b, {}, topo());
  EXPECT_NEAR(n.dp, 0.4 - topo().uf.backwash_rate, 1e-12);
  b.dp = 0.055;
  n = step_plant(b, {}, topo());
  EXPECT_DOUBLE_EQ(n.dp, topo().uf.baseline_dp);
}

TEST(Plant, DosingMovesAnalyzerTowardTarget) {
  PlantState s = initial_plant_state(topo());
  PlantState n = apply_dosing(s, "P201", 1.0, topo());
  EXPECT_NEAR(n.ph.at("AIT202"), 7.3 + 0.006, 1e-12);
  n = apply_dosing(s, "P403", 10.0, topo());
  EXPECT_NEAR(n.ph.at("AIT503"), 7.2 - 0.04, 1e-12);
  EXPECT_NEAR(n.ph.at("AIT504"), n.ph.at("AIT503"), 1e-12);
  s.ph["AIT202"] = 8.599;
  EXPECT_DOUBLE_EQ(apply_dosing(s, "P201", 1.0, topo()).ph.at("AIT202"), 8.6);
}

TEST(Plant, DosingRejectsNonDosingPump) {
  PlantState s = initial_plant_state(topo());
  EXPECT_THROW(apply_dosing(s, "P101", 1.0, topo()), Error);
}

TEST(Plant, BackupPumpCountedOnce) {
  PlantState s = initial_plant_state(topo());
  s.actuator["P203"] = {Position::On, 0};
  PlantState one = step_plant(s, {}, topo());
  s.actuator["P204"] = {Position::On, 0};
  PlantState both = step_plant(s, {}, topo());
  EXPECT_DOUBLE_EQ(one.ph.at("AIT202"), both.ph.at("AIT202"));
  EXPECT_NEAR(one.ph.at("AIT202"), 7.3 - 0.004, 1e-12);
}

TEST(Plant, UndosedAnalyzerRelaxes) {
  PlantState s = initial_plant_state(topo());
  PlantState n = step_plant(s, {}, topo());
  EXPECT_NEAR(n.ph.at("AIT202"), 7.302, 1e-12);
}

TEST(Plant, RejectsBadCommands) {
  PlantState s = initial_plant_state(topo());
  EXPECT_THROW(step_plant(s, {{"LIT101", Position::On}}, topo()), Error);
  EXPECT_THROW(step_plant(s, {{"XV999", Position::Open}}, topo()), Error);
  EXPECT_THROW(step_plant(s, {{"MV101", Position::On}}, topo()), Error);
  EXPECT_THROW(step_plant(s, {{"P101", Position::Opening}}, topo()), Error);
}

TEST(Plant, SensorNoiseIsBoundedAndSeeded) {
  PlantState s = initial_plant_state(topo());
  NoiseSpec noise;
  noise.enabled = true;
  Rng a(42), b(42);
  for (int i = 0; i < 2000; ++i) {
    double x = read_sensor(s, "LIT101", noise, a, topo()).value;
    EXPECT_LE(std::abs(x - 650.0), noise.level_mm);
    EXPECT_EQ(x, read_sensor(s, "LIT101", noise, b, topo()).value);
  }
  NoiseSpec quiet;
  Rng c(1);
  EXPECT_DOUBLE_EQ(read_sensor(s, "LIT101", quiet, c, topo()).value, 650.0);
  EXPECT_EQ(read_sensor(s, "FIT501", quiet, c, topo()).units, "m3/h");
}

TEST(Plant, SensorReadRejectsActuator) {
  PlantState s = initial_plant_state(topo());
  NoiseSpec quiet;
  Rng r(1);
  EXPECT_THROW(read_sensor(s, "MV101", quiet, r, topo()), Error);
  EXPECT_DOUBLE_EQ(actuator_feedback(s, "MV302"), 1.0);
  EXPECT_DOUBLE_EQ(actuator_feedback(s, "P101"), 0.0);
}

TEST(Plant, StepIsDeterministic) {
  std::mt19937_64 r1(3), r2(3);
  PlantState a = initial_plant_state(topo()), b = a;
  for (int k = 0; k < 300; ++k) {
    a = step_plant(a, random_commands(r1), topo());
    b = step_plant(b, random_commands(r2), topo());
  }
  EXPECT_TRUE(a == b);
}
