#include <gtest/gtest.h>

#include "swatsim/config.hpp"
#include "swatsim/control.hpp"

using namespace swatsim;

namespace {

const Config& cfg() {
  static const Config c = load_config(default_config_path());
  return c;
}

PlcState plc(int id) { return make_plc(id, cfg().setpoints, initial_plant_state(cfg().topology)); }

ControlRule rule(int plc, const char* guard, const char* target, Position pos, int priority = 0) {
  ControlRule r;
  r.id = target;
  r.plc = plc;
  r.guard = Expr::parse(guard);
  r.target = target;
  r.position = pos;
  r.priority = priority;
  return r;
}

}  // namespace

TEST(Control, HysteresisHoldsBetweenMarkers) {
  PlcState p = plc(1);
  receive(p, "LIT101", 480, 0);
  receive(p, "LIT301", 650, 0);
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV101"), Position::Open);
  receive(p, "LIT101", 650, 1);
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV101"), Position::Open);
  receive(p, "LIT101", 801, 2);
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV101"), Position::Closed);
  receive(p, "LIT101", 650, 3);
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV101"), Position::Closed);
}

TEST(Control, CommandsEveryOwnedActuator) {
  PlcState p = plc(3);
  auto cmds = plc_scan(p, cfg().rules);
  for (const char* t : {"MV301", "MV302", "MV303", "MV304", "P301", "P302"}) EXPECT_TRUE(cmds.count(t)) << t;
  EXPECT_FALSE(cmds.count("P101"));
}

TEST(Control, HigherPriorityWins) {
  std::vector<ControlRule> rules{rule(1, "LIT301 <= 500", "P101", Position::On),
                                 rule(1, "LIT101 <= 250", "P101", Position::Off, 10)};
  PlcState p = plc(1);
  receive(p, "LIT301", 400, 0);
  receive(p, "LIT101", 200, 0);
  EXPECT_EQ(plc_scan(p, rules).at("P101"), Position::Off);
  receive(p, "LIT101", 600, 1);
  EXPECT_EQ(plc_scan(p, rules).at("P101"), Position::On);
}

TEST(Control, BackwashLatchSequencesValves) {
  PlcState p = plc(3);
  receive(p, "DPIT301", 0.41, 0);
  receive(p, "LIT401", 400, 0);
  receive(p, "LIT301", 600, 0);
  receive(p, "MV302", 1, 0);
  auto c = plc_scan(p, cfg().rules);
  EXPECT_EQ(p.memory.at("BW"), 1.0);
  EXPECT_EQ(c.at("P301"), Position::Off);
  EXPECT_EQ(c.at("MV302"), Position::Closed);
  EXPECT_EQ(c.at("MV301"), Position::Open);
  EXPECT_EQ(c.at("MV303"), Position::Open);
  receive(p, "DPIT301", 0.25, 1);  // between thresholds: latch holds
  plc_scan(p, cfg().rules);
  EXPECT_EQ(p.memory.at("BW"), 1.0);
  receive(p, "DPIT301", 0.09, 2);
  c = plc_scan(p, cfg().rules);
  EXPECT_EQ(p.memory.at("BW"), 0.0);
  EXPECT_EQ(c.at("MV302"), Position::Open);
  EXPECT_EQ(c.at("MV301"), Position::Closed);
}

TEST(Control, ManualModeOverlaysOverridesAndHoldsRest) {
  PlcState p = plc(1);
  receive(p, "LIT101", 480, 0);
  receive(p, "LIT301", 650, 0);
  plc_scan(p, cfg().rules);  // MV101 -> Open
  set_mode(p, PlcMode::Manual, {{"P101", Position::On}});
  receive(p, "LIT101", 900, 1);  // would close MV101 in Auto
  auto c = plc_scan(p, cfg().rules);
  EXPECT_EQ(c.at("P101"), Position::On);
  EXPECT_EQ(c.at("MV101"), Position::Open);
  set_mode(p, PlcMode::Auto);
  EXPECT_TRUE(p.manual_overrides.empty());
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV101"), Position::Closed);
}

TEST(Control, ManualOverrideOutsideStageRejected) {
  PlcState p = plc(1);
  EXPECT_THROW(set_mode(p, PlcMode::Manual, {{"P301", Position::On}}), Error);
  EXPECT_THROW(set_mode(p, PlcMode::Manual, {{"LIT101", Position::On}}), Error);
  EXPECT_EQ(p.mode, PlcMode::Auto);
}

TEST(Control, InputPatchPinsRegister) {
  PlcState p = plc(1);
  p.program_patches["LIT101"] = 790;
  receive(p, "LIT101", 300, 0);
  EXPECT_DOUBLE_EQ(p.registers.at("LIT101").value, 790);
  EXPECT_EQ(p.registers.at("LIT101").received, 0);
}

TEST(Control, OutputPatchPinsCommand) {
  PlcState p = plc(2);
  p.program_patches["MV201"] = 0;
  receive(p, "LIT301", 400, 0);
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV201"), Position::Closed);
  p.program_patches.erase("MV201");
  EXPECT_EQ(plc_scan(p, cfg().rules).at("MV201"), Position::Open);
}

TEST(Control, StaleRegistersReportAge) {
  PlcState p = plc(1);
  EXPECT_FALSE(p.staleness("LIT101", 10).has_value());
  receive(p, "LIT101", 600, 4);
  EXPECT_EQ(p.staleness("LIT101", 10), 6);
}

TEST(Control, MissingRegisterDoesNotFire) {
  PlcState p = plc(1);
  auto c = plc_scan(p, cfg().rules);
  EXPECT_EQ(c.at("MV101"), Position::Closed);
  EXPECT_EQ(c.at("P101"), Position::Off);
}

TEST(Control, RemoteReads) {
  auto r = request_remote_tag(1, "LIT301");
  EXPECT_EQ(r.owner, 3);
  EXPECT_EQ(r.from, 1);
  EXPECT_THROW(request_remote_tag(1, "LIT101"), Error);
  EXPECT_THROW(request_remote_tag(1, "NOPE"), Error);
  auto tags = remote_tags_for(1, cfg().rules);
  EXPECT_NE(std::find(tags.begin(), tags.end(), "LIT301"), tags.end());
  EXPECT_EQ(std::find(tags.begin(), tags.end(), "LIT101"), tags.end());
}
