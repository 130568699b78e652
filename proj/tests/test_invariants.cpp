#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swatsim/config.hpp"
#include "swatsim/detectors.hpp"
#include "swatsim/invariants.hpp"

using namespace swatsim;

namespace {

SdInvariant sd(const char* guard, const char* consequent, int grace = 0) {
  SdInvariant s;
  s.id = "SD-test";
  s.owner = 1;
  s.guard = Expr::parse(guard);
  s.consequent = Expr::parse(consequent);
  s.grace_ticks = grace;
  s.profiles = {"v2016", "v2017"};
  return s;
}

SaInvariant sa(double alpha = 0.5, int window = 30, double epsilon = 3.0) {
  SaInvariant s;
  s.id = "SA-T101";
  s.owner = 1;
  s.tank = "T101";
  s.level_tag = "LIT101";
  s.inflows = {{"FIT101", 1.0}};
  s.outflows = {{"FIT201", 1.0}};
  s.alpha = alpha;
  s.window = window;
  s.epsilon = epsilon;
  s.profiles = {"v2016", "v2017"};
  return s;
}

// Window means computed from scratch: each window's prediction starts from the
// measurement at the previous boundary (sample 0 for the first) and integrates
// the flows sample by sample.
std::vector<double> oracle_window_means(const std::vector<double>& level, const std::vector<double>& net,
                                        double alpha, int n) {
  std::vector<double> means;
  size_t anchor = 0;
  for (size_t end = anchor + n; end < level.size(); end = anchor + n) {
    double sum = 0.0;
    for (size_t j = anchor + 1; j <= end; ++j) {
      double predicted = level[anchor];
      for (size_t i = anchor; i < j; ++i) predicted += alpha * net[i];
      sum += std::abs(predicted - level[j]);
    }
    means.push_back(sum / n);
    anchor = end;
  }
  return means;
}

}  // namespace

TEST(Sd, AlarmsWhenGuardHoldsAndConsequentFails) {
  auto inv = sd("P101 == On", "FIT201 > 0.2");
  SdState st;
  DataView ok({{"P101", 1}, {"FIT201", 2.0}}, nullptr);
  DataView bad({{"P101", 1}, {"FIT201", 0.0}}, nullptr);
  EXPECT_FALSE(eval_sd(inv, st, ok, 1).alarm);
  auto out = eval_sd(inv, st, bad, 2, "WD");
  ASSERT_TRUE(out.alarm);
  EXPECT_EQ(out.alarm->tick, 2);
  EXPECT_EQ(out.alarm->placement, "WD");
  EXPECT_EQ(out.alarm->snapshot.at("FIT201"), 0.0);
  EXPECT_EQ(out.alarm->detail, "P101 == On => FIT201 > 0.2");
}

TEST(Sd, GraceTicksDelayAlarm) {
  auto inv = sd("MV101 == Open", "FIT101 > 0.2", 2);
  SdState st;
  DataView bad({{"MV101", 1}, {"FIT101", 0.0}}, nullptr);
  EXPECT_FALSE(eval_sd(inv, st, bad, 1).alarm);
  EXPECT_FALSE(eval_sd(inv, st, bad, 2).alarm);
  EXPECT_TRUE(eval_sd(inv, st, bad, 3).alarm);
  DataView off({{"MV101", 0}, {"FIT101", 0.0}}, nullptr);
  eval_sd(inv, st, off, 4);
  EXPECT_EQ(st.guard_age, -1);
  EXPECT_FALSE(eval_sd(inv, st, bad, 5).alarm);
}

TEST(Sd, MissingTagIsSkippedNotAlarmed) {
  auto inv = sd("P101 == On", "FIT201 > 0.2");
  SdState st;
  auto out = eval_sd(inv, st, DataView({{"P101", 1}}, nullptr), 1);
  EXPECT_TRUE(out.skipped);
  EXPECT_FALSE(out.alarm);
  out = eval_sd(inv, st, DataView({{"FIT201", 0}}, nullptr), 2);
  EXPECT_TRUE(out.skipped);
}

TEST(Sd, SetpointsComeFromView) {
  std::map<std::string, double> design{{"T101.L", 500}};
  auto inv = sd("1", "LIT101 >= T101.L");
  SdState st;
  EXPECT_TRUE(eval_sd(inv, st, DataView({{"LIT101", 499}}, &design), 1).alarm);
  EXPECT_FALSE(eval_sd(inv, st, DataView({{"LIT101", 501}}, &design), 2).alarm);
  EXPECT_TRUE(eval_sd(inv, st, DataView({{"LIT101", 501}}, nullptr), 3).skipped);
}

TEST(Sa, ConsistentTankNeverAlarms) {
  auto inv = sa();
  SaState st;
  double level = 600;
  for (Tick k = 0; k < 3000; ++k) {
    double in = (k / 200) % 2 ? 2.5 : 0.0, out = (k / 300) % 2 ? 2.0 : 0.0;
    sa_update(inv, st, level, in, out);
    EXPECT_FALSE(eval_sa(inv, st, k)) << k;
    level += 0.5 * (in - out);
  }
}

TEST(Sa, ConstantPinWithDrainMatchesClosedForm) {
  // Level frozen while the tank drains at r: window mean is alpha*r*(n+1)/2.
  for (double r : {0.2, 1.0, 2.0}) {
    auto inv = sa(0.5, 30, 1e9);
    SaState st;
    for (int k = 0; k <= 30; ++k) sa_update(inv, st, 700, 0.0, r);
    ASSERT_TRUE(st.window_complete);
    EXPECT_NEAR(st.last_mean, 0.5 * r * 31 / 2.0, 1e-9) << r;
  }
}

TEST(Sa, StrictThreshold) {
  auto inv = sa(0.5, 30, 7.75);  // mean under r = 1 is exactly 7.75
  SaState st;
  std::optional<Alarm> a;
  for (Tick k = 0; k <= 30; ++k) {
    sa_update(inv, st, 700, 0.0, 1.0);
    a = eval_sa(inv, st, k);
  }
  EXPECT_FALSE(a);
  inv.epsilon = 7.7499;
  EXPECT_TRUE(eval_sa(inv, st, 30));
}

TEST(Sa, MatchesBruteForceOracleOnRandomStreams) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3), f(0, 2.5);
  auto inv = sa(0.5, 30, 1e9);
  SaState st;
  std::vector<double> level, net, lib_means;
  double x = 500;
  for (int k = 0; k < 1500; ++k) {
    double in = f(rng), out = f(rng);
    x += u(rng);
    level.push_back(x);
    net.push_back(in - out);
    sa_update(inv, st, x, in, out);
    if (st.window_complete) lib_means.push_back(st.last_mean);
  }
  auto want = oracle_window_means(level, net, 0.5, 30);
  ASSERT_EQ(lib_means.size(), want.size());
  for (size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(lib_means[i], want[i], 1e-9) << i;
}

TEST(Sa, WindowResynchronises) {
  auto inv = sa(0.5, 30, 1e9);
  SaState st;
  for (int k = 0; k <= 30; ++k) sa_update(inv, st, 700, 0.0, 2.0);
  EXPECT_NEAR(st.last_mean, 15.5, 1e-9);
  for (int k = 0; k < 30; ++k) sa_update(inv, st, 700 - 1.0 * (k + 1), 0.0, 2.0);
  EXPECT_NEAR(st.last_mean, 0.0, 1e-9);
}

TEST(Profiles, SelectsByTag) {
  const Config c = load_config(default_config_path());
  auto v16 = load_invariant_set(c.sd_invariants, c.sa_invariants, "v2016");
  auto v17 = load_invariant_set(c.sd_invariants, c.sa_invariants, "v2017");
  EXPECT_LT(v16.sd.size(), v17.sd.size());
  EXPECT_EQ(v16.sa.size(), v17.sa.size());
  for (const auto& i : v16.sd)
    EXPECT_NE(std::find(i.profiles.begin(), i.profiles.end(), "v2016"), i.profiles.end());
  try {
    load_invariant_set(c.sd_invariants, c.sa_invariants, "v2018");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("v2016 v2017"), std::string::npos);
  }
}

TEST(Detector, InPlcCarriesOnlyOwnedInvariants) {
  const Config c = load_config(default_config_path());
  auto set = load_invariant_set(c.sd_invariants, c.sa_invariants, "v2017");
  Detector d1(Placement::InPlc, set, 1, c.setpoints);
  for (const auto& i : d1.sd()) EXPECT_EQ(i.owner, 1);
  for (const auto& i : d1.sa()) EXPECT_EQ(i.owner, 1);
  Detector h(Placement::Historian, set, std::nullopt, c.setpoints);
  EXPECT_EQ(h.sd().size(), set.sd.size());
  EXPECT_EQ(to_string(Placement::InPlc), "WD");
  EXPECT_EQ(to_string(Placement::Historian), "WDH");
}

TEST(Detector, CountsSkippedEvaluations) {
  const Config c = load_config(default_config_path());
  auto set = load_invariant_set(c.sd_invariants, c.sa_invariants, "v2017");
  Detector h(Placement::Historian, set, std::nullopt, c.setpoints);
  auto alarms = h.evaluate({}, 1);
  EXPECT_TRUE(alarms.empty());
  EXPECT_GT(h.skipped(), 0);
}

TEST(Detector, DetectedInWindow) {
  std::vector<Alarm> a{{10, "SD-x", "WD", {}, ""}, {50, "SD-y", "WDH", {}, ""}};
  EXPECT_TRUE(detected_in(a, Placement::InPlc, 0, 10));
  EXPECT_FALSE(detected_in(a, Placement::InPlc, 11, 100));
  EXPECT_TRUE(detected_in(a, Placement::Historian, 50, 50));
}
