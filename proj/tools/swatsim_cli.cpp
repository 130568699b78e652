#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "swatsim/harness.hpp"

using namespace swatsim;

namespace {

struct Common {
  std::string config_path = default_config_path();
  std::uint64_t seed = 1;
  std::string profile;
  std::optional<int> settle_margin;
  std::string report;
  std::string format = "text";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Plant/controller/detector configuration (YAML)");
  app->add_option("--seed", c.seed, "Noise seed");
  app->add_option("--invariant-profile", c.profile, "Invariant profile: v2016 or v2017");
  app->add_option("--settle-margin", c.settle_margin, "Ticks after the attack still credited to it");
  app->add_option("--report", c.report, "Write the report to this file instead of stdout");
  app->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"text", "csv"}));
}

void emit(const Common& c, const std::string& text) {
  if (c.report.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.report);
  if (!out) throw Error("cannot write report '" + c.report + "'");
  out << text;
}

RunOptions options(const Common& c) { return {c.profile, c.seed, c.settle_margin}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SWaT water-treatment simulator with attack injection and invariant detectors"};
  app.require_subcommand(1);
  Common common;

  auto* run = app.add_subcommand("run", "Run one attack scenario");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "Scenario file (YAML)")->required();
  add_common(run, common);

  auto* catalog = app.add_subcommand("catalog", "Run the attack catalog of one year");
  int year = 0;
  std::string catalog_dir = data_dir() + "/catalog";
  catalog->add_option("year", year, "2016 or 2017")->required()->check(CLI::IsMember({2016, 2017}));
  catalog->add_option("--catalog-dir", catalog_dir, "Directory holding index.yaml");
  add_common(catalog, common);

  auto* cal = app.add_subcommand("calibrate", "Tune SA thresholds on a nominal run");
  add_common(cal, common);

  auto* replay = app.add_subcommand("replay", "Run the historian detector over a historian CSV");
  std::string csv_path;
  replay->add_option("csv", csv_path, "Historian CSV")->required()->check(CLI::ExistingFile);
  add_common(replay, common);

  auto* exp = app.add_subcommand("export", "Export the historian of a run as CSV");
  Tick ticks = 3600;
  std::string export_scenario;
  exp->add_option("--ticks", ticks, "Ticks to simulate");
  exp->add_option("--scenario", export_scenario, "Scenario to inject while exporting");
  add_common(exp, common);

  CLI11_PARSE(app, argc, argv);

  try {
    Config config = load_config(common.config_path);
    std::ostringstream out;
    int status = 0;

    if (*run) {
      AttackScenario s = load_scenario(scenario_path);
      RunResult r = run_scenario(s, config, options(common));
      if (common.format == "csv")
        write_alarms_csv(out, r.alarms);
      else
        write_text(out, r);
      status = r.deviations.empty() ? 0 : 1;
    } else if (*catalog) {
      MatrixReport m = run_catalog(year, config, options(common), catalog_dir);
      if (common.format == "csv")
        write_csv(out, m);
      else
        write_text(out, m);
      status = m.deviations == 0 ? 0 : 1;
    } else if (*cal) {
      if (!config.noise.enabled) std::cerr << "note: noise is disabled in this configuration\n";
      CalibrationReport rep = calibrate(config, common.seed == 1 ? 2 : common.seed,
                                        common.profile.empty() ? "v2017" : common.profile);
      write_text(out, rep);
      status = rep.alarms_after == 0 ? 0 : 1;
    } else if (*replay) {
      std::ifstream in(csv_path);
      std::vector<std::string> missing;
      HistorianStore store = HistorianStore::read_csv(in, &missing);
      if (!missing.empty()) {
        std::cerr << "missing columns:";
        for (const auto& m : missing) std::cerr << ' ' << m;
        std::cerr << '\n';
      }
      long skipped = 0;
      auto alarms = replay_historian(store, config, common.profile.empty() ? "v2017" : common.profile, &skipped);
      if (common.format == "csv") {
        write_alarms_csv(out, alarms);
      } else {
        out << alarms.size() << " alarms, " << skipped << " skipped evaluations\n";
        for (const auto& a : alarms) out << a.tick << ' ' << a.invariant_id << ' ' << a.detail << '\n';
      }
    } else if (*exp) {
      std::optional<AttackScenario> s;
      if (!export_scenario.empty()) s = load_scenario(export_scenario);
      std::string profile = common.profile.empty() ? (s ? default_profile(s->year) : "v2017") : common.profile;
      HistorianStore store = export_historian(config, ticks, common.seed, profile, s ? &*s : nullptr);
      store.write_csv(out);
    }
    emit(common, out.str());
    return status;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
