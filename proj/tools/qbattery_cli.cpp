// qbattery: run scenarios, list presets, run the self-check suite.
#include "qbattery/scenario.hpp"
#include "qbattery/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace qbattery;

void report(const RunRecord& record, const ScenarioConfig& cfg) {
  const auto paths = output_paths(cfg.output_path);
  std::cout << record.scenario_id << ": " << record.results.size() << " run(s), "
            << record.results.front().series.size() << " samples each, "
            << record.wall_time_s << " s\n";
  for (const auto& p : {paths.timeseries, paths.segments, paths.record})
    std::cout << "  wrote " << p.string() << '\n';
}

int cmd_run(const std::string& scenario, const std::string& out) {
  ScenarioConfig cfg = resolve_scenario(scenario);
  if (!out.empty()) cfg.output_path = out;
  report(run_scenario(cfg), cfg);
  return 0;
}

int cmd_sweep(const std::string& scenario, const std::string& param, const std::string& values,
              const std::string& out) {
  Json doc = scenario_to_json(resolve_scenario(scenario));
  doc["sweep"] = Json{{"param", param}, {"values", parse_sweep_values(values)}};
  if (!out.empty()) doc["output"] = out;
  const ScenarioConfig cfg = parse_config(doc);
  report(run_scenario(cfg), cfg);
  return 0;
}

int cmd_list() {
  for (const auto& p : preset_list()) std::printf("%-26s %s\n", p.name.c_str(), p.description.c_str());
  return 0;
}

int cmd_validate(const std::string& filter) {
  const auto results = run_validation(filter);
  if (results.empty()) throw ConfigError("no validation check matches '" + filter + "'");
  bool ok = true;
  for (const auto& r : results) {
    std::printf("[%s] %-26s measured=%.3e tol=%.3e  %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.measured, r.tolerance, r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum battery simulator"};
  app.set_version_flag("--version", std::string(QBATTERY_VERSION));
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware default)");

  std::string scenario, out, param, values, filter;
  auto* run = app.add_subcommand("run", "run a preset or JSON scenario file");
  run->add_option("--scenario", scenario, "preset name or config path")->required();
  run->add_option("--out", out, "output base path (overrides the config)");

  app.add_subcommand("list-scenarios", "list built-in presets");

  auto* validate = app.add_subcommand("validate", "run the self-check suite");
  validate->add_option("--filter", filter, "run only checks whose name contains this");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over a parameter list");
  sweep->add_option("--scenario", scenario, "preset name or config path")->required();
  sweep->add_option("--param", param, "model parameter to sweep")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--out", out, "output base path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    set_worker_threads(threads);
    if (run->parsed()) return cmd_run(scenario, out);
    if (sweep->parsed()) return cmd_sweep(scenario, param, values, out);
    if (validate->parsed()) return cmd_validate(filter);
    return cmd_list();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
