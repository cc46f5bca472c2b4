#include "qbattery/scenario.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qbattery;
using namespace qbattery::testing;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string l;
  while (std::getline(is, l)) out.push_back(l);
  return out;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "qbattery_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QBATTERY_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallPair = R"({
  "id": "small_pair", "model": "central_pair", "t_max": 4, "n_steps": 20,
  "params": {"M": 2, "N": 3, "eps1": 0.5, "eps2": 0.4, "g12": 0.75, "initial_state": "00"},
  "sweep": {"param": "interaction", "values": ["xxx", "dm"]}
})";

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal config is populated with defaults") {
  const auto cfg = parse_config_text(R"({"model": "central_pair", "t_max": 40, "n_steps": 400})");
  CHECK(cfg.model == ModelKind::central_pair);
  CHECK(cfg.t_max == 40.0);
  CHECK(cfg.n_steps == 400);
  CHECK(cfg.substeps == 10);
  CHECK(cfg.battery_hamiltonian == BatteryHamiltonianChoice::local);
  CHECK_FALSE(cfg.sweep.has_value());
  CHECK(cfg.id == "central_pair");
  CHECK(cfg.output_path == "out/central_pair");
  for (const char* key : {"omega1", "omega2", "omega_a", "omega_b", "eps1", "eps2", "g12",
                          "interaction", "beta_a", "beta_b", "M", "N", "initial_state"})
    CHECK(cfg.params.contains(key));
  const auto p = std::get<CentralPairConfig>(cfg.model_params());
  CHECK(p.M == 1);
  CHECK(std::abs(p.initial_state(0, 0) - 1.0) <= 1e-15);
}

TEST_CASE("unknown keys are rejected by name") {
  const auto msg = error_of(
      R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "params": {"lambda_": 1.0}})");
  CHECK(msg.find("lambda_") != std::string::npos);
  const auto top = error_of(R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "tmax": 3})");
  CHECK(top.find("tmax") != std::string::npos);
  const auto sweep = error_of(
      R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "sweep": {"param": "lambda", "values": [1], "step": 2}})");
  CHECK(sweep.find("step") != std::string::npos);
}

TEST_CASE("invalid fields are named") {
  CHECK(error_of(R"({"model": "central_pair", "t_max": 1, "n_steps": 1})").find("n_steps") !=
        std::string::npos);
  CHECK(error_of(R"({"model": "central_pair", "t_max": -1, "n_steps": 10})").find("t_max") !=
        std::string::npos);
  CHECK(error_of(R"({"model": "central_pair", "t_max": 1, "n_steps": 10, "params": {"M": "x"}})")
            .find("'M'") != std::string::npos);
  CHECK(error_of(R"({"model": "nope", "t_max": 1, "n_steps": 10})").find("nope") != std::string::npos);
  CHECK(error_of(R"({"model": "central_pair", "n_steps": 10})").find("t_max") != std::string::npos);
  CHECK(error_of(R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "params": {"boundary": "ring"}})")
            .find("boundary") != std::string::npos);
  CHECK(error_of(R"({"model": "collective_decoherence", "t_max": 1, "n_steps": 10, "params": {"k0r12": 0}})")
            .find("k0r12") != std::string::npos);
}

TEST_CASE("JSON syntax errors carry the position") {
  const auto msg = error_of("{\n  \"model\": \"central_pair\",\n  \"t_max\": ,\n}");
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("sweep parameter must exist and values must validate") {
  CHECK(error_of(R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "sweep": {"param": "beta", "values": [1]}})")
            .find("beta") != std::string::npos);
  CHECK_FALSE(error_of(R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "sweep": {"param": "gamma", "values": [2.0]}})")
                  .empty());
  CHECK_FALSE(error_of(R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "sweep": {"param": "lambda", "values": []}})")
                  .empty());
}

TEST_CASE("infinite temperatures may be written as strings") {
  const auto cfg = parse_config_text(
      R"({"model": "charger_battery", "t_max": 1, "n_steps": 10, "params": {"T_C": "inf"}})");
  CHECK(std::isinf(std::get<ChargerBatteryConfig>(cfg.model_params()).T_C));
}

TEST_CASE("load_config reads files and reports missing ones") {
  const auto path = temp_dir() / "small_pair.json";
  {
    std::ofstream f(path);
    f << kSmallPair;
  }
  const auto cfg = load_config(path);
  CHECK(cfg.id == "small_pair");
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->values.size() == 2);
  CHECK_THROWS_AS(load_config(temp_dir() / "missing.json"), IoError);
}

TEST_CASE("state labels") {
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(max_abs(parse_state("0+", 2) - ket_matrix({1, 1, 0, 0})) <= 1e-15);
  CHECK(max_abs(parse_state("singlet", 2) - ket_matrix({0, s, -s, 0})) <= 1e-15);
  CHECK(max_abs(parse_state("phi+", 2) - ket_matrix({s, 0, 0, s})) <= 1e-15);
  CHECK(max_abs(parse_state("00", 2) - ket_matrix({1, 0, 0, 0})) <= 1e-15);
  CHECK(max_abs(parse_state("-", 1) - ket_matrix({1, -1})) <= 1e-15);
  CHECK(max_abs(parse_state("mixed", 2) - Matrix::Identity(4, 4) / 4.0) <= 1e-15);
  const Json explicit_state = Json::parse(R"({"re": [[0.5, 0], [0, 0.5]], "im": [[0, 0.1], [-0.1, 0]]})");
  const Matrix m = parse_state(explicit_state, 1);
  CHECK(std::abs(m(0, 1) - Complex(0, 0.1)) <= 1e-15);
  CHECK_THROWS_AS(parse_state("0x", 2), ConfigError);
  CHECK_THROWS_AS(parse_state("000", 2), ConfigError);
}

TEST_CASE("sweep value lists") {
  const auto v = parse_sweep_values("0.25, 1,xxx,1e-3");
  REQUIRE(v.size() == 4);
  CHECK(v[0].get<double>() == 0.25);
  CHECK(v[1].is_number_integer());
  CHECK(v[2].get<std::string>() == "xxx");
  CHECK(v[3].get<double>() == 1e-3);
  CHECK_THROWS_AS(parse_sweep_values("1,,2"), ConfigError);
}

TEST_CASE("every preset parses and embeds its physics parameters") {
  CHECK(preset_list().size() >= 16);
  for (const auto& info : preset_list()) {
    const auto cfg = preset(info.name);
    CHECK(cfg.id == info.name);
    CHECK_NOTHROW(cfg.model_params());
  }
  CHECK_THROWS_AS(preset("fig99"), ConfigError);
}

TEST_CASE("pair preset carries the caption parameters and both couplings") {
  const auto cfg = preset("pair_ergotropy");
  const auto p = std::get<CentralPairConfig>(cfg.model_params());
  CHECK(p.omega1 == 1.15);
  CHECK(p.omega2 == 1.25);
  CHECK(p.omega_a == 1.1);
  CHECK(p.omega_b == 1.2);
  CHECK(p.g12 == 0.75);
  CHECK(p.eps1 == 0.5);
  CHECK(p.eps2 == 0.5);
  CHECK(p.beta_a == 4.0);
  CHECK(p.beta_b == 1.0);
  CHECK(p.M == 8);
  CHECK(p.N == 8);
  CHECK(cfg.params["initial_state"] == "00");
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->param == "interaction");
  CHECK(cfg.sweep->values == std::vector<Json>{"xxx", "dm"});
}

TEST_CASE("squeezed collective preset") {
  const auto cfg = preset("squeezed_collective");
  const auto p = std::get<DecoherenceConfig>(cfg.model_params());
  CHECK(p.T == 5.0);
  CHECK(p.r_sq == 0.5);
  CHECK(p.Phi == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
  CHECK(p.k0r12 == 0.1);
  CHECK_FALSE(p.vacuum);
  CHECK(cfg.params["initial_state"] == "0+");
}

TEST_CASE("lambda profile preset samples the reading times") {
  const auto cfg = preset("lambda_profile");
  const auto grid = cfg.grid();
  for (double t : {20.0, 40.0, 60.0, 80.0})
    CHECK(std::find(grid.begin(), grid.end(), t) != grid.end());
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->values.size() == 81);
  CHECK(cfg.sweep->values.back().get<double>() == 2.0);
}

TEST_CASE("timeseries and segment CSV schema") {
  const auto cfg = parse_config_text(kSmallPair);
  const auto record = compute_scenario(cfg);
  REQUIRE(record.results.size() == 2);
  CHECK(record.results[0].sweep_value == "xxx");
  CHECK(record.results[1].sweep_value == "dm");
  for (const auto& r : record.results) CHECK(r.series.size() == cfg.n_steps + 1);

  const auto ts = lines(timeseries_csv(record));
  CHECK(ts.front() == kTimeseriesHeader);
  CHECK(ts.size() == 1 + 2 * (cfg.n_steps + 1));
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const auto cells = split(ts[k]);
    REQUIRE(cells.size() == 9);
    CHECK(cells[0] == "small_pair");
    for (std::size_t c = 2; c < 9; ++c) CHECK_NOTHROW((void)std::stod(cells[c]));
  }
  const auto seg = lines(segments_csv(record));
  CHECK(seg.front() == kSegmentsHeader);
  CHECK(seg.size() > 1);
  for (std::size_t k = 1; k < seg.size(); ++k) {
    const auto cells = split(seg[k]);
    REQUIRE(cells.size() == 6);
    CHECK((cells[4] == "charging" || cells[4] == "discharging" || cells[4] == "idle"));
  }
  const auto j = record_json(record);
  CHECK(j["scenario_id"] == "small_pair");
  CHECK(j["engine_version"] == QBATTERY_VERSION);
  CHECK(j["resolved"]["params"]["M"] == 2);
  CHECK(j["power_aggregates"].size() == 2);
}

TEST_CASE("empty sweep_value column without a sweep") {
  const auto cfg = parse_config_text(
      R"({"id": "one", "model": "collective_decoherence", "t_max": 1, "n_steps": 5})");
  const auto ts = lines(timeseries_csv(compute_scenario(cfg)));
  REQUIRE(ts.size() == 7);
  CHECK(split(ts[1])[1].empty());
}

TEST_CASE("CSV output is bit-identical across runs and thread counts") {
  const auto cfg = parse_config_text(kSmallPair);
  set_worker_threads(1);
  const auto a = timeseries_csv(compute_scenario(cfg));
  set_worker_threads(4);
  const auto b = timeseries_csv(compute_scenario(cfg));
  const auto c = timeseries_csv(compute_scenario(cfg));
  set_worker_threads(0);
  CHECK(a == b);
  CHECK(b == c);
  const auto charger = parse_config_text(
      R"({"model": "charger_battery", "t_max": 10, "n_steps": 20, "sweep": {"param": "lambda", "values": [0.5, 1.0, 0.5]}})");
  set_worker_threads(3);
  const auto x = segments_csv(compute_scenario(charger));
  set_worker_threads(1);
  const auto y = segments_csv(compute_scenario(charger));
  set_worker_threads(0);
  CHECK(x == y);
}

TEST_CASE("run_scenario writes the three files") {
  auto cfg = parse_config_text(kSmallPair);
  cfg.output_path = (temp_dir() / "nested" / "small").string();
  const auto record = run_scenario(cfg);
  const auto paths = output_paths(cfg.output_path);
  for (const auto& p : {paths.timeseries, paths.segments, paths.record}) {
    CHECK(std::filesystem::exists(p));
    auto tmp = p;
    tmp += ".tmp";
    CHECK_FALSE(std::filesystem::exists(tmp));
  }
  std::ifstream f(paths.timeseries);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == timeseries_csv(record));
}

TEST_CASE("unwritable output raises an I/O error") {
  const auto blocker = temp_dir() / "blocker";
  {
    std::ofstream f(blocker);
    f << "x";
  }
  const auto cfg = parse_config_text(R"({"model": "collective_decoherence", "t_max": 1, "n_steps": 5})");
  const auto record = compute_scenario(cfg);
  CHECK_THROWS_AS(write_outputs(record, (blocker / "sub" / "run").string()), IoError);
}

TEST_CASE("CLI exit codes") {
  const auto dir = temp_dir();
  CHECK(run_cli("list-scenarios") == 0);
  CHECK(run_cli("validate --filter rk4") == 0);
  CHECK(run_cli("validate --filter no_such_check") == 1);
  CHECK(run_cli("run --scenario no_such_preset") == 1);
  const auto bad = dir / "bad.json";
  {
    std::ofstream f(bad);
    f << R"({"model": "central_pair", "t_max": 1, "n_steps": 1})";
  }
  CHECK(run_cli("run --scenario " + bad.string()) == 1);
  const auto good = dir / "good.json";
  {
    std::ofstream f(good);
    f << R"({"id": "cli_small", "model": "collective_decoherence", "t_max": 1, "n_steps": 5})";
  }
  CHECK(run_cli("run --scenario " + good.string() + " --out " + (dir / "cli" / "small").string()) == 0);
  CHECK(std::filesystem::exists(dir / "cli" / "small_timeseries.csv"));
  CHECK(run_cli("sweep --scenario " + good.string() + " --param T --values 0.5,1 --out " +
                (dir / "cli" / "sweep").string()) == 0);
  CHECK(run_cli("sweep --scenario " + good.string() + " --param nope --values 1") == 1);
  const auto blocker = dir / "blocker";
  {
    std::ofstream f(blocker);
    f << "x";
  }
  CHECK(run_cli("run --scenario " + good.string() + " --out " + (blocker / "x" / "y").string()) == 3);
  CHECK(run_cli("frobnicate") == 1);
}

}  // TEST_SUITE
