// Built-in scenarios. Every physics parameter is spelled out even when it
// matches the model default.
#include "qbattery/scenario.hpp"

#include <numbers>
#include <tuple>

namespace qbattery {

namespace {

struct PresetDef {
  PresetInfo info;
  Json doc;
};

Json linspace_values(int first, int last, double step) {
  Json out = Json::array();
  for (int k = first; k <= last; ++k) out.push_back(k * step);
  return out;
}

Json pair_params() {
  return Json{{"omega1", 1.15}, {"omega2", 1.25},        {"omega_a", 1.1},      {"omega_b", 1.2},
              {"eps1", 0.5},    {"eps2", 0.5},           {"g12", 0.75},         {"interaction", "xxx"},
              {"beta_a", 4.0},  {"beta_b", 1.0},         {"M", 8},              {"N", 8},
              {"initial_state", "00"}};
}

Json two_qubit_params(double k0r, bool vacuum, double T, const char* state) {
  return Json{{"omega1", 1.0},
              {"omega2", 1.0},
              {"Gamma1", 0.05},
              {"Gamma2", 0.05},
              {"k0r12", k0r},
              {"mu_dot_r", 0.0},
              {"T", T},
              {"r_sq", 0.5},
              {"Phi", std::numbers::pi / 4.0},
              {"vacuum", vacuum},
              {"include_dipole_shift", true},
              {"initial_state", state}};
}

Json charger_params(double lambda) {
  return Json{{"omega_C", 1.5},  {"omega_B", 1.25}, {"omega_EC", 0.7},        {"omega_EB", 0.6},
              {"g_CB", 0.05},    {"g_CEC", 0.04},   {"g_BEB", 0.02},          {"gamma", 1.0},
              {"lambda", lambda}, {"N", 3},          {"M", 2},                 {"T_C", 0.5},
              {"T_B", 0.8},      {"boundary", "periodic"}, {"initial_charger", "0"},
              {"initial_battery", "+"}};
}

Json scenario(const std::string& id, const char* model, Json params, double t_max, int n_steps) {
  return Json{{"id", id},           {"model", model},     {"params", std::move(params)},
              {"t_max", t_max},     {"n_steps", n_steps}, {"substeps", 10},
              {"battery_hamiltonian", "local"}, {"output", "out/" + id}};
}

Json with_sweep(Json doc, const char* param, Json values) {
  doc["sweep"] = Json{{"param", param}, {"values", std::move(values)}};
  return doc;
}

std::vector<PresetDef> build_presets() {
  std::vector<PresetDef> out;
  const Json interactions = Json::array({"xxx", "dm"});
  const Json lambda_curves = Json::array({0.25, 0.5, 1.0, 1.5});
  const Json lambda_grid = linspace_values(0, 80, 0.025);

  {
    auto doc = with_sweep(scenario("pair_ergotropy", "central_pair", pair_params(), 40.0, 400),
                          "interaction", interactions);
    doc["battery_hamiltonian"] = "full";
    out.push_back({{"pair_ergotropy", "central pair, XXX vs DM ergotropy, M=N=8, |00>"}, doc});
  }
  {
    auto doc = with_sweep(scenario("pair_power", "central_pair", pair_params(), 40.0, 800),
                          "interaction", interactions);
    doc["battery_hamiltonian"] = "full";
    out.push_back({{"pair_power", "central pair, XXX vs DM charging power and segment averages"}, doc});
  }

  const std::pair<const char*, double> regimes[] = {{"collective", 0.1}, {"independent", 1.2}};
  for (bool vacuum : {false, true})
    for (const auto& [label, k0r] : regimes) {
      const std::string id = std::string(vacuum ? "vacuum_" : "squeezed_") + label;
      const std::string desc = std::string(vacuum ? "vacuum bath" : "squeezed bath T=5 r=0.5 Phi=pi/4") +
                               ", k0r=" + (k0r < 1 ? "0.1" : "1.2") + ", |0+>, W/Wi/Wc vs t";
      out.push_back({{id, desc},
                     scenario(id, "collective_decoherence", two_qubit_params(k0r, vacuum, 5.0, "0+"),
                              50.0, 500)});
    }

  const std::pair<const char*, double> temps[] = {{"singlet_distance_hot", 5.0},
                                                  {"singlet_distance_cold", 0.4}};
  for (const auto& [id, T] : temps)
    out.push_back({{id, std::string("Bell singlet, k0r sweep at t=2, T=") + (T > 1 ? "5" : "0.4")},
                   with_sweep(scenario(id, "collective_decoherence",
                                       two_qubit_params(0.1, false, T, "singlet"), 2.0, 200),
                              "k0r12", linspace_values(1, 40, 0.05))});

  const std::pair<const char*, double> temp_regimes[] = {{"temperature_collective", 0.05},
                                                         {"temperature_independent", 1.1}};
  for (const auto& [id, k0r] : temp_regimes)
    out.push_back({{id, std::string("|0+>, T sweep over [0, 10] at t=2, k0r=") + (k0r < 1 ? "0.05" : "1.1")},
                   with_sweep(scenario(id, "collective_decoherence",
                                       two_qubit_params(k0r, false, 5.0, "0+"), 2.0, 200),
                              "T", linspace_values(0, 40, 0.25))});

  out.push_back({{"lambda_time", "charger-battery ergotropy, energy, power vs t for lambda in {0.25, 0.5, 1, 1.5}"},
                 with_sweep(scenario("lambda_time", "charger_battery", charger_params(1.0), 80.0, 800),
                            "lambda", lambda_curves)});
  out.push_back({{"lambda_profile", "charger-battery ergotropy vs lambda in [0, 2], read at t=20, 40, 60, 80"},
                 with_sweep(scenario("lambda_profile", "charger_battery", charger_params(1.0), 80.0, 320),
                            "lambda", lambda_grid)});
  out.push_back({{"lambda_energy", "charger-battery energy and power vs lambda in [0, 2], read at t=40"},
                 with_sweep(scenario("lambda_energy", "charger_battery", charger_params(1.0), 40.0, 160),
                            "lambda", lambda_grid)});

  const std::tuple<const char*, const char*, double> power_runs[] = {
      {"lambda_power_0p25", "0.25", 0.25}, {"lambda_power_0p5", "0.5", 0.5}, {"lambda_power_1p0", "1", 1.0}};
  for (const auto& [id, shown, lambda] : power_runs)
    out.push_back({{id, std::string("charger-battery instantaneous and segment-average power, lambda=") + shown},
                   scenario(id, "charger_battery", charger_params(lambda), 80.0, 1600)});
  return out;
}

const std::vector<PresetDef>& presets() {
  static const std::vector<PresetDef> all = build_presets();
  return all;
}

}  // namespace

const std::vector<PresetInfo>& preset_list() {
  static const std::vector<PresetInfo> infos = [] {
    std::vector<PresetInfo> v;
    for (const auto& p : presets()) v.push_back(p.info);
    return v;
  }();
  return infos;
}

ScenarioConfig preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.info.name == name) return parse_config(p.doc);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace qbattery
