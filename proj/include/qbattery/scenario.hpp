// Scenario configuration, presets, execution and CSV emission.
#pragma once

#include "qbattery/central_pair.hpp"
#include "qbattery/charger_battery.hpp"
#include "qbattery/collective_decoherence.hpp"
#include "qbattery/ergotropy.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qbattery {

using Json = nlohmann::ordered_json;

enum class ModelKind { central_pair, collective_decoherence, charger_battery };
enum class BatteryHamiltonianChoice { local, full };

std::string_view to_string(ModelKind kind);

using ModelParams = std::variant<CentralPairConfig, DecoherenceConfig, ChargerBatteryConfig>;

struct SweepSpec {
  std::string param;
  std::vector<Json> values;  // numbers or strings
};

struct ScenarioConfig {
  std::string id;
  ModelKind model = ModelKind::central_pair;
  Json params = Json::object();  // fully resolved, defaults applied
  double t_max = 1.0;
  std::size_t n_steps = 100;
  int substeps = 10;
  std::optional<SweepSpec> sweep;
  BatteryHamiltonianChoice battery_hamiltonian = BatteryHamiltonianChoice::local;
  std::string output_path;

  ModelParams model_params() const;
  TimeGrid grid() const { return uniform_grid(t_max, n_steps); }
};

// Parses and validates; unknown keys are rejected. Throws ConfigError naming
// the offending key or the parse position.
ScenarioConfig parse_config(const Json& doc);
ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Resolves `params` against the model's schema, applying defaults.
Json resolve_params(ModelKind model, const Json& params);
ModelParams parse_model_params(ModelKind model, const Json& resolved);

// Initial-state labels: product strings over {0,1,+,-} ("00", "0+"),
// "singlet", "psi+", "phi+", "phi-", "mixed"; or {"re": [[...]], "im": [[...]]}.
Matrix parse_state(const Json& node, int n_qubits);

Json scenario_to_json(const ScenarioConfig& cfg);

struct SeriesResult {
  std::string sweep_value;  // empty without a sweep
  MetricsSeries series;
  PowerSummary powers;
};

struct RunRecord {
  std::string scenario_id;
  Json resolved;
  std::string engine_version;
  double wall_time_s = 0.0;
  std::vector<SeriesResult> results;
};

// Runs every sweep value (or the single configuration) without writing files.
RunRecord compute_scenario(const ScenarioConfig& cfg);
// compute_scenario followed by write_outputs to cfg.output_path.
RunRecord run_scenario(const ScenarioConfig& cfg);

struct OutputPaths {
  std::filesystem::path timeseries, segments, record;
};
OutputPaths output_paths(const std::string& base);

std::string timeseries_csv(const RunRecord& record);
std::string segments_csv(const RunRecord& record);
Json record_json(const RunRecord& record);
// Writes the three files atomically (temporary file + rename).
OutputPaths write_outputs(const RunRecord& record, const std::string& base);

inline constexpr std::string_view kTimeseriesHeader =
    "scenario_id,sweep_value,t,energy,ergotropy,ergotropy_incoherent,ergotropy_coherent,"
    "power_inst,power_charging";
inline constexpr std::string_view kSegmentsHeader =
    "scenario_id,sweep_value,t_start,t_end,kind,avg_power";

// Built-in scenarios reproducing the published parameter sets.
struct PresetInfo {
  std::string name;
  std::string description;
};
const std::vector<PresetInfo>& preset_list();
ScenarioConfig preset(std::string_view name);
// A preset name or a path to a JSON config file.
ScenarioConfig resolve_scenario(std::string_view name_or_path);

// Parses "0.1,0.2,xxx" into numbers where possible, strings otherwise.
std::vector<Json> parse_sweep_values(std::string_view csv);

}  // namespace qbattery
