#include "qbattery/scenario.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace qbattery {

namespace {

constexpr std::string_view kEngineVersion = QBATTERY_VERSION;

// ---- JSON field helpers -------------------------------------------------------

double as_double(const Json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("field '" + key + "' must be a number (or \"inf\")");
}

int as_int(const Json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 1e9) return static_cast<int>(d);
  }
  throw ConfigError("field '" + key + "' must be an integer");
}

bool as_bool(const Json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("field '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string value_label(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// ---- model schemas ------------------------------------------------------------

const Json& defaults_for(ModelKind model) {
  static const Json central = [] {
    const CentralPairConfig d;
    return Json{{"omega1", d.omega1},   {"omega2", d.omega2},   {"omega_a", d.omega_a},
                {"omega_b", d.omega_b}, {"eps1", d.eps1},       {"eps2", d.eps2},
                {"g12", d.g12},         {"interaction", "xxx"}, {"beta_a", d.beta_a},
                {"beta_b", d.beta_b},   {"M", d.M},             {"N", d.N},
                {"initial_state", "00"}};
  }();
  static const Json decoherence = [] {
    const DecoherenceConfig d;
    return Json{{"omega1", d.omega1},
                {"omega2", d.omega2},
                {"Gamma1", d.Gamma1},
                {"Gamma2", d.Gamma2},
                {"k0r12", d.k0r12},
                {"mu_dot_r", d.mu_dot_r},
                {"T", d.T},
                {"r_sq", d.r_sq},
                {"Phi", d.Phi},
                {"vacuum", d.vacuum},
                {"include_dipole_shift", d.include_dipole_shift},
                {"initial_state", "0+"}};
  }();
  static const Json charger = [] {
    const ChargerBatteryConfig d;
    return Json{{"omega_C", d.omega_C},   {"omega_B", d.omega_B},   {"omega_EC", d.omega_EC},
                {"omega_EB", d.omega_EB}, {"g_CB", d.g_CB},         {"g_CEC", d.g_CEC},
                {"g_BEB", d.g_BEB},       {"gamma", d.gamma},       {"lambda", d.lambda},
                {"N", d.N},               {"M", d.M},               {"T_C", d.T_C},
                {"T_B", d.T_B},           {"boundary", "periodic"}, {"initial_charger", "0"},
                {"initial_battery", "+"}};
  }();
  switch (model) {
    case ModelKind::central_pair:
      return central;
    case ModelKind::collective_decoherence:
      return decoherence;
    case ModelKind::charger_battery:
      return charger;
  }
  return central;
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "central_pair") return ModelKind::central_pair;
  if (s == "collective_decoherence") return ModelKind::collective_decoherence;
  if (s == "charger_battery") return ModelKind::charger_battery;
  throw ConfigError("unknown model '" + s + "'");
}

CentralPairConfig parse_central(const Json& p) {
  CentralPairConfig c;
  c.omega1 = as_double(p.at("omega1"), "omega1");
  c.omega2 = as_double(p.at("omega2"), "omega2");
  c.omega_a = as_double(p.at("omega_a"), "omega_a");
  c.omega_b = as_double(p.at("omega_b"), "omega_b");
  c.eps1 = as_double(p.at("eps1"), "eps1");
  c.eps2 = as_double(p.at("eps2"), "eps2");
  c.g12 = as_double(p.at("g12"), "g12");
  const auto inter = as_string(p.at("interaction"), "interaction");
  if (inter == "xxx" || inter == "XXX")
    c.interaction = PairInteraction::xxx;
  else if (inter == "dm" || inter == "DM")
    c.interaction = PairInteraction::dm;
  else
    throw ConfigError("field 'interaction' must be \"xxx\" or \"dm\"");
  c.beta_a = as_double(p.at("beta_a"), "beta_a");
  c.beta_b = as_double(p.at("beta_b"), "beta_b");
  c.M = as_int(p.at("M"), "M");
  c.N = as_int(p.at("N"), "N");
  c.initial_state = parse_state(p.at("initial_state"), 2);
  c.validate();
  return c;
}

DecoherenceConfig parse_decoherence(const Json& p) {
  DecoherenceConfig c;
  c.omega1 = as_double(p.at("omega1"), "omega1");
  c.omega2 = as_double(p.at("omega2"), "omega2");
  c.Gamma1 = as_double(p.at("Gamma1"), "Gamma1");
  c.Gamma2 = as_double(p.at("Gamma2"), "Gamma2");
  c.k0r12 = as_double(p.at("k0r12"), "k0r12");
  c.mu_dot_r = as_double(p.at("mu_dot_r"), "mu_dot_r");
  c.T = as_double(p.at("T"), "T");
  c.r_sq = as_double(p.at("r_sq"), "r_sq");
  c.Phi = as_double(p.at("Phi"), "Phi");
  c.vacuum = as_bool(p.at("vacuum"), "vacuum");
  c.include_dipole_shift = as_bool(p.at("include_dipole_shift"), "include_dipole_shift");
  c.initial_state = parse_state(p.at("initial_state"), 2);
  c.validate();
  return c;
}

ChargerBatteryConfig parse_charger(const Json& p) {
  ChargerBatteryConfig c;
  c.omega_C = as_double(p.at("omega_C"), "omega_C");
  c.omega_B = as_double(p.at("omega_B"), "omega_B");
  c.omega_EC = as_double(p.at("omega_EC"), "omega_EC");
  c.omega_EB = as_double(p.at("omega_EB"), "omega_EB");
  c.g_CB = as_double(p.at("g_CB"), "g_CB");
  c.g_CEC = as_double(p.at("g_CEC"), "g_CEC");
  c.g_BEB = as_double(p.at("g_BEB"), "g_BEB");
  c.gamma = as_double(p.at("gamma"), "gamma");
  c.lambda = as_double(p.at("lambda"), "lambda");
  c.N = as_int(p.at("N"), "N");
  c.M = as_int(p.at("M"), "M");
  c.T_C = as_double(p.at("T_C"), "T_C");
  c.T_B = as_double(p.at("T_B"), "T_B");
  const auto boundary = as_string(p.at("boundary"), "boundary");
  if (boundary == "periodic")
    c.boundary = ChainBoundary::periodic;
  else if (boundary == "open")
    c.boundary = ChainBoundary::open;
  else
    throw ConfigError("field 'boundary' must be \"periodic\" or \"open\"");
  c.initial_charger = parse_state(p.at("initial_charger"), 1);
  c.initial_battery = parse_state(p.at("initial_battery"), 1);
  c.validate();
  return c;
}

Eigen::VectorXcd qubit_ket(char c) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd v(2);
  switch (c) {
    case '0':
      v << 1, 0;
      break;
    case '1':
      v << 0, 1;
      break;
    case '+':
      v << s, s;
      break;
    case '-':
      v << s, -s;
      break;
    default:
      throw ConfigError(std::string("unknown single-qubit label '") + c + "'");
  }
  return v;
}

Matrix matrix_from_json(const Json& rows, int dim, const std::string& what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    throw ConfigError(what + " must be a " + std::to_string(dim) + "x" + std::to_string(dim) +
                      " array");
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != dim)
      throw ConfigError(what + " row " + std::to_string(i) + " has the wrong length");
    for (int j = 0; j < dim; ++j) m(i, j) = as_double(rows[i][j], what);
  }
  return m.cast<Complex>();
}

// ---- running ------------------------------------------------------------------

struct Variant {
  std::string label;
  ModelParams params;
};

SeriesResult run_variant(const ScenarioConfig& cfg, const Variant& v, const TimeGrid& grid) {
  SeriesResult out;
  out.sweep_value = v.label;
  const bool full = cfg.battery_hamiltonian == BatteryHamiltonianChoice::full;
  if (const auto* c = std::get_if<CentralPairConfig>(&v.params)) {
    const auto states = evolve_reduced(*c, grid);
    const auto h = full ? full_battery_hamiltonian(*c) : local_battery_hamiltonian(*c);
    out.series = series_metrics(states, h, grid);
  } else if (const auto* c = std::get_if<DecoherenceConfig>(&v.params)) {
    const auto coeffs = lindblad_coefficients(*c);
    const auto traj = evolve(*c, coeffs, grid, cfg.substeps);
    const auto h = full ? system_hamiltonian(*c, coeffs) : local_hamiltonian(*c);
    out.series = series_metrics(traj.states, h, grid);
  } else {
    const auto& cb = std::get<ChargerBatteryConfig>(v.params);
    const auto traj = evolve_battery(cb, grid);
    out.series = series_metrics(traj.battery, battery_hamiltonian(cb), grid);
  }
  out.powers = average_powers(out.series);
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::central_pair:
      return "central_pair";
    case ModelKind::collective_decoherence:
      return "collective_decoherence";
    case ModelKind::charger_battery:
      return "charger_battery";
  }
  return "central_pair";
}

Matrix parse_state(const Json& node, int n_qubits) {
  const int dim = 1 << n_qubits;
  std::vector<int> dims(n_qubits, 2);
  if (node.is_string()) {
    const auto label = node.get<std::string>();
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    if (label == "mixed") return Matrix::Identity(dim, dim) / static_cast<double>(dim);
    if (n_qubits == 2 && (label == "singlet" || label == "psi-")) {
      psi << 0, s, -s, 0;
    } else if (n_qubits == 2 && label == "psi+") {
      psi << 0, s, s, 0;
    } else if (n_qubits == 2 && label == "phi+") {
      psi << s, 0, 0, s;
    } else if (n_qubits == 2 && label == "phi-") {
      psi << s, 0, 0, -s;
    } else {
      if (static_cast<int>(label.size()) != n_qubits)
        throw ConfigError("state label '" + label + "' needs " + std::to_string(n_qubits) +
                          " qubit symbols");
      psi = qubit_ket(label[0]);
      for (std::size_t k = 1; k < label.size(); ++k) {
        const Eigen::VectorXcd q = qubit_ket(label[k]);
        Eigen::VectorXcd next(psi.size() * 2);
        for (Eigen::Index i = 0; i < psi.size(); ++i) next.segment(2 * i, 2) = psi(i) * q;
        psi = std::move(next);
      }
    }
    return DensityMatrix::pure(psi, dims).matrix();
  }
  if (node.is_object()) {
    reject_unknown(node, {"re", "im"}, "state");
    if (!node.contains("re")) throw ConfigError("explicit state needs an 're' matrix");
    Matrix m = matrix_from_json(node.at("re"), dim, "state.re");
    if (node.contains("im")) m += kI * matrix_from_json(node.at("im"), dim, "state.im");
    return m;
  }
  if (node.is_array()) return matrix_from_json(node, dim, "state");
  throw ConfigError("state must be a label string or a matrix");
}

Json resolve_params(ModelKind model, const Json& params) {
  const Json& defaults = defaults_for(model);
  std::set<std::string> allowed;
  for (const auto& [key, _] : defaults.items()) allowed.insert(key);
  reject_unknown(params, allowed, "params");
  Json resolved = defaults;
  for (const auto& [key, value] : params.items()) resolved[key] = value;
  parse_model_params(model, resolved);  // validation
  return resolved;
}

ModelParams parse_model_params(ModelKind model, const Json& resolved) {
  try {
    switch (model) {
      case ModelKind::central_pair:
        return parse_central(resolved);
      case ModelKind::collective_decoherence:
        return parse_decoherence(resolved);
      case ModelKind::charger_battery:
        return parse_charger(resolved);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  }
  throw ConfigError("unknown model");
}

ModelParams ScenarioConfig::model_params() const { return parse_model_params(model, params); }

ScenarioConfig parse_config(const Json& doc) {
  reject_unknown(doc,
                 {"id", "model", "params", "t_max", "n_steps", "substeps", "sweep",
                  "battery_hamiltonian", "output"},
                 "scenario");
  for (const char* required : {"model", "t_max", "n_steps"})
    if (!doc.contains(required)) throw ConfigError(std::string("missing required key '") + required + "'");

  ScenarioConfig cfg;
  cfg.model = parse_model_kind(as_string(doc.at("model"), "model"));
  cfg.id = doc.contains("id") ? as_string(doc.at("id"), "id") : std::string(to_string(cfg.model));
  cfg.params = resolve_params(cfg.model, doc.value("params", Json::object()));

  cfg.t_max = as_double(doc.at("t_max"), "t_max");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw ConfigError("field 't_max' must be > 0");
  const int n_steps = as_int(doc.at("n_steps"), "n_steps");
  if (n_steps < 3) throw ConfigError("field 'n_steps' must be >= 3");
  cfg.n_steps = static_cast<std::size_t>(n_steps);
  if (doc.contains("substeps")) {
    cfg.substeps = as_int(doc.at("substeps"), "substeps");
    if (cfg.substeps < 1) throw ConfigError("field 'substeps' must be >= 1");
  }
  if (doc.contains("battery_hamiltonian")) {
    const auto bh = as_string(doc.at("battery_hamiltonian"), "battery_hamiltonian");
    if (bh == "local")
      cfg.battery_hamiltonian = BatteryHamiltonianChoice::local;
    else if (bh == "full")
      cfg.battery_hamiltonian = BatteryHamiltonianChoice::full;
    else
      throw ConfigError("field 'battery_hamiltonian' must be \"local\" or \"full\"");
  }
  if (doc.contains("sweep")) {
    const Json& s = doc.at("sweep");
    reject_unknown(s, {"param", "values"}, "sweep");
    if (!s.contains("param") || !s.contains("values"))
      throw ConfigError("sweep needs 'param' and 'values'");
    SweepSpec sweep;
    sweep.param = as_string(s.at("param"), "sweep.param");
    if (!cfg.params.contains(sweep.param))
      throw ConfigError("sweep parameter '" + sweep.param + "' does not exist on model " +
                        std::string(to_string(cfg.model)));
    if (!s.at("values").is_array() || s.at("values").empty())
      throw ConfigError("sweep 'values' must be a non-empty array");
    for (const auto& v : s.at("values")) {
      Json trial = cfg.params;
      trial[sweep.param] = v;
      parse_model_params(cfg.model, trial);
      sweep.values.push_back(v);
    }
    cfg.sweep = std::move(sweep);
  }
  cfg.output_path = doc.contains("output") ? as_string(doc.at("output"), "output") : "out/" + cfg.id;
  return cfg;
}

ScenarioConfig parse_config_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

Json scenario_to_json(const ScenarioConfig& cfg) {
  Json j{{"id", cfg.id},
         {"model", to_string(cfg.model)},
         {"params", cfg.params},
         {"t_max", cfg.t_max},
         {"n_steps", cfg.n_steps},
         {"substeps", cfg.substeps},
         {"battery_hamiltonian",
          cfg.battery_hamiltonian == BatteryHamiltonianChoice::full ? "full" : "local"},
         {"output", cfg.output_path}};
  if (cfg.sweep) j["sweep"] = Json{{"param", cfg.sweep->param}, {"values", cfg.sweep->values}};
  return j;
}

RunRecord compute_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const TimeGrid grid = cfg.grid();

  std::vector<Variant> variants;
  if (cfg.sweep) {
    for (const auto& v : cfg.sweep->values) {
      Json p = cfg.params;
      p[cfg.sweep->param] = v;
      variants.push_back({value_label(v), parse_model_params(cfg.model, p)});
    }
  } else {
    variants.push_back({"", cfg.model_params()});
  }

  RunRecord record;
  record.scenario_id = cfg.id;
  record.resolved = scenario_to_json(cfg);
  record.engine_version = std::string(kEngineVersion);

  if (cfg.model == ModelKind::charger_battery && cfg.sweep && cfg.sweep->param == "lambda") {
    std::vector<double> lambdas;
    for (const auto& v : variants) lambdas.push_back(std::get<ChargerBatteryConfig>(v.params).lambda);
    const auto base = std::get<ChargerBatteryConfig>(variants.front().params);
    auto runs = sweep_lambda(base, lambdas, grid);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      SeriesResult r{variants[i].label, std::move(runs[i].series), {}};
      r.powers = average_powers(r.series);
      record.results.push_back(std::move(r));
    }
  } else if (cfg.model == ModelKind::central_pair) {
    // Sector pairs already run in parallel inside evolve_reduced.
    for (const auto& v : variants) record.results.push_back(run_variant(cfg, v, grid));
  } else {
    record.results = ordered_parallel_map(
        variants.size(), [&](std::size_t i) { return run_variant(cfg, variants[i], grid); });
  }

  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

RunRecord run_scenario(const ScenarioConfig& cfg) {
  RunRecord record = compute_scenario(cfg);
  write_outputs(record, cfg.output_path);
  return record;
}

OutputPaths output_paths(const std::string& base) {
  return {base + "_timeseries.csv", base + "_segments.csv", base + "_run.json"};
}

std::string timeseries_csv(const RunRecord& record) {
  std::string out(kTimeseriesHeader);
  out += '\n';
  for (const auto& r : record.results)
    for (const auto& s : r.series) {
      out += record.scenario_id;
      out += ',';
      out += r.sweep_value;
      for (double v : {s.t, s.energy, s.ergotropy, s.ergotropy_incoherent, s.ergotropy_coherent,
                       s.power_inst, s.power_charging}) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  return out;
}

std::string segments_csv(const RunRecord& record) {
  std::string out(kSegmentsHeader);
  out += '\n';
  for (const auto& r : record.results)
    for (const auto& seg : r.powers.segments) {
      out += record.scenario_id + ',' + r.sweep_value + ',' + format_double(seg.t_start) + ',' +
             format_double(seg.t_end) + ',' + std::string(to_string(seg.kind)) + ',' +
             format_double(seg.avg_power) + '\n';
    }
  return out;
}

Json record_json(const RunRecord& record) {
  Json aggregates = Json::array();
  for (const auto& r : record.results)
    aggregates.push_back({{"sweep_value", r.sweep_value},
                          {"rows", r.series.size()},
                          {"avg_charging", r.powers.avg_charging},
                          {"avg_discharging", r.powers.avg_discharging},
                          {"charging_time", r.powers.charging_time},
                          {"discharging_time", r.powers.discharging_time},
                          {"segments", r.powers.segments.size()}});
  return Json{{"scenario_id", record.scenario_id},
              {"engine_version", record.engine_version},
              {"wall_time_s", record.wall_time_s},
              {"resolved", record.resolved},
              {"power_aggregates", aggregates}};
}

OutputPaths write_outputs(const RunRecord& record, const std::string& base) {
  const auto paths = output_paths(base);
  write_atomic(paths.timeseries, timeseries_csv(record));
  write_atomic(paths.segments, segments_csv(record));
  write_atomic(paths.record, record_json(record).dump(2) + "\n");
  return paths;
}

ScenarioConfig resolve_scenario(std::string_view name_or_path) {
  for (const auto& p : preset_list())
    if (p.name == name_or_path) return preset(name_or_path);
  const std::filesystem::path path{std::string(name_or_path)};
  if (std::filesystem::exists(path)) return load_config(path);
  throw ConfigError("'" + std::string(name_or_path) + "' is neither a preset nor a config file");
}

std::vector<Json> parse_sweep_values(std::string_view csv) {
  std::vector<Json> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    std::string item(csv.substr(pos, comma == std::string_view::npos ? csv.npos : comma - pos));
    // trim
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    if (item.empty()) throw ConfigError("empty value in --values list");
    double d = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), d);
    if (res.ec == std::errc() && res.ptr == item.data() + item.size()) {
      if (item.find_first_of(".eE") == std::string::npos)
        out.emplace_back(std::stoll(item));
      else
        out.emplace_back(d);
    } else {
      out.emplace_back(item);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace qbattery
