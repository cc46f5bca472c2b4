#include "qbattery/charger_battery.hpp"

#include <cmath>

namespace qbattery {

namespace {

Matrix xy_exchange(int a, int b, int n) {
  using namespace pauli;
  return embed_qubit_operator(x(), a, n) * embed_qubit_operator(x(), b, n) +
         embed_qubit_operator(y(), a, n) * embed_qubit_operator(y(), b, n);
}

// Chain terms on an n-qubit register whose chain occupies sites offset..offset+N-1.
Matrix chain_terms(const ChargerBatteryConfig& cfg, int offset, int n) {
  using namespace pauli;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  const int bonds = cfg.boundary == ChainBoundary::periodic ? cfg.N : cfg.N - 1;
  const double jx = 0.5 * (1.0 + cfg.gamma), jy = 0.5 * (1.0 - cfg.gamma);
  for (int l = 0; l < bonds; ++l) {
    const int a = offset + l, b = offset + (l + 1) % cfg.N;
    h += jx * embed_qubit_operator(x(), a, n) * embed_qubit_operator(x(), b, n);
    h += jy * embed_qubit_operator(y(), a, n) * embed_qubit_operator(y(), b, n);
  }
  for (int l = 0; l < cfg.N; ++l) h -= cfg.lambda * embed_qubit_operator(z(), offset + l, n);
  return 0.5 * cfg.omega_EC * h;
}

double inverse_temperature(double T) { return std::isinf(T) ? 0.0 : 1.0 / T; }

}  // namespace

ChargerBatteryConfig::ChargerBatteryConfig()
    : initial_charger(Matrix::Zero(2, 2)), initial_battery(Matrix::Constant(2, 2, 0.5)) {
  initial_charger(0, 0) = 1.0;
}

void ChargerBatteryConfig::validate() const {
  if (N < 2) throw ConfigError("chain length N must be >= 2");
  if (M < 1) throw ConfigError("bath size M must be >= 1");
  if (!(T_C > 0.0) || !(T_B > 0.0)) throw ConfigError("temperatures must be > 0 (or inf)");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  for (double v : {omega_C, omega_B, omega_EC, omega_EB, g_CB, g_CEC, g_BEB, lambda})
    if (!std::isfinite(v)) throw ConfigError("charger-battery parameters must be finite");
  if (2 + N + M > kMaxChargerBatteryQubits)
    throw ConfigError("total dimension exceeds the 2^14 size guard");
  for (const Matrix* m : {&initial_charger, &initial_battery}) {
    if (m->rows() != 2 || m->cols() != 2)
      throw ConfigError("initial charger/battery states must be 2x2");
    try {
      DensityMatrix check(*m);
    } catch (const InvariantError& e) {
      throw ConfigError(std::string("initial qubit state: ") + e.what());
    }
  }
}

HermitianObservable build_chain_hamiltonian(const ChargerBatteryConfig& cfg) {
  if (cfg.N < 2) throw ConfigError("chain length N must be >= 2");
  return HermitianObservable(chain_terms(cfg, 0, cfg.N));
}

HermitianObservable build_bath_hamiltonian(const ChargerBatteryConfig& cfg) {
  const Eigen::Index dim = Eigen::Index{1} << cfg.M;
  Matrix h = Matrix::Zero(dim, dim);
  for (int k = 0; k < cfg.M; ++k) h += embed_qubit_operator(pauli::z(), k, cfg.M);
  return HermitianObservable(0.5 * cfg.omega_EB * h);
}

HermitianObservable battery_hamiltonian(const ChargerBatteryConfig& cfg) {
  return HermitianObservable(0.5 * cfg.omega_B * pauli::z());
}

HermitianObservable build_total_hamiltonian(const ChargerBatteryConfig& cfg) {
  using namespace pauli;
  cfg.validate();
  const int n = 2 + cfg.N + cfg.M;
  constexpr int charger = 0, battery = 1;
  const int chain0 = 2, bath0 = 2 + cfg.N;

  Matrix h = 0.5 * cfg.omega_C * embed_qubit_operator(z(), charger, n) +
             0.5 * cfg.omega_B * embed_qubit_operator(z(), battery, n);
  h += cfg.g_CB * xy_exchange(charger, battery, n);
  h += chain_terms(cfg, chain0, n);
  for (int k = 0; k < cfg.M; ++k) {
    h += 0.5 * cfg.omega_EB * embed_qubit_operator(z(), bath0 + k, n);
    h += cfg.g_BEB * xy_exchange(battery, bath0 + k, n);
  }
  for (int l = 0; l < cfg.N; ++l) h += cfg.g_CEC * xy_exchange(charger, chain0 + l, n);
  return HermitianObservable(std::move(h));
}

ChargerBatteryTrajectory evolve_battery(const ChargerBatteryConfig& cfg,
                                        std::span<const double> grid) {
  cfg.validate();
  require_monotone(grid);
  const auto chain_state =
      thermal_state(build_chain_hamiltonian(cfg), inverse_temperature(cfg.T_C));
  const auto bath_state = thermal_state(build_bath_hamiltonian(cfg), inverse_temperature(cfg.T_B));
  const Matrix rho0 =
      kron({cfg.initial_charger, cfg.initial_battery, chain_state.matrix(), bath_state.matrix()});

  const auto spectrum = herm_eigen(build_total_hamiltonian(cfg));
  std::vector<Matrix> reduced(grid.size(), Matrix::Zero(4, 4));
  accumulate_leading_reduced(spectrum, rho0, 4, grid, reduced);

  ChargerBatteryTrajectory out;
  out.battery.reserve(grid.size());
  out.charger_battery.reserve(grid.size());
  const std::vector<int> dims{2, 2};
  const std::vector<int> keep_battery{1};
  for (Matrix& rho : reduced) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    DensityMatrix cb(std::move(rho), dims);
    out.battery.push_back(partial_trace(cb, keep_battery));
    out.charger_battery.push_back(std::move(cb));
  }
  return out;
}

std::vector<LambdaSeries> sweep_lambda(const ChargerBatteryConfig& cfg,
                                       std::span<const double> lambdas,
                                       std::span<const double> grid) {
  if (lambdas.empty()) throw ConfigError("lambda sweep needs at least one value");
  const auto hb = battery_hamiltonian(cfg);
  return ordered_parallel_map(lambdas.size(), [&](std::size_t i) {
    ChargerBatteryConfig run = cfg;
    run.lambda = lambdas[i];
    const auto traj = evolve_battery(run, grid);
    return LambdaSeries{lambdas[i], series_metrics(traj.battery, hb, grid)};
  });
}

}  // namespace qbattery
