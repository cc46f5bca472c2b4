// Charger qubit coupled to an anisotropic XY chain in a transverse field and
// exchange-coupled to a battery qubit that sits in a free spin bath.
#pragma once

#include "qbattery/ergotropy.hpp"
#include "qbattery/quantum_core.hpp"

#include <vector>

namespace qbattery {

enum class ChainBoundary { periodic, open };

struct ChargerBatteryConfig {
  double omega_C = 1.5;
  double omega_B = 1.25;
  double omega_EC = 0.7;
  double omega_EB = 0.6;
  double g_CB = 0.05;
  double g_CEC = 0.04;
  double g_BEB = 0.02;
  double gamma = 1.0;
  double lambda = 1.0;
  int N = 3;  // chain length
  int M = 2;  // battery bath size
  double T_C = 0.5;  // +inf allowed
  double T_B = 0.8;
  ChainBoundary boundary = ChainBoundary::periodic;
  Matrix initial_charger;  // defaults to |0><0|
  Matrix initial_battery;  // defaults to |+><+|

  ChargerBatteryConfig();
  void validate() const;
};

inline constexpr int kMaxChargerBatteryQubits = 14;

// (omega_EC / 2) sum_l [(1+g)/2 sx_l sx_{l+1} + (1-g)/2 sy_l sy_{l+1} - lambda sz_l]
HermitianObservable build_chain_hamiltonian(const ChargerBatteryConfig& cfg);
// (omega_EB / 2) sum_k sz_k
HermitianObservable build_bath_hamiltonian(const ChargerBatteryConfig& cfg);
// Factor order [charger, battery, chain 1..N, bath 1..M].
HermitianObservable build_total_hamiltonian(const ChargerBatteryConfig& cfg);
// (omega_B / 2) sz
HermitianObservable battery_hamiltonian(const ChargerBatteryConfig& cfg);

struct ChargerBatteryTrajectory {
  std::vector<DensityMatrix> battery;
  std::vector<DensityMatrix> charger_battery;
};

ChargerBatteryTrajectory evolve_battery(const ChargerBatteryConfig& cfg,
                                        std::span<const double> grid);

struct LambdaSeries {
  double lambda = 0.0;
  MetricsSeries series;
};

// One independent run per entry, output in input order (duplicates kept).
std::vector<LambdaSeries> sweep_lambda(const ChargerBatteryConfig& cfg,
                                       std::span<const double> lambdas,
                                       std::span<const double> grid);

}  // namespace qbattery
