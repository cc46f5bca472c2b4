// Two coupled central spins, each flip-flop coupled to its own finite thermal
// spin bath. The Hamiltonian depends on each bath only through its collective
// spin, so the dynamics split into independent Dicke sectors.
#pragma once

#include "qbattery/quantum_core.hpp"

#include <cstddef>
#include <vector>

namespace qbattery {

enum class PairInteraction { xxx, dm };

struct CentralPairConfig {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double omega_a = 1.0;
  double omega_b = 1.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double g12 = 0.0;
  PairInteraction interaction = PairInteraction::xxx;
  double beta_a = 0.0;
  double beta_b = 0.0;
  int M = 1;
  int N = 1;
  Matrix initial_state = Matrix::Identity(4, 4) * 0.25;

  // Throws ConfigError on bath sizes < 1, negative or NaN inverse
  // temperatures, or an initial state that is not a valid two-qubit state.
  void validate() const;
};

// One irreducible total-spin block of an m-spin bath.
struct DickeSector {
  int twice_j = 0;
  std::size_t multiplicity = 0;
  Matrix jx, jy, jz;

  double j() const { return 0.5 * twice_j; }
  Eigen::Index dim() const { return twice_j + 1; }
  // Jz eigenvalue of basis state k: j, j-1, ..., -j.
  double m(Eigen::Index k) const { return j() - static_cast<double>(k); }
};

// Spin-j matrices in the |j, m> basis ordered m = j, ..., -j.
DickeSector spin_operators(int twice_j, std::size_t multiplicity = 1);

std::vector<DickeSector> dicke_sectors(int m);

// Inter-qubit coupling V on the two central spins.
Matrix pair_interaction(PairInteraction kind, double g12);

// omega1/2 sz1 + omega2/2 sz2.
HermitianObservable local_battery_hamiltonian(const CentralPairConfig& cfg);
// Local part plus the inter-qubit coupling.
HermitianObservable full_battery_hamiltonian(const CentralPairConfig& cfg);

// Hamiltonian on [spin1, spin2, bath1 sector, bath2 sector].
HermitianObservable sector_hamiltonian(const CentralPairConfig& cfg, const DickeSector& s1,
                                       const DickeSector& s2);

// Boltzmann weights of the Jz ladder of one sector, normalised by the
// partition function of the full 2^m bath space.
std::vector<double> sector_populations(const DickeSector& s, double omega, double beta, int m);

std::vector<DensityMatrix> evolve_reduced(const CentralPairConfig& cfg,
                                          std::span<const double> grid);

// Literal evolution on the 2^(2+M+N) product space; limited to M + N <= 8.
// For XXX coupling the total magnetisation must stay conserved to 1e-9,
// otherwise InvariantError is thrown.
std::vector<DensityMatrix> brute_force_evolve(const CentralPairConfig& cfg,
                                              std::span<const double> grid);

}  // namespace qbattery
