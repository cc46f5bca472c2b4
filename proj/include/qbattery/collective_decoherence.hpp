// Two two-level atoms sharing a squeezed thermal radiation reservoir. The
// inter-atomic separation k0*r12 controls collective versus independent decay.
#pragma once

#include "qbattery/quantum_core.hpp"

#include <functional>

namespace qbattery {

struct DecoherenceConfig {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double Gamma1 = 0.05;
  double Gamma2 = 0.05;
  double k0r12 = 1.0;
  double mu_dot_r = 0.0;  // cosine between dipole orientation and separation
  double T = 0.0;
  double r_sq = 0.0;
  double Phi = 0.0;
  bool vacuum = false;             // forces N~ = M~ = 0
  bool include_dipole_shift = true;
  Matrix initial_state = Matrix::Identity(4, 4) * 0.25;

  void validate() const;
};

struct LindbladCoefficients {
  double N_tilde = 0.0;
  Complex M_tilde{0.0, 0.0};
  Eigen::Matrix2d Gamma = Eigen::Matrix2d::Zero();
  double Omega12 = 0.0;
};

// F(k0 r): normalised collective damping; tends to 1 as k0 r -> 0.
double collective_damping_profile(double k0r, double mu_dot_r);

// Dipole-dipole frequency shift Omega_12 = Omega_21.
double dipole_shift(const DecoherenceConfig& cfg);

struct SqueezingCoefficients {
  double N_tilde = 0.0;
  Complex M_tilde{0.0, 0.0};
};

// Thermal occupation at omega0, dressed by squeezing (r, Phi).
SqueezingCoefficients squeezing_coeffs(double T, double r_sq, double Phi, double omega0);

double thermal_occupation(double T, double omega0);

LindbladCoefficients lindblad_coefficients(const DecoherenceConfig& cfg);

// Coherent Hamiltonian with the dipole shift when enabled.
HermitianObservable system_hamiltonian(const DecoherenceConfig& cfg, const LindbladCoefficients& c);
// omega1/2 sz1 + omega2/2 sz2.
HermitianObservable local_hamiltonian(const DecoherenceConfig& cfg);

// Right-hand side of the squeezed-bath master equation, term by term.
Matrix lindblad_rhs(const Matrix& rho, const DecoherenceConfig& cfg,
                    const LindbladCoefficients& coeffs);

// Linear generator of lindblad_rhs acting on column-stacked rho (16x16).
Matrix lindblad_superoperator(const DecoherenceConfig& cfg, const LindbladCoefficients& coeffs);

struct LindbladTrajectory {
  std::vector<DensityMatrix> states;
  // Measured on the raw integrator output, before the per-sample repair.
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  int substeps_used = 1;
};

inline constexpr double kLindbladPositivityLimit = 1e-6;

// Fixed-step RK4. Substeps are raised, if needed, so that h * ||L||_1 <= 0.1.
// Throws InvariantError if an eigenvalue drops below -1e-6.
LindbladTrajectory evolve(const DecoherenceConfig& cfg, std::span<const double> grid,
                          int substeps = 10);
LindbladTrajectory evolve(const DecoherenceConfig& cfg, const LindbladCoefficients& coeffs,
                          std::span<const double> grid, int substeps = 10);

// Same integrator driving an arbitrary 4x4 generator; used for diagnostics.
LindbladTrajectory evolve_with(const std::function<Matrix(const Matrix&)>& generator,
                               const Matrix& rho0, std::span<const double> grid, int substeps);

}  // namespace qbattery
