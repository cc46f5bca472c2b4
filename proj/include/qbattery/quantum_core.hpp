// Dense complex linear algebra, state construction and propagation shared by
// every battery model. Units: hbar = k_B = 1.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbattery {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Error categories map one-to-one onto CLI exit codes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double positivity = 1e-9;
};

class HermitianObservable {
 public:
  // Throws DimensionError for non-square or non-Hermitian input.
  explicit HermitianObservable(Matrix m, double tolerance = 1e-12);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

class DensityMatrix {
 public:
  // dims lists subsystem dimensions, slowest-varying first. Validates the
  // state invariants and throws InvariantError on violation.
  DensityMatrix(Matrix m, std::vector<int> dims, const StateTolerance& tol = {});
  // Single subsystem spanning the whole matrix.
  explicit DensityMatrix(Matrix m, const StateTolerance& tol = {});

  const Matrix& matrix() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }
  Eigen::Index dim() const { return m_.rows(); }

  static DensityMatrix pure(const Eigen::VectorXcd& psi, std::vector<int> dims);

 private:
  Matrix m_;
  std::vector<int> dims_;
};

struct SpectralDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // column k pairs with values[k]
};

// Pauli matrices with sigma_z = diag(1, -1); |0> is the excited (+1) state.
namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
Matrix raising();   // |0><1|
Matrix lowering();  // |1><0|
}  // namespace pauli

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron(std::initializer_list<Matrix> factors);

// Places `op` at site `site` of an n-qubit register, identity elsewhere.
Matrix embed_qubit_operator(const Matrix& op, int site, int n_qubits);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
Matrix partial_trace(const Matrix& rho, std::span<const int> dims, std::span<const int> keep);

SpectralDecomposition herm_eigen(const HermitianObservable& h);

Matrix propagator(const HermitianObservable& h, double t);

// Reuses one spectral decomposition for U(t) = exp(-iHt) at many times.
class UnitaryEvolution {
 public:
  explicit UnitaryEvolution(const HermitianObservable& h);
  explicit UnitaryEvolution(SpectralDecomposition spectrum);

  Matrix propagator(double t) const;
  // U(t) rho U(t)^dagger.
  Matrix conjugate(const Matrix& rho, double t) const;
  const SpectralDecomposition& spectrum() const { return spectrum_; }

 private:
  SpectralDecomposition spectrum_;
};

// beta = +infinity gives the uniform mixture over the ground subspace.
DensityMatrix thermal_state(const HermitianObservable& h, double beta);

double expectation(const DensityMatrix& rho, const HermitianObservable& obs);
double expectation(const Matrix& rho, const Matrix& obs);

double trace_distance(const Matrix& a, const Matrix& b);
double min_eigenvalue(const Matrix& hermitian);
double max_abs(const Matrix& m);

using TimeGrid = std::vector<double>;

// n_steps + 1 points from 0 to t_max inclusive.
TimeGrid uniform_grid(double t_max, std::size_t n_steps);
// Throws ConfigError unless strictly increasing.
void require_monotone(std::span<const double> grid);

using MatrixRhs = std::function<Matrix(double, const Matrix&)>;

// Classical RK4 on each grid interval, split into `substeps` equal steps.
std::vector<Matrix> integrate_ode(const MatrixRhs& rhs, const Matrix& y0,
                                  std::span<const double> grid, int substeps = 1);

// Reduced states Tr_rest[U(t) rho0 U(t)^dagger] of the leading tensor factor
// (dimension `kept_dim`) for every time in the grid, using the eigenbasis of
// the generating Hamiltonian. Results are accumulated into `out`, which must
// hold grid.size() matrices of size kept_dim.
void accumulate_leading_reduced(const SpectralDecomposition& spectrum, const Matrix& rho0,
                                Eigen::Index kept_dim, std::span<const double> grid,
                                std::vector<Matrix>& out);

// Number of worker threads used by parallel maps; 0 means hardware default.
void set_worker_threads(unsigned n);
unsigned worker_threads();

// Evaluates f(i) for i in [0, n) possibly concurrently; results come back in
// index order so any later reduction is deterministic.
template <typename Fn>
auto ordered_parallel_map(std::size_t n, Fn&& f) -> std::vector<decltype(f(std::size_t{}))>;

}  // namespace qbattery

#include "qbattery/detail/parallel.hpp"
