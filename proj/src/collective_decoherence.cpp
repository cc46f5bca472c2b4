#include "qbattery/collective_decoherence.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace qbattery {

namespace {

// (x cos x - sin x) / x^3, which cancels badly for small x.
double dipole_radial_term(double x) {
  if (x < 0.05) {
    const double x2 = x * x;
    return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0;
  }
  return (x * std::cos(x) - std::sin(x)) / (x * x * x);
}

double sinc(double x) {
  if (x < 0.05) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
  }
  return std::sin(x) / x;
}

struct LadderOps {
  std::array<Matrix, 2> up;
  std::array<Matrix, 2> down;
};

const LadderOps& ladder_ops() {
  static const LadderOps ops = [] {
    using namespace pauli;
    LadderOps o;
    o.up = {kron(raising(), identity()), kron(identity(), raising())};
    o.down = {kron(lowering(), identity()), kron(identity(), lowering())};
    return o;
  }();
  return ops;
}

LindbladTrajectory repair_and_collect(const std::vector<Matrix>& raw, Eigen::Index dim) {
  LindbladTrajectory traj;
  traj.states.reserve(raw.size());
  traj.min_eigenvalue = std::numeric_limits<double>::infinity();
  const std::vector<int> dims = dim == 4 ? std::vector<int>{2, 2} : std::vector<int>{int(dim)};
  StateTolerance tol;
  tol.positivity = kLindbladPositivityLimit;
  for (const Matrix& y : raw) {
    Matrix rho = y;
    if (rho.cols() == 1) rho = Eigen::Map<const Matrix>(y.data(), dim, dim);
    const Complex tr = rho.trace();
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(tr - 1.0));
    Matrix herm = 0.5 * (rho + rho.adjoint());
    herm /= herm.trace().real();
    const double lmin = min_eigenvalue(herm);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, lmin);
    if (lmin < -kLindbladPositivityLimit) {
      std::ostringstream os;
      os << "state lost positivity (eigenvalue " << lmin << "); reduce the step size";
      throw InvariantError(os.str());
    }
    traj.states.emplace_back(std::move(herm), dims, tol);
  }
  return traj;
}

}  // namespace

void DecoherenceConfig::validate() const {
  if (!(Gamma1 >= 0.0) || !(Gamma2 >= 0.0)) throw ConfigError("Gamma1, Gamma2 must be >= 0");
  if (!(T >= 0.0)) throw ConfigError("T must be >= 0");
  if (!(k0r12 > 0.0)) throw ConfigError("k0r12 must be > 0");
  if (!(mu_dot_r >= -1.0 && mu_dot_r <= 1.0)) throw ConfigError("mu_dot_r must lie in [-1, 1]");
  for (double v : {omega1, omega2, r_sq, Phi, Gamma1, Gamma2, k0r12})
    if (!std::isfinite(v)) throw ConfigError("decoherence parameters must be finite");
  if (initial_state.rows() != 4 || initial_state.cols() != 4)
    throw ConfigError("initial_state must be a two-qubit (4x4) density matrix");
  try {
    DensityMatrix check(initial_state, std::vector<int>{2, 2});
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("initial_state: ") + e.what());
  }
}

double collective_damping_profile(double k0r, double mu_dot_r) {
  if (!(k0r > 0.0)) throw ConfigError("k0r must be > 0");
  const double a = 1.0 - mu_dot_r * mu_dot_r;
  const double b = 1.0 - 3.0 * mu_dot_r * mu_dot_r;
  return 1.5 * (a * sinc(k0r) + b * dipole_radial_term(k0r));
}

double dipole_shift(const DecoherenceConfig& cfg) {
  const double x = cfg.k0r12;
  if (!(x > 0.0)) throw ConfigError("k0r12 must be > 0");
  const double mu2 = cfg.mu_dot_r * cfg.mu_dot_r;
  const double bracket = -(1.0 - mu2) * std::cos(x) / x +
                         (1.0 - 3.0 * mu2) * (std::sin(x) / (x * x) + std::cos(x) / (x * x * x));
  return 0.75 * std::sqrt(cfg.Gamma1 * cfg.Gamma2) * bracket;
}

double thermal_occupation(double T, double omega0) {
  if (!(T >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(omega0 / T);
}

SqueezingCoefficients squeezing_coeffs(double T, double r_sq, double Phi, double omega0) {
  const double n_th = thermal_occupation(T, omega0);
  const double ch = std::cosh(r_sq), sh = std::sinh(r_sq);
  SqueezingCoefficients c;
  c.N_tilde = n_th * (ch * ch + sh * sh) + sh * sh;
  c.M_tilde = -0.5 * std::sinh(2.0 * r_sq) * std::polar(1.0, Phi) * (2.0 * n_th + 1.0);
  return c;
}

LindbladCoefficients lindblad_coefficients(const DecoherenceConfig& cfg) {
  cfg.validate();
  LindbladCoefficients c;
  if (!cfg.vacuum) {
    const auto sq = squeezing_coeffs(cfg.T, cfg.r_sq, cfg.Phi, 0.5 * (cfg.omega1 + cfg.omega2));
    c.N_tilde = sq.N_tilde;
    c.M_tilde = sq.M_tilde;
  }
  const double cross =
      std::sqrt(cfg.Gamma1 * cfg.Gamma2) * collective_damping_profile(cfg.k0r12, cfg.mu_dot_r);
  c.Gamma << cfg.Gamma1, cross, cross, cfg.Gamma2;
  c.Omega12 = dipole_shift(cfg);
  return c;
}

HermitianObservable local_hamiltonian(const DecoherenceConfig& cfg) {
  using namespace pauli;
  return HermitianObservable(0.5 * cfg.omega1 * kron(z(), identity()) +
                             0.5 * cfg.omega2 * kron(identity(), z()));
}

HermitianObservable system_hamiltonian(const DecoherenceConfig& cfg,
                                       const LindbladCoefficients& c) {
  Matrix h = local_hamiltonian(cfg).matrix();
  if (cfg.include_dipole_shift) {
    const auto& ops = ladder_ops();
    h += c.Omega12 * (ops.up[0] * ops.down[1] + ops.up[1] * ops.down[0]);
  }
  return HermitianObservable(std::move(h));
}

Matrix lindblad_rhs(const Matrix& rho, const DecoherenceConfig& cfg,
                    const LindbladCoefficients& c) {
  if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("lindblad_rhs expects a 4x4 state");
  const auto& ops = ladder_ops();
  const auto& up = ops.up;
  const auto& dn = ops.down;
  const Matrix h = system_hamiltonian(cfg, c).matrix();

  Matrix out = -kI * (h * rho - rho * h);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double g = c.Gamma(i, j);
      if (g == 0.0) continue;
      const Matrix ud = up[i] * dn[j];
      out -= 0.5 * g * (1.0 + c.N_tilde) * (rho * ud + ud * rho - 2.0 * dn[j] * rho * up[i]);
      const Matrix du = dn[i] * up[j];
      out -= 0.5 * g * c.N_tilde * (rho * du + du * rho - 2.0 * up[j] * rho * dn[i]);
      const Matrix uu = up[i] * up[j];
      out += 0.5 * g * c.M_tilde * (rho * uu + uu * rho - 2.0 * up[j] * rho * up[i]);
      const Matrix dd = dn[i] * dn[j];
      out += 0.5 * g * std::conj(c.M_tilde) * (rho * dd + dd * rho - 2.0 * dn[j] * rho * dn[i]);
    }
  return out;
}

Matrix lindblad_superoperator(const DecoherenceConfig& cfg, const LindbladCoefficients& c) {
  Matrix l(16, 16);
  for (Eigen::Index col = 0; col < 16; ++col) {
    Matrix basis = Matrix::Zero(4, 4);
    basis(col % 4, col / 4) = 1.0;  // column-major vec
    const Matrix image = lindblad_rhs(basis, cfg, c);
    l.col(col) = Eigen::Map<const Eigen::VectorXcd>(image.data(), 16);
  }
  return l;
}

LindbladTrajectory evolve(const DecoherenceConfig& cfg, std::span<const double> grid,
                          int substeps) {
  return evolve(cfg, lindblad_coefficients(cfg), grid, substeps);
}

LindbladTrajectory evolve(const DecoherenceConfig& cfg, const LindbladCoefficients& coeffs,
                          std::span<const double> grid, int substeps) {
  cfg.validate();
  require_monotone(grid);
  if (substeps < 1) throw ConfigError("substeps must be >= 1");
  const Matrix l = lindblad_superoperator(cfg, coeffs);

  double widest = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) widest = std::max(widest, grid[k] - grid[k - 1]);
  const double norm1 = l.cwiseAbs().colwise().sum().maxCoeff();
  const int stable = static_cast<int>(std::ceil(widest * norm1 / 0.1));
  const int used = std::max(substeps, stable);

  const Matrix y0 = Eigen::Map<const Eigen::VectorXcd>(cfg.initial_state.data(), 16);
  const auto raw =
      integrate_ode([&](double, const Matrix& y) -> Matrix { return l * y; }, y0, grid, used);
  auto traj = repair_and_collect(raw, 4);
  traj.substeps_used = used;
  return traj;
}

LindbladTrajectory evolve_with(const std::function<Matrix(const Matrix&)>& generator,
                               const Matrix& rho0, std::span<const double> grid, int substeps) {
  const auto raw = integrate_ode([&](double, const Matrix& y) { return generator(y); }, rho0,
                                 grid, substeps);
  auto traj = repair_and_collect(raw, rho0.rows());
  traj.substeps_used = substeps;
  return traj;
}

}  // namespace qbattery
