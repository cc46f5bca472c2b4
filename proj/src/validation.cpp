#include "qbattery/validation.hpp"

#include "qbattery/central_pair.hpp"
#include "qbattery/collective_decoherence.hpp"
#include "qbattery/ergotropy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qbattery {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult make(std::string name, double measured, double tol, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tol;
  r.passed = std::isfinite(measured) && measured <= tol;
  r.detail = std::move(detail);
  return r;
}

DecoherenceConfig squeezed_pair(double k0r) {
  DecoherenceConfig cfg;
  cfg.omega1 = cfg.omega2 = 1.0;
  cfg.Gamma1 = cfg.Gamma2 = 0.05;
  cfg.k0r12 = k0r;
  cfg.T = 5.0;
  cfg.r_sq = 0.5;
  cfg.Phi = std::numbers::pi / 4.0;
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd psi(4);
  psi << s, s, 0, 0;  // |0+>
  cfg.initial_state = psi * psi.adjoint();
  return cfg;
}

// Single-qubit squeezed-bath generator, written out by hand.
Generator single_qubit_generator(double omega, double gamma, double n, Complex m) {
  using namespace pauli;
  const Matrix h = 0.5 * omega * z();
  const Matrix up = raising(), dn = lowering();
  return [=](const Matrix& rho) -> Matrix {
    Matrix out = -kI * (h * rho - rho * h);
    out -= 0.5 * gamma * (1.0 + n) * (up * dn * rho + rho * up * dn - 2.0 * dn * rho * up);
    out -= 0.5 * gamma * n * (dn * up * rho + rho * dn * up - 2.0 * up * rho * dn);
    out -= gamma * m * (up * rho * up);
    out -= gamma * std::conj(m) * (dn * rho * dn);
    return out;
  };
}

}  // namespace

Matrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

CheckResult check_generator_trace(const Generator& generator, Eigen::Index dim, int n_states,
                                  std::uint64_t seed, std::string name) {
  std::mt19937_64 rng(seed);
  double worst_trace = 0.0, worst_herm = 0.0;
  for (int k = 0; k < n_states; ++k) {
    const Matrix rho = random_density_matrix(dim, rng);
    const Matrix d = generator(rho);
    worst_trace = std::max(worst_trace, std::abs(d.trace()));
    worst_herm = std::max(worst_herm, max_abs(d - d.adjoint()));
  }
  return make(std::move(name), std::max(worst_trace, worst_herm), 1e-12,
              "max |Tr L(rho)| = " + fmt(worst_trace) + ", max Hermiticity defect = " +
                  fmt(worst_herm) + " over " + std::to_string(n_states) + " states");
}

CheckResult check_sector_vs_brute_force(bool dm) {
  CentralPairConfig cfg;
  cfg.omega1 = 1.15;
  cfg.omega2 = 1.25;
  cfg.omega_a = 1.1;
  cfg.omega_b = 1.2;
  cfg.eps1 = cfg.eps2 = 0.5;
  cfg.g12 = 0.75;
  cfg.beta_a = 4.0;
  cfg.beta_b = 1.0;
  cfg.M = cfg.N = 2;
  cfg.interaction = dm ? PairInteraction::dm : PairInteraction::xxx;
  cfg.initial_state = Matrix::Zero(4, 4);
  cfg.initial_state(0, 0) = 1.0;
  const auto grid = uniform_grid(10.0, 100);
  const auto fast = evolve_reduced(cfg, grid);
  const auto slow = brute_force_evolve(cfg, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    worst = std::max(worst, trace_distance(fast[k].matrix(), slow[k].matrix()));
  return make(dm ? "sector_vs_brute_force_dm" : "sector_vs_brute_force_xxx", worst, 1e-9,
              "M=N=2, t in [0,10], max trace distance");
}

CheckResult check_trace_drift() {
  const auto traj = evolve(squeezed_pair(0.1), uniform_grid(50.0, 500), 10);
  return make("trace_drift", traj.max_trace_drift, 1e-8,
              "squeezed bath, t in [0,50], max |Tr rho - 1| before repair");
}

CheckResult check_factorization() {
  DecoherenceConfig cfg = squeezed_pair(1.2);
  auto coeffs = lindblad_coefficients(cfg);
  coeffs.Gamma(0, 1) = coeffs.Gamma(1, 0) = 0.0;
  coeffs.Omega12 = 0.0;
  const auto grid = uniform_grid(50.0, 500);
  const auto joint = evolve(cfg, coeffs, grid, 10);

  Matrix q0 = Matrix::Zero(2, 2), q1 = Matrix::Constant(2, 2, 0.5);
  q0(0, 0) = 1.0;
  const auto a = evolve_with(
      single_qubit_generator(cfg.omega1, cfg.Gamma1, coeffs.N_tilde, coeffs.M_tilde), q0, grid, 10);
  const auto b = evolve_with(
      single_qubit_generator(cfg.omega2, cfg.Gamma2, coeffs.N_tilde, coeffs.M_tilde), q1, grid, 10);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    worst = std::max(worst, trace_distance(joint.states[k].matrix(),
                                           kron(a.states[k].matrix(), b.states[k].matrix())));
  return make("factorization", worst, 1e-8,
              "cross damping zeroed vs product of single-qubit runs, max trace distance");
}

CheckResult check_profile_limits() {
  const double near = std::abs(collective_damping_profile(1e-3, 0.0) - 1.0);
  const double node =
      std::abs(collective_damping_profile(2.0 * std::numbers::pi, 0.0) -
               3.0 / (8.0 * std::numbers::pi * std::numbers::pi));
  CheckResult r = make("profile_limits", std::max(near / 1e-6, node / 1e-12), 1.0,
                       "|F(1e-3,0) - 1| = " + fmt(near) + " (tol 1e-6), |F(2pi,0) - 3/(8pi^2)| = " +
                           fmt(node) + " (tol 1e-12); measured is the worst tol ratio");
  return r;
}

CheckResult check_squeezing_inequality() {
  double worst = -1.0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const auto c = squeezing_coeffs(0.5 * i, 0.1 * j, std::numbers::pi / 4.0, 1.0);
      worst = std::max(worst, std::norm(c.M_tilde) - c.N_tilde * (c.N_tilde + 1.0));
    }
  return make("squeezing_inequality", worst, 1e-12,
              "max |M|^2 - N(N+1) over T in [0,10] x r in [0,2], 441 points");
}

CheckResult check_rk4_order() {
  const double omega = 1.3;
  const HermitianObservable h(0.5 * omega * pauli::x() + 0.3 * pauli::z());
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;
  const auto rhs = [&](double, const Matrix& r) -> Matrix {
    return -kI * (h.matrix() * r - r * h.matrix());
  };
  const TimeGrid grid{0.0, 2.0};
  const Matrix exact = UnitaryEvolution(h).conjugate(rho0, 2.0);
  const double coarse = max_abs(integrate_ode(rhs, rho0, grid, 20).back() - exact);
  const double fine = max_abs(integrate_ode(rhs, rho0, grid, 40).back() - exact);
  const double ratio = coarse / fine;
  CheckResult r;
  r.name = "rk4_order";
  r.measured = ratio;
  r.tolerance = 12.0;
  r.passed = ratio >= 12.0;
  r.detail = "error ratio on step halving (>= 12 required), errors " + fmt(coarse) + " / " + fmt(fine);
  return r;
}

CheckResult check_metrics_split() {
  std::mt19937_64 rng(20261014);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const Eigen::Index d = k % 2 ? 4 : 2;
    const DensityMatrix rho(random_density_matrix(d, rng));
    const Matrix a = random_density_matrix(d, rng) - Matrix::Identity(d, d) / double(d);
    const HermitianObservable h(0.5 * (a + a.adjoint()));
    const double w = ergotropy(rho, h), wi = incoherent_ergotropy(rho, h),
                 wc = coherent_ergotropy(rho, h);
    worst = std::max({worst, -w, -wi, wi - w, std::abs(w - wi - wc)});
  }
  return make("metrics_split", worst, 1e-10,
              "worst violation of W >= 0, 0 <= Wi <= W, W = Wi + Wc on 2000 random pairs");
}

const std::vector<ValidationCheck>& validation_checks() {
  static const std::vector<ValidationCheck> checks = {
      {"sector_vs_brute_force_xxx", [] { return check_sector_vs_brute_force(false); }},
      {"sector_vs_brute_force_dm", [] { return check_sector_vs_brute_force(true); }},
      {"generator_trace",
       [] {
         const auto cfg = squeezed_pair(0.1);
         const auto coeffs = lindblad_coefficients(cfg);
         return check_generator_trace(
             [&](const Matrix& r) { return lindblad_rhs(r, cfg, coeffs); }, 4, 1000, 7);
       }},
      {"trace_drift", check_trace_drift},
      {"factorization", check_factorization},
      {"profile_limits", check_profile_limits},
      {"squeezing_inequality", check_squeezing_inequality},
      {"rk4_order", check_rk4_order},
      {"metrics_split", check_metrics_split},
  };
  return checks;
}

std::vector<CheckResult> run_validation(std::string_view filter) {
  std::vector<CheckResult> out;
  for (const auto& c : validation_checks()) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    try {
      out.push_back(c.run());
    } catch (const std::exception& e) {
      CheckResult r;
      r.name = c.name;
      r.measured = std::numeric_limits<double>::quiet_NaN();
      r.detail = std::string("threw: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace qbattery
