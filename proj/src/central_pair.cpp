#include "qbattery/central_pair.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace qbattery {

namespace {

constexpr double kMaxSectorEntries = 1e6;

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

Matrix two_qubit(const Matrix& a, const Matrix& b) { return kron(a, b); }

// Boltzmann factor exp(-beta * gap) that treats beta = inf, gap = 0 as 1.
double boltzmann(double beta, double gap) {
  if (gap <= 0.0) return 1.0;
  if (std::isinf(beta)) return 0.0;
  return std::exp(-beta * gap);
}

}  // namespace

void CentralPairConfig::validate() const {
  if (M < 1 || N < 1) throw ConfigError("bath sizes M and N must be >= 1");
  if (std::isnan(beta_a) || beta_a < 0.0) throw ConfigError("beta_a must be >= 0");
  if (std::isnan(beta_b) || beta_b < 0.0) throw ConfigError("beta_b must be >= 0");
  for (double v : {omega1, omega2, omega_a, omega_b, eps1, eps2, g12})
    if (!std::isfinite(v)) throw ConfigError("central-pair couplings must be finite reals");
  if (initial_state.rows() != 4 || initial_state.cols() != 4)
    throw ConfigError("initial_state must be a two-qubit (4x4) density matrix");
  try {
    DensityMatrix check(initial_state, std::vector<int>{2, 2});
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("initial_state: ") + e.what());
  }
}

DickeSector spin_operators(int twice_j, std::size_t multiplicity) {
  if (twice_j < 0) throw DimensionError("spin must be non-negative");
  DickeSector s;
  s.twice_j = twice_j;
  s.multiplicity = multiplicity;
  const Eigen::Index d = s.dim();
  const double j = s.j();
  Matrix jp = Matrix::Zero(d, d);
  s.jz = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double m = s.m(k);
    s.jz(k, k) = m;
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Matrix jm = jp.adjoint();
  s.jx = 0.5 * (jp + jm);
  s.jy = (jp - jm) / (2.0 * kI);
  return s;
}

std::vector<DickeSector> dicke_sectors(int m) {
  if (m < 1) throw ConfigError("bath size must be >= 1");
  if (m > 62) throw ConfigError("bath size too large for exact multiplicities");
  std::vector<DickeSector> out;
  for (int twice_j = m; twice_j >= 0; twice_j -= 2) {
    const int k = (m - twice_j) / 2;
    const std::uint64_t mult = binomial(m, k) - binomial(m, k - 1);
    out.push_back(spin_operators(twice_j, mult));
  }
  return out;
}

Matrix pair_interaction(PairInteraction kind, double g12) {
  using namespace pauli;
  if (kind == PairInteraction::xxx)
    return g12 * (two_qubit(x(), x()) + two_qubit(y(), y()) + two_qubit(z(), z()));
  // Equal strengths on all three antisymmetric components.
  return g12 * ((two_qubit(x(), y()) - two_qubit(y(), x())) +
                (two_qubit(y(), z()) - two_qubit(z(), y())) +
                (two_qubit(z(), x()) - two_qubit(x(), z())));
}

HermitianObservable local_battery_hamiltonian(const CentralPairConfig& cfg) {
  using namespace pauli;
  return HermitianObservable(0.5 * cfg.omega1 * two_qubit(z(), identity()) +
                             0.5 * cfg.omega2 * two_qubit(identity(), z()));
}

HermitianObservable full_battery_hamiltonian(const CentralPairConfig& cfg) {
  return HermitianObservable(local_battery_hamiltonian(cfg).matrix() +
                             pair_interaction(cfg.interaction, cfg.g12));
}

HermitianObservable sector_hamiltonian(const CentralPairConfig& cfg, const DickeSector& s1,
                                       const DickeSector& s2) {
  using namespace pauli;
  const Eigen::Index d1 = s1.dim(), d2 = s2.dim();
  const double dim = 4.0 * static_cast<double>(d1 * d2);
  if (dim * dim > kMaxSectorEntries) throw ConfigError("sector Hamiltonian exceeds size guard");

  const Matrix i1 = Matrix::Identity(d1, d1), i2 = Matrix::Identity(d2, d2);
  const Matrix i4 = Matrix::Identity(4, 4);
  const Matrix sx1 = two_qubit(x(), identity()), sy1 = two_qubit(y(), identity());
  const Matrix sx2 = two_qubit(identity(), x()), sy2 = two_qubit(identity(), y());

  const Matrix system = full_battery_hamiltonian(cfg).matrix();
  Matrix h = kron({system, i1, i2});
  h += (cfg.omega_a / cfg.M) * kron({i4, s1.jz, i2});
  h += (cfg.omega_b / cfg.N) * kron({i4, i1, s2.jz});
  h += (cfg.eps1 / std::sqrt(static_cast<double>(cfg.M))) *
       (kron({sx1, s1.jx, i2}) + kron({sy1, s1.jy, i2}));
  h += (cfg.eps2 / std::sqrt(static_cast<double>(cfg.N))) *
       (kron({sx2, i1, s2.jx}) + kron({sy2, i1, s2.jy}));
  return HermitianObservable(std::move(h));
}

std::vector<double> sector_populations(const DickeSector& s, double omega, double beta, int m) {
  // Ladder energies omega * m_k / M measured from the bath ground energy.
  const double e_min = -0.5 * std::abs(omega);
  const double partition = std::pow(1.0 + boltzmann(beta, std::abs(omega) / m), m);
  std::vector<double> p(static_cast<std::size_t>(s.dim()));
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double gap = omega * s.m(k) / m - e_min;
    p[static_cast<std::size_t>(k)] = boltzmann(beta, gap > 1e-14 * std::abs(omega) ? gap : 0.0) /
                                     partition;
  }
  return p;
}

std::vector<DensityMatrix> evolve_reduced(const CentralPairConfig& cfg,
                                          std::span<const double> grid) {
  cfg.validate();
  require_monotone(grid);
  const auto sectors_a = dicke_sectors(cfg.M);
  const auto sectors_b = dicke_sectors(cfg.N);

  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t a = 0; a < sectors_a.size(); ++a)
    for (std::size_t b = 0; b < sectors_b.size(); ++b) work.emplace_back(a, b);

  auto contribution = [&](std::size_t item) {
    const DickeSector& s1 = sectors_a[work[item].first];
    const DickeSector& s2 = sectors_b[work[item].second];
    const auto pa = sector_populations(s1, cfg.omega_a, cfg.beta_a, cfg.M);
    const auto pb = sector_populations(s2, cfg.omega_b, cfg.beta_b, cfg.N);
    const double mult = static_cast<double>(s1.multiplicity) * static_cast<double>(s2.multiplicity);

    Eigen::VectorXcd weights(s1.dim() * s2.dim());
    for (Eigen::Index k1 = 0; k1 < s1.dim(); ++k1)
      for (Eigen::Index k2 = 0; k2 < s2.dim(); ++k2)
        weights[k1 * s2.dim() + k2] = mult * pa[k1] * pb[k2];

    std::vector<Matrix> partial(grid.size(), Matrix::Zero(4, 4));
    if (weights.cwiseAbs().maxCoeff() == 0.0) return partial;
    const Matrix rho0 = kron(cfg.initial_state, Matrix(weights.asDiagonal()));
    const auto spectrum = herm_eigen(sector_hamiltonian(cfg, s1, s2));
    accumulate_leading_reduced(spectrum, rho0, 4, grid, partial);
    return partial;
  };

  const auto parts = ordered_parallel_map(work.size(), contribution);

  std::vector<DensityMatrix> out;
  out.reserve(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    Matrix rho = Matrix::Zero(4, 4);
    for (const auto& p : parts) rho += p[t];
    rho = 0.5 * (rho + rho.adjoint()).eval();
    out.emplace_back(std::move(rho), std::vector<int>{2, 2});
  }
  return out;
}

std::vector<DensityMatrix> brute_force_evolve(const CentralPairConfig& cfg,
                                              std::span<const double> grid) {
  cfg.validate();
  require_monotone(grid);
  if (cfg.M + cfg.N > 8) throw ConfigError("brute-force evolution limited to M + N <= 8");
  using namespace pauli;

  const int n = 2 + cfg.M + cfg.N;
  auto site = [&](const Matrix& op, int k) { return embed_qubit_operator(op, k, n); };
  const Eigen::Index bath_dim = Eigen::Index{1} << (cfg.M + cfg.N);

  Matrix h = 0.5 * cfg.omega1 * site(z(), 0) + 0.5 * cfg.omega2 * site(z(), 1);
  h += kron(pair_interaction(cfg.interaction, cfg.g12), Matrix::Identity(bath_dim, bath_dim));
  const double c1 = cfg.eps1 / (2.0 * std::sqrt(static_cast<double>(cfg.M)));
  const double c2 = cfg.eps2 / (2.0 * std::sqrt(static_cast<double>(cfg.N)));
  for (int i = 0; i < cfg.M; ++i) {
    const int k = 2 + i;
    h += cfg.omega_a / (2.0 * cfg.M) * site(z(), k);
    h += c1 * (site(x(), 0) * site(x(), k) + site(y(), 0) * site(y(), k));
  }
  for (int i = 0; i < cfg.N; ++i) {
    const int k = 2 + cfg.M + i;
    h += cfg.omega_b / (2.0 * cfg.N) * site(z(), k);
    h += c2 * (site(x(), 1) * site(x(), k) + site(y(), 1) * site(y(), k));
  }

  auto bath_state = [](int size, double omega, double beta) {
    Matrix hb = Matrix::Zero(Eigen::Index{1} << size, Eigen::Index{1} << size);
    for (int i = 0; i < size; ++i) hb += omega / (2.0 * size) * embed_qubit_operator(z(), i, size);
    return thermal_state(HermitianObservable(hb), beta).matrix();
  };
  const Matrix rho0 = kron({cfg.initial_state, bath_state(cfg.M, cfg.omega_a, cfg.beta_a),
                            bath_state(cfg.N, cfg.omega_b, cfg.beta_b)});

  Matrix magnetisation = Matrix::Zero(h.rows(), h.cols());
  for (int k = 0; k < n; ++k) magnetisation += site(z(), k);
  const bool check_magnetisation = cfg.interaction == PairInteraction::xxx;
  const double m0 = expectation(rho0, magnetisation);

  const UnitaryEvolution evolution{HermitianObservable(h)};
  const std::vector<int> dims(n, 2);
  const std::vector<int> keep{0, 1};

  std::vector<DensityMatrix> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const Matrix rho_t = evolution.conjugate(rho0, t);
    if (check_magnetisation) {
      const double drift = std::abs(expectation(rho_t, magnetisation) - m0);
      if (drift > 1e-9) {
        std::ostringstream os;
        os << "XXX magnetisation drifted by " << drift << " at t=" << t;
        throw InvariantError(os.str());
      }
    }
    Matrix reduced = partial_trace(rho_t, dims, keep);
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    out.emplace_back(std::move(reduced), std::vector<int>{2, 2});
  }
  return out;
}

}  // namespace qbattery
