#include "qbattery/ergotropy.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace qbattery;
using namespace qbattery::testing;

namespace {

const HermitianObservable& half_sz() {
  static const HermitianObservable h(0.5 * pauli::z());
  return h;
}

DensityMatrix excited() { return DensityMatrix(ket_matrix({1, 0})); }
DensityMatrix ground() { return DensityMatrix(ket_matrix({0, 1})); }
DensityMatrix plus() { return DensityMatrix(ket_matrix({1, 1})); }

// min over all assignments of state eigenvalues to energy levels.
double brute_force_passive_energy(const Matrix& rho, const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> sr(rho), sh(h);
  const RealVector r = sr.eigenvalues(), e = sh.eigenvalues();
  std::vector<int> perm(r.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) s += r[perm[k]] * e[static_cast<Eigen::Index>(k)];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

MetricsSeries injected(const std::vector<double>& t, double (*w)(double)) {
  MetricsSeries s(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    s[k].t = t[k];
    s[k].ergotropy = w(t[k]);
  }
  return s;
}

}  // namespace

TEST_SUITE("ergotropy") {

TEST_CASE("passive_state examples") {
  CHECK(max_abs(passive_state(excited(), half_sz()).matrix() - ground().matrix()) <= 1e-14);
  CHECK(max_abs(passive_state(plus(), half_sz()).matrix() - ground().matrix()) <= 1e-14);
  std::mt19937_64 rng(1);
  const HermitianObservable h(random_hermitian(4, rng));
  const auto thermal = thermal_state(h, 0.8);
  CHECK(max_abs(passive_state(thermal, h).matrix() - thermal.matrix()) <= 1e-12);
}

TEST_CASE("passive states commute with H") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const HermitianObservable h(random_hermitian(4, rng));
    const Matrix p = passive_state(DensityMatrix(random_density_matrix(4, rng)), h).matrix();
    CHECK(max_abs(p * h.matrix() - h.matrix() * p) <= 1e-10);
  }
}

TEST_CASE("ergotropy examples") {
  CHECK(std::abs(ergotropy(ground(), half_sz())) <= 1e-15);
  const double omega = 1.7;
  CHECK(ergotropy(excited(), HermitianObservable(0.5 * omega * pauli::z())) ==
        doctest::Approx(omega).epsilon(1e-14));
  CHECK(ergotropy(excited(), half_sz()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ergotropy(plus(), half_sz()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(ergotropy(plus(), HermitianObservable(Matrix::Identity(4, 4))), DimensionError);
}

TEST_CASE("dephase examples") {
  const auto basis = energy_basis(half_sz());
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.3;
  diag(1, 1) = 0.7;
  CHECK(max_abs(dephase(DensityMatrix(diag), basis).matrix() - diag) == 0.0);
  CHECK(max_abs(dephase(plus(), basis).matrix() - Matrix::Identity(2, 2) / 2.0) <= 1e-15);

  std::mt19937_64 rng(3);
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << -1.0, 0.2, 0.2, 0.9;
  const HermitianObservable hd(h);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix rho(random_density_matrix(4, rng));
    const auto d = dephase(rho, energy_basis(hd));
    CHECK(std::abs(expectation(d, hd) - expectation(rho, hd)) <= 1e-13);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(d.matrix()(i, i) - rho.matrix()(i, i)) <= 1e-15);
  }
  CHECK_THROWS_AS(dephase(DensityMatrix(Matrix::Identity(4, 4) / 4.0), basis), DimensionError);
}

TEST_CASE("incoherent and coherent ergotropy examples") {
  CHECK(std::abs(incoherent_ergotropy(plus(), half_sz())) <= 1e-15);
  CHECK(incoherent_ergotropy(excited(), half_sz()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(coherent_ergotropy(plus(), half_sz()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(coherent_ergotropy(excited(), half_sz())) <= 1e-14);

  std::mt19937_64 rng(4);
  const HermitianObservable h(kron(0.5 * pauli::z(), pauli::identity()) +
                              kron(pauli::identity(), 0.6 * pauli::z()));
  for (int k = 0; k < 100; ++k) {
    const DensityMatrix rho(random_density_matrix(4, rng));
    const double w = ergotropy(rho, h), wi = incoherent_ergotropy(rho, h);
    CHECK(wi <= w + 1e-10);
    CHECK(wi >= -1e-10);
    // dephasing twice changes nothing
    const auto basis = energy_basis(h);
    const auto d1 = dephase(rho, basis), d2 = dephase(d1, basis);
    CHECK(std::abs(coherent_ergotropy(d1, h) - coherent_ergotropy(d2, h)) <= 1e-12);
    CHECK(std::abs(coherent_ergotropy(d1, h)) <= 1e-12);
    CHECK(std::abs(ergotropy(d1, h) - wi) <= 1e-12);
  }
}

TEST_CASE("ergotropy is gauge invariant inside degenerate eigenspaces") {
  std::mt19937_64 rng(5);
  const HermitianObservable h(kron(pauli::z(), pauli::identity()) + kron(pauli::identity(), pauli::z()));
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix rho(random_density_matrix(4, rng));
    Matrix u = Matrix::Identity(4, 4);
    u.block(1, 1, 2, 2) = random_unitary(2, rng);
    const auto p = passive_state(rho, h);
    const DensityMatrix rotated_p(u * p.matrix() * u.adjoint());
    CHECK(std::abs(ergotropy(rotated_p, h) - ergotropy(p, h)) <= 1e-10);
    CHECK(std::abs(ergotropy(rotated_p, h)) <= 1e-10);
    const DensityMatrix rotated(u * rho.matrix() * u.adjoint());
    CHECK(std::abs(ergotropy(rotated, h) - ergotropy(rho, h)) <= 1e-10);
  }
}

TEST_CASE("sorted assignment is optimal against permutation search") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 300; ++k) {
    const Eigen::Index d = 2 + k % 3;
    const Matrix a = random_hermitian(d, rng);
    const HermitianObservable h(a);
    const DensityMatrix rho(random_density_matrix(d, rng));
    const double passive = expectation(passive_state(rho, h), h);
    CHECK(std::abs(passive - brute_force_passive_energy(rho.matrix(), a)) <= 1e-12);
    CHECK(std::abs(ergotropy(rho, h) - (expectation(rho, h) - passive)) <= 1e-12);
  }
}

TEST_CASE("zero ergotropy exactly for passive populations") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const HermitianObservable h(random_hermitian(4, rng));
    const auto basis = herm_eigen(h);
    std::vector<double> pops{u(rng), u(rng), u(rng), u(rng)};
    const double total = std::accumulate(pops.begin(), pops.end(), 0.0);
    for (double& p : pops) p /= total;
    std::sort(pops.begin(), pops.end(), std::greater<>());
    RealVector pv = Eigen::Map<RealVector>(pops.data(), 4);
    const DensityMatrix passive(basis.vectors * pv.cast<Complex>().asDiagonal() * basis.vectors.adjoint());
    CHECK(std::abs(ergotropy(passive, h)) <= 1e-12);
    std::swap(pv[0], pv[3]);
    const DensityMatrix active(basis.vectors * pv.cast<Complex>().asDiagonal() * basis.vectors.adjoint());
    CHECK(ergotropy(active, h) > 1e-6);
  }
}

TEST_CASE("ergotropy depends only on the two spectra") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index d = k % 2 ? 4 : 2;
    const Matrix h0 = random_hermitian(d, rng);
    const Matrix rho0 = random_density_matrix(d, rng);
    const Matrix uh = random_unitary(d, rng), ur = random_unitary(d, rng);
    // Same relative frame: rotate both together.
    const HermitianObservable h1(uh * h0 * uh.adjoint());
    const DensityMatrix r1(uh * rho0 * uh.adjoint());
    CHECK(std::abs(ergotropy(r1, h1) - ergotropy(DensityMatrix(rho0), HermitianObservable(h0))) <= 1e-10);
    // Passive energy depends only on spectra even when frames differ.
    const DensityMatrix r2(ur * rho0 * ur.adjoint());
    const HermitianObservable hh(h0);
    const double p1 = expectation(DensityMatrix(rho0), hh) - ergotropy(DensityMatrix(rho0), hh);
    const double p2 = expectation(r2, hh) - ergotropy(r2, hh);
    CHECK(std::abs(p1 - p2) <= 1e-10);
  }
}

TEST_CASE("pure-state ergotropy is energy above the ground level") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index d = 2 + k % 3;
    const HermitianObservable h(random_hermitian(d, rng));
    const DensityMatrix psi(projector(random_ket(d, rng)));
    const double e_min = herm_eigen(h).values(0);
    CHECK(std::abs(ergotropy(psi, h) - (expectation(psi, h) - e_min)) <= 1e-12);
  }
}

TEST_CASE("series_metrics on a constant trajectory") {
  std::vector<DensityMatrix> states(6, plus());
  const auto grid = uniform_grid(1.0, 5);
  const auto m = series_metrics(states, half_sz(), grid);
  for (const auto& s : m) {
    CHECK(std::abs(s.power_inst) <= 1e-14);
    CHECK(std::abs(s.power_charging) <= 1e-14);
    CHECK(s.ergotropy == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("series_metrics conserves energy in a closed qubit") {
  const HermitianObservable h(0.5 * 1.3 * pauli::z());
  const UnitaryEvolution ev(h);
  const auto grid = uniform_grid(5.0, 200);
  std::vector<DensityMatrix> states;
  for (double t : grid) states.emplace_back(ev.conjugate(ket_matrix({0.6, Complex(0.3, 0.74)}), t));
  for (const auto& s : series_metrics(states, h, grid)) CHECK(std::abs(s.power_inst) <= 1e-12);
}

TEST_CASE("series_metrics power converges at second order") {
  // Driven precession under sx with energy measured by sz/2: E(t) = cos(t)/2.
  const UnitaryEvolution ev(HermitianObservable(0.5 * pauli::x()));
  double previous = 0.0;
  for (std::size_t n : {50u, 100u, 200u}) {
    const auto grid = uniform_grid(3.0, n);
    std::vector<DensityMatrix> states;
    for (double t : grid) states.emplace_back(ev.conjugate(excited().matrix(), t));
    const auto m = series_metrics(states, half_sz(), grid);
    double err = 0.0;
    for (const auto& s : m) err = std::max(err, std::abs(s.power_inst + 0.5 * std::sin(s.t)));
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.1));
    previous = err;
  }
}

TEST_CASE("series_metrics input validation") {
  std::vector<DensityMatrix> two(2, plus());
  const TimeGrid g2{0.0, 1.0};
  CHECK_THROWS_AS(series_metrics(two, half_sz(), g2), std::invalid_argument);
  std::vector<DensityMatrix> three(3, plus());
  CHECK_THROWS_AS(series_metrics(three, half_sz(), g2), std::invalid_argument);
}

TEST_CASE("finite_difference handles non-uniform grids exactly for quadratics") {
  const std::vector<double> t{0.0, 0.1, 0.35, 0.5, 1.0, 1.2};
  std::vector<double> f;
  for (double x : t) f.push_back(3 * x * x - x + 2);
  const auto d = finite_difference(f, t);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(d[k] == doctest::Approx(6 * t[k] - 1).epsilon(1e-12));
}

TEST_CASE("average_powers on monotone ergotropy") {
  const auto grid = uniform_grid(2.0, 40);
  const auto s = injected(grid, [](double t) { return 0.1 + t * t; });
  const auto p = average_powers(s);
  REQUIRE(p.segments.size() == 1);
  CHECK(p.segments[0].kind == SegmentKind::charging);
  CHECK(p.segments[0].avg_power == doctest::Approx((4.1 - 0.1) / 2.0).epsilon(1e-12));
  CHECK(p.avg_charging == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.discharging_time == 0.0);
}

TEST_CASE("average_powers on a sine") {
  const auto grid = uniform_grid(2.0 * std::numbers::pi, 400);
  const auto s = injected(grid, [](double t) { return std::sin(t); });
  const auto p = average_powers(s);
  REQUIRE(p.segments.size() == 3);
  CHECK(p.segments[0].kind == SegmentKind::charging);
  CHECK(p.segments[0].avg_power == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-3));
  CHECK(p.segments[1].kind == SegmentKind::discharging);
  CHECK(p.segments[1].avg_power == doctest::Approx(-2.0 / std::numbers::pi).epsilon(1e-3));
  CHECK(p.segments[2].kind == SegmentKind::charging);
  CHECK(p.avg_charging == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-3));
  CHECK(p.avg_discharging == doctest::Approx(-2.0 / std::numbers::pi).epsilon(1e-3));
  CHECK(p.charging_time + p.discharging_time == doctest::Approx(2.0 * std::numbers::pi));
  // segments tile the grid
  for (std::size_t k = 1; k < p.segments.size(); ++k) CHECK(p.segments[k].t_start == p.segments[k - 1].t_end);
}

TEST_CASE("average_powers on constant ergotropy is one idle segment") {
  const auto grid = uniform_grid(1.0, 10);
  const auto p = average_powers(injected(grid, [](double) { return 0.3; }));
  REQUIRE(p.segments.size() == 1);
  CHECK(p.segments[0].kind == SegmentKind::idle);
  CHECK(p.segments[0].avg_power == 0.0);
  CHECK(p.avg_charging == 0.0);
  CHECK(p.avg_discharging == 0.0);
}

TEST_CASE("average_powers segment signs are consistent") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  MetricsSeries s(200);
  double w = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k].t = 0.1 * k;
    w += k % 7 == 0 ? 0.0 : g(rng);
    s[k].ergotropy = w;
  }
  for (const auto& seg : average_powers(s).segments) {
    if (seg.kind == SegmentKind::charging) CHECK(seg.avg_power > 0.0);
    if (seg.kind == SegmentKind::discharging) CHECK(seg.avg_power < 0.0);
    if (seg.kind == SegmentKind::idle) CHECK(std::abs(seg.avg_power) <= kDefaultIdleThreshold);
  }
}

TEST_CASE("average_powers rejects unordered samples") {
  MetricsSeries s(3);
  s[0].t = 0.0;
  s[1].t = 2.0;
  s[2].t = 1.0;
  CHECK_THROWS_AS(average_powers(s), std::invalid_argument);
}

}  // TEST_SUITE
