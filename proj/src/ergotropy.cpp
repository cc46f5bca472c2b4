#include "qbattery/ergotropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qbattery {

namespace {

void require_same_dim(const DensityMatrix& rho, const HermitianObservable& h) {
  if (rho.dim() != h.dim()) throw DimensionError("state and Hamiltonian dimensions differ");
}

// Indices of values in descending order; equal values keep their index order.
std::vector<Eigen::Index> descending_order(const RealVector& values) {
  std::vector<Eigen::Index> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
  return idx;
}

RealVector state_spectrum(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// sum_k r_(k) e_(k) with r descending and e ascending.
double passive_energy(const RealVector& populations, const RealVector& ascending_energies) {
  const auto order = descending_order(populations);
  double sum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k)
    sum += populations[order[k]] * ascending_energies[static_cast<Eigen::Index>(k)];
  return sum;
}

}  // namespace

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::charging:
      return "charging";
    case SegmentKind::discharging:
      return "discharging";
    case SegmentKind::idle:
      return "idle";
  }
  return "idle";
}

DensityMatrix passive_state(const DensityMatrix& rho, const HermitianObservable& h) {
  require_same_dim(rho, h);
  const auto energies = herm_eigen(h);
  const RealVector r = state_spectrum(rho);
  const auto order = descending_order(r);
  RealVector placed(r.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    placed[static_cast<Eigen::Index>(k)] = r[order[k]];
  Matrix p = energies.vectors * placed.cast<Complex>().asDiagonal() * energies.vectors.adjoint();
  p = 0.5 * (p + p.adjoint()).eval();
  return DensityMatrix(std::move(p), rho.dims());
}

double ergotropy(const DensityMatrix& rho, const HermitianObservable& h) {
  require_same_dim(rho, h);
  const auto energies = herm_eigen(h);
  return expectation(rho, h) - passive_energy(state_spectrum(rho), energies.values);
}

SpectralDecomposition energy_basis(const HermitianObservable& h) {
  const Matrix& m = h.matrix();
  const Eigen::Index d = m.rows();
  const double scale = std::max(1.0, max_abs(m));
  const Matrix off = m - Matrix(m.diagonal().asDiagonal());
  if (max_abs(off) <= 1e-14 * scale) {
    const RealVector diag = m.diagonal().real();
    std::vector<Eigen::Index> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return diag[a] < diag[b]; });
    SpectralDecomposition basis{RealVector(d), Matrix::Zero(d, d)};
    for (Eigen::Index k = 0; k < d; ++k) {
      basis.values[k] = diag[idx[k]];
      basis.vectors(idx[k], k) = 1.0;
    }
    return basis;
  }
  return herm_eigen(h);
}

DensityMatrix dephase(const DensityMatrix& rho, const SpectralDecomposition& basis) {
  if (basis.vectors.rows() != rho.dim() || basis.vectors.cols() != rho.dim())
    throw DimensionError("dephasing basis does not match the state dimension");
  const Matrix& v = basis.vectors;
  const RealVector pops = (v.adjoint() * rho.matrix() * v).diagonal().real();
  Matrix out = v * pops.cast<Complex>().asDiagonal() * v.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho.dims());
}

double incoherent_ergotropy(const DensityMatrix& rho, const HermitianObservable& h) {
  require_same_dim(rho, h);
  const auto basis = energy_basis(h);
  const Matrix& v = basis.vectors;
  const RealVector pops = (v.adjoint() * rho.matrix() * v).diagonal().real();
  return pops.dot(basis.values) - passive_energy(pops, basis.values);
}

double coherent_ergotropy(const DensityMatrix& rho, const HermitianObservable& h) {
  return ergotropy(rho, h) - incoherent_ergotropy(rho, h);
}

std::vector<double> finite_difference(std::span<const double> f, std::span<const double> t) {
  const std::size_t n = f.size();
  if (n != t.size()) throw std::invalid_argument("values and grid differ in length");
  if (n < 3) throw std::invalid_argument("finite differences need at least three samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] +
           h1 / (h2 * (h1 + h2)) * f[i + 1];
  }
  {
    const double h1 = t[1] - t[0], h2 = t[2] - t[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
           h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double h1 = t[n - 2] - t[n - 3], h2 = t[n - 1] - t[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
               (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
  }
  return d;
}

MetricsSeries series_metrics(std::span<const DensityMatrix> states, const HermitianObservable& h,
                             std::span<const double> grid) {
  if (states.size() != grid.size()) throw std::invalid_argument("states and grid differ in length");
  if (states.size() < 3) throw std::invalid_argument("series_metrics needs at least three states");
  require_monotone(grid);

  const auto energies = herm_eigen(h);
  const auto basis = energy_basis(h);
  MetricsSeries out(states.size());
  std::vector<double> e(states.size()), w(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const DensityMatrix& rho = states[k];
    require_same_dim(rho, h);
    MetricsSample& s = out[k];
    s.t = grid[k];
    s.energy = expectation(rho, h);
    s.ergotropy = s.energy - passive_energy(state_spectrum(rho), energies.values);
    const RealVector pops =
        (basis.vectors.adjoint() * rho.matrix() * basis.vectors).diagonal().real();
    s.ergotropy_incoherent = pops.dot(basis.values) - passive_energy(pops, basis.values);
    s.ergotropy_coherent = s.ergotropy - s.ergotropy_incoherent;
    e[k] = s.energy;
    w[k] = s.ergotropy;
  }
  const auto p = finite_difference(e, grid);
  const auto pc = finite_difference(w, grid);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].power_inst = p[k];
    out[k].power_charging = pc[k];
  }
  return out;
}

PowerSummary average_powers(std::span<const MetricsSample> samples, double idle_threshold) {
  if (samples.size() < 2) throw std::invalid_argument("average_powers needs at least two samples");
  for (std::size_t k = 1; k < samples.size(); ++k)
    if (!(samples[k].t > samples[k - 1].t))
      throw std::invalid_argument("samples are not time-ordered");

  auto classify = [&](std::size_t k) {
    const double slope = (samples[k + 1].ergotropy - samples[k].ergotropy) /
                         (samples[k + 1].t - samples[k].t);
    if (std::abs(slope) <= idle_threshold) return SegmentKind::idle;
    return slope > 0 ? SegmentKind::charging : SegmentKind::discharging;
  };

  PowerSummary summary;
  double gained = 0.0, lost = 0.0;
  std::size_t start = 0;
  SegmentKind kind = classify(0);
  const std::size_t intervals = samples.size() - 1;
  for (std::size_t k = 1; k <= intervals; ++k) {
    if (k < intervals && classify(k) == kind) continue;
    const double dt = samples[k].t - samples[start].t;
    const double dw = samples[k].ergotropy - samples[start].ergotropy;
    summary.segments.push_back({samples[start].t, samples[k].t, kind, dw / dt});
    if (kind == SegmentKind::charging) {
      gained += dw;
      summary.charging_time += dt;
    } else if (kind == SegmentKind::discharging) {
      lost += dw;
      summary.discharging_time += dt;
    }
    if (k < intervals) {
      start = k;
      kind = classify(k);
    }
  }
  summary.avg_charging = summary.charging_time > 0 ? gained / summary.charging_time : 0.0;
  summary.avg_discharging = summary.discharging_time > 0 ? lost / summary.discharging_time : 0.0;
  return summary;
}

}  // namespace qbattery
