// Work-extraction metrics: ergotropy and its coherent/incoherent split,
// energy, instantaneous and charging power, and average (dis-)charging power.
#pragma once

#include "qbattery/quantum_core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace qbattery {

struct MetricsSample {
  double t = 0.0;
  double energy = 0.0;
  double ergotropy = 0.0;
  double ergotropy_incoherent = 0.0;
  double ergotropy_coherent = 0.0;
  double power_inst = 0.0;
  double power_charging = 0.0;
};

using MetricsSeries = std::vector<MetricsSample>;

enum class SegmentKind { charging, discharging, idle };

std::string_view to_string(SegmentKind kind);

struct PowerSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  SegmentKind kind = SegmentKind::idle;
  double avg_power = 0.0;
};

struct PowerSummary {
  std::vector<PowerSegment> segments;
  // Sum of ergotropy gained over charging segments divided by their total
  // duration; zero when the battery never charges.
  double avg_charging = 0.0;
  // Same for discharging segments; non-positive.
  double avg_discharging = 0.0;
  double charging_time = 0.0;
  double discharging_time = 0.0;
};

inline constexpr double kDefaultIdleThreshold = 1e-9;

// Populations of rho, sorted descending, placed on the eigenvectors of h in
// ascending energy order. Ties keep eigensolver order.
DensityMatrix passive_state(const DensityMatrix& rho, const HermitianObservable& h);

double ergotropy(const DensityMatrix& rho, const HermitianObservable& h);

// Keeps only the diagonal of rho in the given orthonormal basis.
DensityMatrix dephase(const DensityMatrix& rho, const SpectralDecomposition& basis);

// Energy eigenbasis used for dephasing. A Hamiltonian that is already diagonal
// in the computational basis keeps that basis, which fixes the choice inside
// degenerate subspaces.
SpectralDecomposition energy_basis(const HermitianObservable& h);

double incoherent_ergotropy(const DensityMatrix& rho, const HermitianObservable& h);
double coherent_ergotropy(const DensityMatrix& rho, const HermitianObservable& h);

// Pointwise energy and ergotropies; P and the charging power by second-order
// finite differences (central inside, one-sided three-point at the ends).
MetricsSeries series_metrics(std::span<const DensityMatrix> states, const HermitianObservable& h,
                             std::span<const double> grid);

// Second-order derivative of samples on a (possibly non-uniform) grid.
std::vector<double> finite_difference(std::span<const double> values, std::span<const double> grid);

// Splits the series into maximal runs of grid intervals that share the sign
// of the charging power (ergotropy slope across the interval); |slope| at or
// below the threshold counts as idle.
PowerSummary average_powers(std::span<const MetricsSample> samples,
                            double idle_threshold = kDefaultIdleThreshold);

}  // namespace qbattery
