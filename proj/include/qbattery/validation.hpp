// Self-check suite behind `qbattery validate`.
#pragma once

#include "qbattery/quantum_core.hpp"

#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qbattery {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

using Generator = std::function<Matrix(const Matrix&)>;

// Haar-ish random mixed state: A A^dagger / Tr with Gaussian A.
Matrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng);

// Largest |Tr L(rho)| and Hermiticity defect over n random states.
CheckResult check_generator_trace(const Generator& generator, Eigen::Index dim, int n_states,
                                  std::uint64_t seed, std::string name = "generator_trace");

CheckResult check_sector_vs_brute_force(bool dm);
CheckResult check_trace_drift();
CheckResult check_factorization();
CheckResult check_profile_limits();
CheckResult check_squeezing_inequality();
CheckResult check_rk4_order();
CheckResult check_metrics_split();

struct ValidationCheck {
  std::string name;
  std::function<CheckResult()> run;
};
const std::vector<ValidationCheck>& validation_checks();

// Runs every check whose name contains `filter` (all when empty).
std::vector<CheckResult> run_validation(std::string_view filter = {});

}  // namespace qbattery
