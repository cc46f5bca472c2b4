#include "qbattery/quantum_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qbattery {

namespace {

std::atomic<unsigned> g_worker_threads{0};

bool all_finite(const Matrix& m) {
  return m.allFinite();
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

}  // namespace

HermitianObservable::HermitianObservable(Matrix m, double tolerance) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw DimensionError("observable must be a non-empty square matrix");
  if (!all_finite(m_)) throw DimensionError("observable has non-finite entries");
  const double scale = std::max(1.0, max_abs(m_));
  if (hermiticity_defect(m_) > tolerance * scale)
    throw DimensionError("observable is not Hermitian");
}

DensityMatrix::DensityMatrix(Matrix m, std::vector<int> dims, const StateTolerance& tol)
    : m_(std::move(m)), dims_(std::move(dims)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw DimensionError("density matrix must be a non-empty square matrix");
  if (dims_.empty() || product(dims_) != m_.rows())
    throw DimensionError("subsystem dimensions do not match the matrix size");
  if (!all_finite(m_)) throw InvariantError("density matrix has non-finite entries");

  const double herm = hermiticity_defect(m_);
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "density matrix not Hermitian (defect " << herm << ")";
    throw InvariantError(os.str());
  }
  const Complex tr = m_.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << (tr.imag() < 0 ? "" : "+") << tr.imag()
       << "i differs from 1";
    throw InvariantError(os.str());
  }
  const double lmin = min_eigenvalue(m_);
  if (lmin < -tol.positivity) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lmin;
    throw InvariantError(os.str());
  }
}

DensityMatrix::DensityMatrix(Matrix m, const StateTolerance& tol)
    : DensityMatrix(m, std::vector<int>{static_cast<int>(m.rows())}, tol) {}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi, std::vector<int> dims) {
  const double norm = psi.norm();
  if (norm == 0.0) throw DimensionError("zero state vector");
  const Eigen::VectorXcd v = psi / norm;
  Matrix rho = v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho), std::move(dims));
}

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Matrix raising() {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  return m;
}
Matrix lowering() {
  Matrix m(2, 2);
  m << 0, 0, 1, 0;
  return m;
}
}  // namespace pauli

Matrix kron(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw DimensionError("kron expects square factors");
  const Eigen::Index na = a.rows(), nb = b.rows();
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j) out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
  return out;
}

Matrix kron(std::initializer_list<Matrix> factors) {
  if (factors.size() == 0) throw DimensionError("kron of an empty factor list");
  auto it = factors.begin();
  Matrix out = *it++;
  for (; it != factors.end(); ++it) out = kron(out, *it);
  return out;
}

Matrix embed_qubit_operator(const Matrix& op, int site, int n_qubits) {
  if (site < 0 || site >= n_qubits) throw DimensionError("qubit site out of range");
  if (op.rows() != 2 || op.cols() != 2) throw DimensionError("expected a 2x2 operator");
  const Eigen::Index left = Eigen::Index{1} << site;
  const Eigen::Index right = Eigen::Index{1} << (n_qubits - site - 1);
  return kron(kron(Matrix::Identity(left, left), op), Matrix::Identity(right, right));
}

Matrix partial_trace(const Matrix& rho, std::span<const int> dims, std::span<const int> keep) {
  const int n = static_cast<int>(dims.size());
  if (product(dims) != rho.rows() || rho.rows() != rho.cols())
    throw DimensionError("partial_trace: dims do not match the matrix size");

  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw DimensionError("partial_trace: subsystem index out of range");
    if (kept[k]) throw DimensionError("partial_trace: duplicate subsystem index");
    kept[k] = true;
  }

  // Row-major strides, subsystem 0 slowest.
  std::vector<Eigen::Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  std::vector<int> kept_idx, traced_idx;
  for (int s = 0; s < n; ++s) (kept[s] ? kept_idx : traced_idx).push_back(s);

  auto offsets = [&](const std::vector<int>& subs) {
    std::vector<Eigen::Index> offs{0};
    for (int s : subs) {
      std::vector<Eigen::Index> next;
      next.reserve(offs.size() * dims[s]);
      for (Eigen::Index o : offs)
        for (int v = 0; v < dims[s]; ++v) next.push_back(o + v * stride[s]);
      offs = std::move(next);
    }
    return offs;
  };
  const auto kept_off = offsets(kept_idx);
  const auto traced_off = offsets(traced_idx);

  const Eigen::Index dk = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index t : traced_off) acc += rho(kept_off[i] + t, kept_off[j] + t);
      out(i, j) = acc;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  Matrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> dims;
  for (int k : sorted) dims.push_back(rho.dims()[k]);
  return DensityMatrix(std::move(reduced), std::move(dims));
}

SpectralDecomposition herm_eigen(const HermitianObservable& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw InvariantError("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix propagator(const HermitianObservable& h, double t) {
  return UnitaryEvolution(h).propagator(t);
}

UnitaryEvolution::UnitaryEvolution(const HermitianObservable& h) : spectrum_(herm_eigen(h)) {}

UnitaryEvolution::UnitaryEvolution(SpectralDecomposition spectrum)
    : spectrum_(std::move(spectrum)) {}

Matrix UnitaryEvolution::propagator(double t) const {
  const Eigen::VectorXcd phase =
      (-kI * t * spectrum_.values.cast<Complex>()).array().exp().matrix();
  return spectrum_.vectors * phase.asDiagonal() * spectrum_.vectors.adjoint();
}

Matrix UnitaryEvolution::conjugate(const Matrix& rho, double t) const {
  const Matrix u = propagator(t);
  return u * rho * u.adjoint();
}

DensityMatrix thermal_state(const HermitianObservable& h, double beta) {
  if (std::isnan(beta) || beta < 0.0) throw ConfigError("inverse temperature must be >= 0");
  const auto eig = herm_eigen(h);
  const Eigen::Index d = eig.values.size();
  const double e0 = eig.values[0];
  RealVector w(d);
  if (std::isinf(beta)) {
    const double tol = 1e-10 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < d; ++k) w[k] = (eig.values[k] - e0 <= tol) ? 1.0 : 0.0;
  } else {
    for (Eigen::Index k = 0; k < d; ++k) w[k] = std::exp(-beta * (eig.values[k] - e0));
  }
  w /= w.sum();
  Matrix rho = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

double expectation(const Matrix& rho, const Matrix& obs) {
  if (rho.rows() != obs.rows() || rho.cols() != obs.cols())
    throw DimensionError("expectation: dimension mismatch");
  const Complex v = (rho.array() * obs.transpose().array()).sum();
  const double scale = std::max(1.0, max_abs(obs));
  if (std::abs(v.imag()) > 1e-10 * scale)
    throw InvariantError("expectation value has a non-negligible imaginary part");
  return v.real();
}

double expectation(const DensityMatrix& rho, const HermitianObservable& obs) {
  return expectation(rho.matrix(), obs.matrix());
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("trace_distance: dimension mismatch");
  const Matrix diff = a - b;
  const Matrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const Matrix& hermitian) {
  const Matrix herm = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[0];
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

TimeGrid uniform_grid(double t_max, std::size_t n_steps) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive");
  if (n_steps == 0) throw ConfigError("n_steps must be positive");
  TimeGrid g(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k)
    g[k] = t_max * static_cast<double>(k) / static_cast<double>(n_steps);
  return g;
}

void require_monotone(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("empty time grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ConfigError("time grid is not strictly increasing");
}

std::vector<Matrix> integrate_ode(const MatrixRhs& rhs, const Matrix& y0,
                                  std::span<const double> grid, int substeps) {
  require_monotone(grid);
  if (substeps < 1) throw ConfigError("substeps must be >= 1");

  std::vector<Matrix> out;
  out.reserve(grid.size());
  out.push_back(y0);
  Matrix y = y0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = (grid[k] - grid[k - 1]) / substeps;
    for (int s = 0; s < substeps; ++s) {
      const double t = grid[k - 1] + s * h;
      const Matrix k1 = rhs(t, y);
      const Matrix k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
      const Matrix k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
      const Matrix k4 = rhs(t + h, y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(y);
  }
  return out;
}

void accumulate_leading_reduced(const SpectralDecomposition& spectrum, const Matrix& rho0,
                                Eigen::Index kept_dim, std::span<const double> grid,
                                std::vector<Matrix>& out) {
  const Matrix& v = spectrum.vectors;
  const Eigen::Index d = v.rows();
  if (rho0.rows() != d || rho0.cols() != d || kept_dim <= 0 || d % kept_dim != 0)
    throw DimensionError("accumulate_leading_reduced: incompatible dimensions");
  if (out.size() != grid.size()) throw DimensionError("output buffer does not match grid");
  const Eigen::Index rest = d / kept_dim;

  // rho(t) = V (X o phase) V^dagger with X = V^dagger rho0 V; the kept block
  // (a, b) then reduces to p^T C_ab conj(p) with p_k = exp(-i E_k t).
  const Matrix x = v.adjoint() * rho0 * v;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index a = 0; a < kept_dim; ++a)
    for (Eigen::Index b = a; b < kept_dim; ++b) pairs.emplace_back(a, b);
  const Eigen::Index np = static_cast<Eigen::Index>(pairs.size());

  Matrix stacked(np * d, d);
  for (Eigen::Index p = 0; p < np; ++p) {
    const auto [a, b] = pairs[p];
    const Matrix overlap =
        v.middleRows(a * rest, rest).transpose() * v.middleRows(b * rest, rest).conjugate();
    stacked.middleRows(p * d, d) = x.cwiseProduct(overlap);
  }

  const Eigen::VectorXcd energies = spectrum.values.cast<Complex>();
  constexpr std::size_t kChunk = 128;
  for (std::size_t t0 = 0; t0 < grid.size(); t0 += kChunk) {
    const std::size_t nt = std::min(kChunk, grid.size() - t0);
    Matrix phase(d, static_cast<Eigen::Index>(nt));
    for (std::size_t c = 0; c < nt; ++c)
      phase.col(static_cast<Eigen::Index>(c)) =
          (-kI * grid[t0 + c] * energies).array().exp().matrix();
    const Matrix y = stacked * phase.conjugate();
    for (std::size_t c = 0; c < nt; ++c) {
      const Eigen::Index col = static_cast<Eigen::Index>(c);
      Matrix& target = out[t0 + c];
      for (Eigen::Index p = 0; p < np; ++p) {
        const auto [a, b] = pairs[p];
        const Complex val =
            (phase.col(col).array() * y.col(col).segment(p * d, d).array()).sum();
        target(a, b) += val;
        if (a != b) target(b, a) += std::conj(val);
      }
    }
  }
}

void set_worker_threads(unsigned n) { g_worker_threads = n; }

unsigned worker_threads() {
  const unsigned n = g_worker_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace qbattery
