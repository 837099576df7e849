#include "qillum/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unsupported/Eigen/MatrixFunctions>

#include "qillum/errors.hpp"
#include "qillum/special.hpp"

namespace qillum {

namespace {

using special::log_factorial;

// ln of N^n / (1+N)^(n+1); N > 0.
double log_thermal_pmf(double mean, int n) {
  return n * std::log(mean) - (n + 1.0) * std::log1p(mean);
}

double thermal_pmf(double mean, int n) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(log_thermal_pmf(mean, n));
}

// Block layout shared by both hypotheses.
struct BlockRange {
  int offset;
  int size;
};

BlockRange block_range(const TruncationSpec& t, int d) {
  const int first = std::max(0, -d);
  const int last = std::min(t.n_i_max, t.n_r_max - d);
  return {first, last - first + 1};
}

void require_same_truncation(const JointState& a, const JointState& b) {
  if (!(a.trunc == b.trunc))
    throw DomainError("trunc", "states were built with different truncations");
}

}  // namespace

double thermal_tail_mass(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  // (N/(N+1))^(cutoff+1)
  return std::exp(-(cutoff + 1.0) * std::log1p(1.0 / mean));
}

int thermal_cutoff(double mean, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw DomainError("tail_tol", "must lie in (0, 1)");
  if (mean <= 0.0) return 0;
  int n = std::max(0, static_cast<int>(std::ceil(-std::log(tail_tol) / std::log1p(1.0 / mean))) - 1);
  while (n > 0 && thermal_tail_mass(mean, n - 1) <= tail_tol) --n;
  while (thermal_tail_mass(mean, n) > tail_tol) ++n;
  return n;
}

TruncationSpec TruncationSpec::for_params(const ScenarioParams& params, double tail_tol) {
  TruncationSpec t;
  t.tail_tol = tail_tol;
  t.n_r_max = thermal_cutoff(params.kappa * params.n_s + params.n_b, tail_tol);
  t.n_i_max = thermal_cutoff(params.n_s, tail_tol);
  return t;
}

void check_truncation(const ScenarioParams& params, const TruncationSpec& trunc) {
  if (trunc.n_r_max < 0 || trunc.n_i_max < 0)
    throw TruncationError("Fock cutoffs must be non-negative");
  const double slack = trunc.tail_tol * (1.0 + 1e-12);
  const double tail_r = thermal_tail_mass(params.kappa * params.n_s + params.n_b, trunc.n_r_max);
  if (tail_r > slack)
    throw TruncationError("return-mode cutoff " + std::to_string(trunc.n_r_max) +
                          " discards mass " + std::to_string(tail_r) + " > tail_tol");
  const double tail_i = thermal_tail_mass(params.n_s, trunc.n_i_max);
  if (tail_i > slack)
    throw TruncationError("idler-mode cutoff " + std::to_string(trunc.n_i_max) +
                          " discards mass " + std::to_string(tail_i) + " > tail_tol");
}

BlockDiagonal::BlockDiagonal(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end(),
            [](const Block& a, const Block& b) { return a.key < b.key; });
}

const Block* BlockDiagonal::find(int key) const {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), key,
                             [](const Block& b, int k) { return b.key < k; });
  return (it != blocks_.end() && it->key == key) ? &*it : nullptr;
}

std::size_t BlockDiagonal::dimension() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += static_cast<std::size_t>(b.matrix.rows());
  return n;
}

double BlockDiagonal::trace() const {
  double t = 0.0;
  for (const auto& b : blocks_) t += b.matrix.trace();
  return t;
}

double BlockDiagonal::max_asymmetry() const {
  double worst = 0.0;
  for (const auto& b : blocks_)
    worst = std::max(worst, (b.matrix - b.matrix.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

double JointState::element(int m_r, int m_i, int n_r, int n_i) const {
  const int d = n_r - n_i;
  if (m_r - m_i != d) return 0.0;
  const Block* b = rho.find(d);
  if (b == nullptr) return 0.0;
  const int row = m_i - b->offset;
  const int col = n_i - b->offset;
  if (row < 0 || col < 0 || row >= b->matrix.rows() || col >= b->matrix.cols()) return 0.0;
  return b->matrix(row, col);
}

double idler_photon_pmf(double n_s, int n) { return thermal_pmf(n_s, n); }

JointState build_rho0(const ScenarioParams& params, const TruncationSpec& trunc) {
  check_truncation(params, trunc);
  std::vector<Block> blocks;
  for (int d = -trunc.n_i_max; d <= trunc.n_r_max; ++d) {
    const auto [offset, size] = block_range(trunc, d);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
    for (int k = 0; k < size; ++k) {
      const int n_i = offset + k;
      m(k, k) = thermal_pmf(params.n_b, n_i + d) * idler_photon_pmf(params.n_s, n_i);
    }
    blocks.push_back({d, offset, std::move(m)});
  }
  return {BlockDiagonal(std::move(blocks)), trunc, Hypothesis::target_absent};
}

JointState build_rho1(const ScenarioParams& params, const TruncationSpec& trunc) {
  if (params.n_b <= 0.0)
    throw DomainError("n_b", "target-present state is undefined for N_B = 0");
  check_truncation(params, trunc);

  const double kappa = params.kappa;
  const double n_b = params.n_b;
  const double log_nb = std::log(n_b);
  const double log_nb1 = std::log1p(n_b);
  const double log_nb1k = std::log(n_b + 1.0 - kappa);
  const double log_kappa = kappa > 0.0 ? std::log(kappa) : -INFINITY;
  // Argument of the positive-term form of the 2F1 factor.
  const double w = kappa / (n_b * (n_b + 1.0 - kappa));

  std::vector<double> log_p(trunc.n_i_max + 1);
  for (int n = 0; n <= trunc.n_i_max; ++n) log_p[n] = log_thermal_pmf(params.n_s, n);

  // <n_r + l, n_i + l| rho1 |n_r, n_i>
  auto log_element = [&](int n_r, int n_i, int l) {
    return 0.5 * (log_factorial(n_r + l) + log_factorial(n_i + l) - log_factorial(n_r) -
                  log_factorial(n_i)) -
           log_factorial(l) + 0.5 * (log_p[n_i + l] + log_p[n_i]) + (l > 0 ? 0.5 * l * log_kappa : 0.0) +
           n_i * log_nb1k + n_r * log_nb - (n_r + n_i + l + 1.0) * log_nb1 +
           special::log_hypergeom_2f1_positive(n_r, n_i, l + 1.0, w);
  };

  std::vector<Block> blocks;
  for (int d = -trunc.n_i_max; d <= trunc.n_r_max; ++d) {
    const auto [offset, size] = block_range(trunc, d);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
    for (int col = 0; col < size; ++col) {
      const int n_i = offset + col;
      const int n_r = n_i + d;
      for (int row = col; row < size; ++row) {
        const int l = row - col;
        if (l > 0 && kappa == 0.0) continue;
        const double v = std::exp(log_element(n_r, n_i, l));
        m(row, col) = v;
        m(col, row) = v;
      }
    }
    blocks.push_back({d, offset, std::move(m)});
  }
  return {BlockDiagonal(std::move(blocks)), trunc, Hypothesis::target_present};
}

MomentReport moments_check(const JointState& state) {
  MomentReport r;
  double cross = 0.0;
  for (const auto& b : state.rho.blocks()) {
    const auto n = b.matrix.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double n_i = b.offset + static_cast<double>(k);
      const double n_r = n_i + b.key;
      r.mean_n_r += n_r * b.matrix(k, k);
      r.mean_n_i += n_i * b.matrix(k, k);
      // <n+(1,1)| rho |n> sqrt((n_r+1)(n_i+1)) summed over n gives <a_R a_I>.
      if (k + 1 < n) cross += b.matrix(k + 1, k) * std::sqrt((n_r + 1.0) * (n_i + 1.0));
    }
  }
  r.cross_corr = std::abs(cross);
  return r;
}

const BlockSpectrum* Spectrum::find(int key) const {
  auto it = std::lower_bound(blocks.begin(), blocks.end(), key,
                             [](const BlockSpectrum& b, int k) { return b.key < k; });
  return (it != blocks.end() && it->key == key) ? &*it : nullptr;
}

Spectrum decompose(const BlockDiagonal& op, bool clamp_negative) {
  Spectrum out;
  out.blocks.reserve(op.blocks().size());
  bool first = true;
  for (const auto& b : op.blocks()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b.matrix);
    if (solver.info() != Eigen::Success)
      throw LinAlgError("eigensolver failed on block " + std::to_string(b.key));
    BlockSpectrum s{b.key, solver.eigenvalues(), solver.eigenvectors()};

    const Eigen::MatrixXd rebuilt = s.vectors * s.values.asDiagonal() * s.vectors.transpose();
    out.max_reconstruction_error =
        std::max(out.max_reconstruction_error, (rebuilt - b.matrix).cwiseAbs().maxCoeff());
    const double lo = s.values.size() > 0 ? s.values.minCoeff() : 0.0;
    out.min_eigenvalue = first ? lo : std::min(out.min_eigenvalue, lo);
    first = false;

    if (clamp_negative) {
      for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        if (s.values[i] < 0.0) {
          out.clamped_mass += -s.values[i];
          s.values[i] = 0.0;
        }
      }
    }
    out.blocks.push_back(std::move(s));
  }
  return out;
}

BlockDiagonal difference(const BlockDiagonal& rho1, const BlockDiagonal& rho0) {
  std::vector<Block> out;
  for (const auto& b : rho1.blocks()) {
    Block diff = b;
    if (const Block* other = rho0.find(b.key)) {
      if (other->offset != b.offset || other->matrix.rows() != b.matrix.rows())
        throw DomainError("trunc", "block layouts differ for key " + std::to_string(b.key));
      diff.matrix -= other->matrix;
    }
    out.push_back(std::move(diff));
  }
  for (const auto& b : rho0.blocks()) {
    if (rho1.find(b.key) == nullptr) out.push_back({b.key, b.offset, -b.matrix});
  }
  return BlockDiagonal(std::move(out));
}

SpectralData block_eigendecompose(const JointState& rho0, const JointState& rho1,
                                  SpectralMode mode) {
  require_same_truncation(rho0, rho1);
  SpectralData out;
  out.mode = mode;
  if (mode == SpectralMode::difference) {
    out.first = decompose(difference(rho1.rho, rho0.rho), false);
  } else {
    out.first = decompose(rho0.rho, true);
    out.second = decompose(rho1.rho, true);
  }
  return out;
}

Eigen::MatrixXd build_thermal(double n_b, int cutoff) {
  Eigen::VectorXd diag(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) diag[n] = thermal_pmf(n_b, n);
  return diag.asDiagonal();
}

Eigen::MatrixXd build_displaced_thermal(double mean_field, double n_b, int cutoff,
                                        double tail_tol) {
  if (!(mean_field >= 0.0)) throw DomainError("mean_field", "must be >= 0");
  if (!(n_b >= 0.0)) throw DomainError("n_b", "must be >= 0");
  if (cutoff < 0) throw TruncationError("cutoff must be non-negative");
  const double mean = mean_field * mean_field + n_b;
  if (thermal_tail_mass(mean, cutoff) > tail_tol * (1.0 + 1e-12))
    throw TruncationError("cutoff " + std::to_string(cutoff) +
                          " too small for mean photon number " + std::to_string(mean));

  const int dim = cutoff + 1 + kDisplacementPadding;
  const Eigen::MatrixXd thermal = build_thermal(n_b, dim - 1);
  if (mean_field == 0.0) return thermal.topLeftCorner(cutoff + 1, cutoff + 1);

  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const double amp = mean_field * std::sqrt(n + 1.0);
    generator(n + 1, n) = amp;   // alpha a^+
    generator(n, n + 1) = -amp;  // -alpha a
  }
  const Eigen::MatrixXd displacement = generator.exp();
  Eigen::MatrixXd rho = displacement * thermal * displacement.transpose();
  Eigen::MatrixXd cropped = rho.topLeftCorner(cutoff + 1, cutoff + 1);
  return 0.5 * (cropped + cropped.transpose());
}

BlockDiagonal single_block(Eigen::MatrixXd rho) {
  std::vector<Block> blocks;
  blocks.push_back({0, 0, std::move(rho)});
  return BlockDiagonal(std::move(blocks));
}

void write_state_csv(std::ostream& out, const JointState& state) {
  out << "d,i,j,real,imag\n";
  out.precision(17);
  for (const auto& b : state.rho.blocks()) {
    for (Eigen::Index i = 0; i < b.matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < b.matrix.cols(); ++j)
        out << b.key << ',' << i << ',' << j << ',' << b.matrix(i, j) << ",0\n";
  }
}

}  // namespace qillum
