#pragma once

// Truncated two-mode return/idler density operators.
//
// Both hypotheses conserve the photon-number difference d = n_R - n_I, so a
// state is stored as one dense real symmetric block per d. Inside block d the
// basis is ordered by idler photon number n_I = offset, offset + 1, ...
// with n_R = n_I + d.

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "qillum/scenario.hpp"

namespace qillum {

/// Fock cutoffs (inclusive) for the return and idler modes.
struct TruncationSpec {
  int n_r_max = 0;
  int n_i_max = 0;
  double tail_tol = 1e-9;

  /// Smallest cutoffs whose discarded mass is <= tail_tol: the return mode
  /// is sized for mean kappa*N_S + N_B, the idler for mean N_S.
  static TruncationSpec for_params(const ScenarioParams& params, double tail_tol);

  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

/// Probability mass above `cutoff` for a thermal state of mean `mean`.
double thermal_tail_mass(double mean, int cutoff);

/// Smallest cutoff with thermal_tail_mass(mean, cutoff) <= tail_tol.
int thermal_cutoff(double mean, double tail_tol);

/// Throws TruncationError if `trunc` discards more than its tail_tol.
void check_truncation(const ScenarioParams& params, const TruncationSpec& trunc);

/// One dense block of a block-diagonal operator.
struct Block {
  int key = 0;     ///< d for joint states, 0 for single-mode states
  int offset = 0;  ///< idler photon number of the first basis vector
  Eigen::MatrixXd matrix;
};

/// Real symmetric block-diagonal operator, blocks sorted by key.
class BlockDiagonal {
public:
  BlockDiagonal() = default;
  explicit BlockDiagonal(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Block* find(int key) const;
  std::size_t dimension() const;

  double trace() const;
  /// max |A_ij - A_ji| over all blocks.
  double max_asymmetry() const;

private:
  std::vector<Block> blocks_;
};

enum class Hypothesis { target_absent, target_present };

struct JointState {
  BlockDiagonal rho;
  TruncationSpec trunc;
  Hypothesis hypothesis = Hypothesis::target_absent;

  /// <m_R, m_I| rho |n_R, n_I>; zero outside the stored blocks.
  double element(int m_r, int m_i, int n_r, int n_i) const;
  double trace() const { return rho.trace(); }
};

/// Idler photon-number distribution of the two-mode squeezed vacuum,
/// N_S^n / (1 + N_S)^(n+1).
double idler_photon_pmf(double n_s, int n);

/// Target absent: product of thermal states with means N_B and N_S.
JointState build_rho0(const ScenarioParams& params, const TruncationSpec& trunc);

/// Target present: Fock matrix elements of the return/idler state after the
/// thermal-loss channel. Throws DomainError when N_B = 0.
JointState build_rho1(const ScenarioParams& params, const TruncationSpec& trunc);

/// Photon-number and phase-sensitive moments of a joint state.
struct MomentReport {
  double mean_n_r = 0.0;
  double mean_n_i = 0.0;
  double cross_corr = 0.0;  ///< |<a_R a_I>|
};
MomentReport moments_check(const JointState& state);

/// Eigen-decomposition of each block.
struct BlockSpectrum {
  int key = 0;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

struct Spectrum {
  std::vector<BlockSpectrum> blocks;
  double clamped_mass = 0.0;            ///< sum of |negative eigenvalues| zeroed
  double min_eigenvalue = 0.0;          ///< before clamping
  double max_reconstruction_error = 0.0;

  const BlockSpectrum* find(int key) const;
};

/// Decomposes every block. With `clamp_negative`, eigenvalues below zero are
/// set to zero and their magnitude accumulated into clamped_mass.
Spectrum decompose(const BlockDiagonal& op, bool clamp_negative);

enum class SpectralMode { difference, each };

struct SpectralData {
  SpectralMode mode = SpectralMode::each;
  Spectrum first;       ///< rho0 (each) or rho1 - rho0 (difference)
  Spectrum second;      ///< rho1 (each); empty in difference mode
};

/// Throws DomainError if the two states were built with different truncations.
SpectralData block_eigendecompose(const JointState& rho0, const JointState& rho1,
                                  SpectralMode mode);

/// Blockwise rho1 - rho0 over the union of block keys.
BlockDiagonal difference(const BlockDiagonal& rho1, const BlockDiagonal& rho0);

/// Single-mode thermal state of mean `n_b` on Fock levels 0..cutoff.
Eigen::MatrixXd build_thermal(double n_b, int cutoff);

/// Thermal state of mean `n_b` displaced by the real amplitude `mean_field`,
/// on levels 0..cutoff. The displacement exp(alpha (a^+ - a)) is applied in a
/// space padded by 20 levels and the result cropped. Throws TruncationError
/// if a thermal state with mean mean_field^2 + n_b leaves more than tail_tol
/// above the cutoff.
Eigen::MatrixXd build_displaced_thermal(double mean_field, double n_b, int cutoff,
                                        double tail_tol);

inline constexpr int kDisplacementPadding = 20;

/// Wraps a single-mode density matrix as a one-block operator.
BlockDiagonal single_block(Eigen::MatrixXd rho);

/// Debug dump: "d,i,j,real,imag" rows for every stored element.
void write_state_csv(std::ostream& out, const JointState& state);

}  // namespace qillum
