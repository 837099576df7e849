#pragma once

// Chernoff-type overlaps between two density operators, the K-copy error
// probability sandwich they imply, and closed-form asymptotic exponents.

#include <cstdint>

#include "qillum/fockspace.hpp"
#include "qillum/scenario.hpp"

namespace qillum {

/// Tr(rho0^s rho1^(1-s)) from block spectra of each state (negative
/// eigenvalues already clamped). Blocks present in only one state contribute
/// nothing.
double q_s(const Spectrum& rho0, const Spectrum& rho1, double s);
double q_s(const JointState& rho0, const JointState& rho1, double s);

struct ChernoffResult {
  double s_star = 0.5;
  double q_qcb = 1.0;
  double exponent = 0.0;  ///< -ln q_qcb
  double q_half = 1.0;    ///< Bhattacharyya overlap at s = 1/2
};

/// Minimises q_s over [0, 1] by golden section to |ds| <= 1e-4. A 101-point
/// scan guards against non-unimodal curves. Identical states report s* = 1/2.
/// Both overlaps are for the truncated states rescaled to unit trace, so the
/// discarded tail mass does not masquerade as distinguishability.
ChernoffResult qcb(const Spectrum& rho0, const Spectrum& rho1);
ChernoffResult qcb(const JointState& rho0, const JointState& rho1);

/// Both SPDC hypotheses at a tolerance-driven truncation.
struct SpdcPair {
  JointState rho0;
  JointState rho1;
};
SpdcPair build_spdc_pair(const ScenarioParams& params, double tail_tol);

/// Coherent-state transmitter: thermal vs displaced thermal return mode.
struct CoherentPair {
  BlockDiagonal rho0;
  BlockDiagonal rho1;
  int cutoff = 0;
};
CoherentPair build_coherent_pair(const ScenarioParams& params, double tail_tol);

/// Numerical Chernoff data for each transmitter.
ChernoffResult spdc_chernoff(const ScenarioParams& params, double tail_tol);
ChernoffResult coherent_chernoff(const ScenarioParams& params, double tail_tol);

/// The three error-probability bounds for K copies, all in log domain too.
struct BoundTriple {
  double lower = 0.5;
  double upper_qcb = 0.5;
  double upper_bhatt = 0.5;
  double log_lower = 0.0;
  double log_upper_qcb = 0.0;
  double log_upper_bhatt = 0.0;
};

/// Requires 0 < q_qcb <= q_half <= 1 and K >= 1 (DomainError otherwise).
/// Overlaps are given as exponents -ln q so that K up to 1e8 is exact.
BoundTriple error_prob_bounds_from_exponents(double r_half, double r_qcb, std::int64_t k);
BoundTriple error_prob_bounds(double q_half, double q_qcb, std::int64_t k);

/// Closed-form exponents valid for N_S << 1, kappa << 1, N_B >> 1.
struct ExponentReport {
  double r_q = 0.0;      ///< kappa N_S / N_B
  double r_c = 0.0;      ///< kappa N_S / (4 N_B)
  double r_c_hom = 0.0;  ///< kappa N_S / (4 N_B + 2)
  double s_star = 0.5;
  double q_qcb = 1.0;
  double q_half = 1.0;
  bool regime_approximation = false;  ///< true outside the asymptotic regime
};

/// Requires N_B > 0.
ExponentReport asymptotic_exponents(const ScenarioParams& params);

}  // namespace qillum
