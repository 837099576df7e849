#pragma once

// Receiver models: mode-by-mode homodyne for the coherent-state transmitter,
// the OPA receiver (amplify return and idler together, count photons on one
// output port), and the separable Helstrom measurement with majority vote.

#include <cstdint>

#include "qillum/fockspace.hpp"
#include "qillum/scenario.hpp"

namespace qillum {

/// An error probability together with its log10 (which stays finite far
/// below the double underflow threshold).
struct ErrorProbability {
  double pe = 0.5;
  double log10_pe = -0.30102999566398120;
};

/// 1/2 erfc(sqrt(kappa N_S K / (4 N_B + 2))).
ErrorProbability homodyne_error(const ScenarioParams& params, std::int64_t k);

struct OpaStatistics {
  double n0 = 0.0;  ///< mean output photons per mode, target absent
  double n1 = 0.0;  ///< mean output photons per mode, target present
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double gain = 1.0;
  double epsilon = 0.0;  ///< sqrt(G - 1)
};

/// Output-mode statistics of the OPA receiver. DomainError unless G > 1.
OpaStatistics opa_output_means(const ScenarioParams& params, double gain);

/// P(N = n) for the total count over K thermal modes of mean `mean`.
double opa_count_pmf(double mean, std::int64_t k, std::int64_t n);

/// Decide "target present" iff the count is >= threshold.
struct DecisionRule {
  std::int64_t threshold = 0;
};

struct ThresholdDecision {
  ErrorProbability error;
  DecisionRule rule;
  bool degenerate = false;  ///< the two count laws coincide (kappa = 0)
};

/// Exact K-mode error of the OPA receiver with full photon counting.
ThresholdDecision opa_error_exact(const ScenarioParams& params, double gain, std::int64_t k,
                                  ThresholdPolicy policy);

/// Exact error when each output mode only registers click / no click.
ThresholdDecision opa_error_onoff(const ScenarioParams& params, double gain, std::int64_t k,
                                  ThresholdPolicy policy);

struct GaussianOpaResult {
  ErrorProbability error;
  double r_opa = 0.0;  ///< (N1 - N0)^2 / (2 (sigma0 + sigma1)^2)
};

/// Central-limit approximation 1/2 erfc(sqrt(R_OPA K)).
GaussianOpaResult opa_error_gaussian(const ScenarioParams& params, double gain, std::int64_t k);

/// R_OPA as a function of the gain alone.
double opa_exponent(const ScenarioParams& params, double gain);

struct GainOptimum {
  double gain = 1.0;
  double r_opa = 0.0;
  bool degenerate = false;  ///< R_OPA is identically zero (kappa = 0)
};

/// Maximises R_OPA over G in (1, 1.5] by golden section on ln(G - 1), to a
/// relative accuracy of 1e-4 in G - 1.
GainOptimum optimize_gain(const ScenarioParams& params);

/// Gain of the Bhattacharyya preset, G = 1 + N_S / sqrt(N_B).
double bhattacharyya_preset_gain(const ScenarioParams& params);

/// Resolves auto/preset/fixed gain settings to a number.
double resolve_gain(const ScenarioParams& params, const GainSetting& setting);

struct BhattacharyyaResult {
  double q_b = 1.0;             ///< 1 / (sqrt((1+N0)(1+N1)) - sqrt(N0 N1))
  double r_b_exact = 0.0;       ///< -ln Q_B
  double r_b_paper_form = 0.0;  ///< small-epsilon expansion with eps^2 = G - 1
};
BhattacharyyaResult opa_bhattacharyya(const ScenarioParams& params, double gain);

struct HelstromResult {
  double pe_single = 0.5;
  double p01 = 0.5;  ///< P(decide present | absent)
  double p10 = 0.5;  ///< P(decide absent | present)
  double trace_distance = 0.0;  ///< sum of positive eigenvalues of rho1 - rho0
  double clamped_mass = 0.0;    ///< negative mass in the truncated states
  bool degenerate = false;      ///< rho1 == rho0; reported as a fair coin
};

/// Single-pair minimum-error measurement: project onto the positive
/// eigenspace of rho1 - rho0.
HelstromResult helstrom_single_shot(const JointState& rho0, const JointState& rho1);

enum class VoteMethod { exact_binomial, clt };

struct MajorityVoteResult {
  ErrorProbability error;
  double tie_mass = 0.0;  ///< P(exact tie) under target present; 0 for odd K
};

/// Majority vote over K independent single-pair decisions. Ties (even K)
/// decide "target absent". DomainError if p01 or p10 exceed 1/2.
MajorityVoteResult majority_vote_error(double p01, double p10, std::int64_t k,
                                       VoteMethod method);

/// K-pair error of separable Helstrom decisions followed by a majority vote,
/// treating every pair as wrong with probability pe_single under either
/// hypothesis. The true conditional errors p01/p10 of the measurement can
/// straddle 1/2, which a literal vote cannot absorb.
MajorityVoteResult separable_helstrom_error(const HelstromResult& helstrom, std::int64_t k,
                                            VoteMethod method);

}  // namespace qillum
