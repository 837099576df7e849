#include "qillum/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qillum/errors.hpp"
#include "qillum/special.hpp"

namespace qillum {

namespace {

// Per-block squared overlaps |<u_i|v_j>|^2, which do not depend on s.
struct OverlapBlock {
  Eigen::VectorXd lambda0;
  Eigen::VectorXd lambda1;
  Eigen::MatrixXd weights;
};

struct OverlapKernel {
  std::vector<OverlapBlock> blocks;
  double trace0 = 0.0;
  double trace1 = 0.0;
};

double spectral_trace(const Spectrum& s) {
  double t = 0.0;
  for (const auto& b : s.blocks) t += b.values.sum();
  return t;
}

OverlapKernel overlap_kernel(const Spectrum& rho0, const Spectrum& rho1) {
  OverlapKernel kernel;
  kernel.trace0 = spectral_trace(rho0);
  kernel.trace1 = spectral_trace(rho1);
  for (const auto& b0 : rho0.blocks) {
    const BlockSpectrum* b1 = rho1.find(b0.key);
    if (b1 == nullptr) continue;
    if (b1->vectors.rows() != b0.vectors.rows())
      throw DomainError("trunc", "block sizes differ for key " + std::to_string(b0.key));
    Eigen::MatrixXd m = b0.vectors.transpose() * b1->vectors;
    kernel.blocks.push_back({b0.values, b1->values, m.cwiseAbs2()});
  }
  return kernel;
}

// lambda^p with 0^0 = 0: at p = 0 this is the support projector.
Eigen::VectorXd fractional_power(const Eigen::VectorXd& lambda, double p) {
  Eigen::VectorXd out(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    out[i] = lambda[i] > 0.0 ? std::pow(lambda[i], p) : 0.0;
  return out;
}

double evaluate(const OverlapKernel& kernel, double s) {
  double total = 0.0;
  for (const auto& b : kernel.blocks)
    total += fractional_power(b.lambda0, s).dot(b.weights * fractional_power(b.lambda1, 1.0 - s));
  return total;
}

// Q_s of the two truncated states after each is rescaled to unit trace.
double evaluate_normalised(const OverlapKernel& kernel, double s) {
  return evaluate(kernel, s) / (std::pow(kernel.trace0, s) * std::pow(kernel.trace1, 1.0 - s));
}

ChernoffResult minimise(const OverlapKernel& kernel) {
  auto f = [&](double s) { return evaluate_normalised(kernel, s); };

  constexpr int kScan = 101;
  std::vector<double> scan(kScan);
  for (int i = 0; i < kScan; ++i) scan[i] = f(i / (kScan - 1.0));
  const auto [lo_it, hi_it] = std::minmax_element(scan.begin(), scan.end());

  ChernoffResult r;
  r.q_half = scan[kScan / 2];
  if (*hi_it - *lo_it <= 1e-15) {
    r.s_star = 0.5;
    r.q_qcb = r.q_half;
  } else {
    double s = special::golden_section_minimize(f, 0.0, 1.0, 1e-4);
    double q = f(s);
    const auto best = static_cast<int>(lo_it - scan.begin());
    if (*lo_it < q - 1e-12) {
      const double lo = std::max(0.0, (best - 1) / (kScan - 1.0));
      const double hi = std::min(1.0, (best + 1) / (kScan - 1.0));
      s = special::golden_section_minimize(f, lo, hi, 1e-4);
      q = f(s);
    }
    if (q < r.q_half) {
      r.s_star = s;
      r.q_qcb = q;
    } else {
      r.s_star = 0.5;
      r.q_qcb = r.q_half;
    }
  }
  r.exponent = std::max(0.0, -std::log(r.q_qcb));
  return r;
}

}  // namespace

double q_s(const Spectrum& rho0, const Spectrum& rho1, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s", "must lie in [0, 1]");
  return evaluate(overlap_kernel(rho0, rho1), s);
}

double q_s(const JointState& rho0, const JointState& rho1, double s) {
  const SpectralData spectra = block_eigendecompose(rho0, rho1, SpectralMode::each);
  return q_s(spectra.first, spectra.second, s);
}

ChernoffResult qcb(const Spectrum& rho0, const Spectrum& rho1) {
  return minimise(overlap_kernel(rho0, rho1));
}

ChernoffResult qcb(const JointState& rho0, const JointState& rho1) {
  const SpectralData spectra = block_eigendecompose(rho0, rho1, SpectralMode::each);
  return qcb(spectra.first, spectra.second);
}

SpdcPair build_spdc_pair(const ScenarioParams& params, double tail_tol) {
  const TruncationSpec trunc = TruncationSpec::for_params(params, tail_tol);
  return {build_rho0(params, trunc), build_rho1(params, trunc)};
}

CoherentPair build_coherent_pair(const ScenarioParams& params, double tail_tol) {
  const double alpha = std::sqrt(params.kappa * params.n_s);
  const int cutoff = thermal_cutoff(alpha * alpha + params.n_b, tail_tol);
  return {single_block(build_thermal(params.n_b, cutoff)),
          single_block(build_displaced_thermal(alpha, params.n_b, cutoff, tail_tol)), cutoff};
}

ChernoffResult spdc_chernoff(const ScenarioParams& params, double tail_tol) {
  const SpdcPair pair = build_spdc_pair(params, tail_tol);
  return qcb(pair.rho0, pair.rho1);
}

ChernoffResult coherent_chernoff(const ScenarioParams& params, double tail_tol) {
  const CoherentPair pair = build_coherent_pair(params, tail_tol);
  return qcb(decompose(pair.rho0, true), decompose(pair.rho1, true));
}

BoundTriple error_prob_bounds_from_exponents(double r_half, double r_qcb, std::int64_t k) {
  if (k < 1) throw DomainError("k", "must be >= 1");
  if (!(r_half >= 0.0) || !(r_qcb >= r_half) || !std::isfinite(r_qcb))
    throw DomainError("q", "need 0 < Q_qcb <= Q_half <= 1");

  const double kd = static_cast<double>(k);
  BoundTriple b;
  b.log_upper_qcb = -kd * r_qcb - std::numbers::ln2;
  b.log_upper_bhatt = -kd * r_half - std::numbers::ln2;
  // (1 - sqrt(1 - x))/2 = x / (2 (1 + sqrt(1 - x))), x = Q_half^(2K)
  const double log_x = -2.0 * kd * r_half;
  b.log_lower = log_x - std::numbers::ln2 - std::log1p(std::sqrt(-std::expm1(log_x)));
  b.lower = std::exp(b.log_lower);
  b.upper_qcb = std::exp(b.log_upper_qcb);
  b.upper_bhatt = std::exp(b.log_upper_bhatt);
  return b;
}

BoundTriple error_prob_bounds(double q_half, double q_qcb, std::int64_t k) {
  if (!(q_qcb > 0.0 && q_qcb <= q_half && q_half <= 1.0))
    throw DomainError("q", "need 0 < Q_qcb <= Q_half <= 1");
  return error_prob_bounds_from_exponents(-std::log(q_half), -std::log(q_qcb), k);
}

ExponentReport asymptotic_exponents(const ScenarioParams& params) {
  if (!(params.n_b > 0.0)) throw DomainError("n_b", "closed-form exponents need N_B > 0");
  const ScenarioParams p = validate_params(params);
  ExponentReport r;
  const double signal = p.kappa * p.n_s;
  r.r_q = signal / p.n_b;
  r.r_c = signal / (4.0 * p.n_b);
  r.r_c_hom = signal / (4.0 * p.n_b + 2.0);
  r.regime_approximation = !p.asymptotic_regime;
  return r;
}

}  // namespace qillum
