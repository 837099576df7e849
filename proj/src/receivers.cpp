#include "qillum/receivers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "qillum/errors.hpp"
#include "qillum/special.hpp"

namespace qillum {

namespace {

using special::Prob;

constexpr double kInvLn10 = 1.0 / std::numbers::ln10;
constexpr double kScanWidth = 12.0;  // standard deviations on each side

ErrorProbability from_log(double log_pe) {
  return {std::exp(log_pe), log_pe * kInvLn10};
}

ErrorProbability half() { return from_log(-std::numbers::ln2); }

// Per-mode count law for one hypothesis; `trials` is K.
struct CountLaw {
  double mean_per_mode;
  double sd_per_mode;
  std::function<Prob(std::int64_t)> at_least;  // P(N >= t)
  std::function<Prob(std::int64_t)> below;     // P(N < t)
  std::function<double(std::int64_t)> log_pmf;
  std::int64_t max_count;  // largest attainable count (or a huge sentinel)
};

CountLaw thermal_law(double mean, std::int64_t k) {
  return {mean,
          std::sqrt(mean * (mean + 1.0)),
          [=](std::int64_t t) { return special::thermal_count_upper_tail(k, t, mean); },
          [=](std::int64_t t) { return special::thermal_count_lower_tail(k, t - 1, mean); },
          [=](std::int64_t n) { return special::thermal_count_log_pmf(k, n, mean); },
          std::numeric_limits<std::int64_t>::max() / 4};
}

CountLaw click_law(double mean, std::int64_t k) {
  // A thermal mode of mean N is empty with probability 1/(1+N).
  const double q = mean / (1.0 + mean);
  const double qc = 1.0 / (1.0 + mean);
  return {q,
          std::sqrt(q * qc),
          [=](std::int64_t t) { return special::binomial_upper_tail(k, t, q, qc); },
          [=](std::int64_t t) { return special::binomial_lower_tail(k, t - 1, q, qc); },
          [=](std::int64_t n) {
            return special::log_binomial_pmf(static_cast<double>(n), static_cast<double>(k), q, qc);
          },
          k};
}

ErrorProbability threshold_error(const CountLaw& h0, const CountLaw& h1, std::int64_t t) {
  const double log_false_alarm = h0.at_least(t).log_p;
  const double log_miss = h1.below(t).log_p;
  return from_log(special::log_add(log_false_alarm, log_miss) - std::numbers::ln2);
}

std::int64_t formula_threshold(const CountLaw& h0, const CountLaw& h1, std::int64_t k) {
  const double s0 = h0.sd_per_mode;
  const double s1 = h1.sd_per_mode;
  const double t =
      static_cast<double>(k) * (s1 * h0.mean_per_mode + s0 * h1.mean_per_mode) / (s0 + s1);
  return static_cast<std::int64_t>(std::ceil(t));
}

// P_e(t+1) - P_e(t) = (p1(t) - p0(t)) / 2, so the best threshold minimises
// the running sum of pmf differences across the window.
std::int64_t scan_threshold(const CountLaw& h0, const CountLaw& h1, std::int64_t k) {
  const double kd = static_cast<double>(k);
  const double spread = kScanWidth * std::sqrt(kd) * std::max(h0.sd_per_mode, h1.sd_per_mode);
  const auto lo = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::floor(kd * h0.mean_per_mode - spread)));
  const auto hi = std::min<std::int64_t>(
      h0.max_count + 1, static_cast<std::int64_t>(std::ceil(kd * h1.mean_per_mode + spread)) + 1);

  std::int64_t best = lo;
  double running = 0.0;
  double best_value = 0.0;
  for (std::int64_t n = lo; n < hi; ++n) {
    running += std::exp(h1.log_pmf(n)) - std::exp(h0.log_pmf(n));
    if (running < best_value) {
      best_value = running;
      best = n + 1;
    }
  }
  return best;
}

ThresholdDecision decide(const CountLaw& h0, const CountLaw& h1, std::int64_t k,
                         ThresholdPolicy policy) {
  ThresholdDecision out;
  if (h0.mean_per_mode == h1.mean_per_mode) {
    out.degenerate = true;
    out.rule.threshold = policy == ThresholdPolicy::optimal_scan ? 0 : formula_threshold(h0, h1, k);
    out.error = half();
    return out;
  }
  out.rule.threshold = policy == ThresholdPolicy::paper_formula ? formula_threshold(h0, h1, k)
                                                                : scan_threshold(h0, h1, k);
  out.error = threshold_error(h0, h1, out.rule.threshold);
  return out;
}

void require_k(std::int64_t k) {
  if (k < 1) throw DomainError("k", "number of mode pairs must be >= 1");
}

// N1 - N0 without cancellation.
double mean_gap(const ScenarioParams& p, double gain) {
  const double g1 = gain - 1.0;
  return g1 * p.kappa * p.n_s +
         2.0 * std::sqrt(gain * g1) * std::sqrt(p.kappa * p.n_s * (p.n_s + 1.0));
}

}  // namespace

ErrorProbability homodyne_error(const ScenarioParams& params, std::int64_t k) {
  require_k(k);
  const double x =
      std::sqrt(params.kappa * params.n_s * static_cast<double>(k) / (4.0 * params.n_b + 2.0));
  return from_log(special::log_half_erfc(x));
}

OpaStatistics opa_output_means(const ScenarioParams& params, double gain) {
  if (!(gain > 1.0) || !std::isfinite(gain)) throw DomainError("gain", "OPA gain must be > 1");
  OpaStatistics s;
  s.gain = gain;
  s.epsilon = std::sqrt(gain - 1.0);
  s.n0 = gain * params.n_s + (gain - 1.0) * (1.0 + params.n_b);
  s.n1 = s.n0 + mean_gap(params, gain);
  s.sigma0 = std::sqrt(s.n0 * (s.n0 + 1.0));
  s.sigma1 = std::sqrt(s.n1 * (s.n1 + 1.0));
  return s;
}

double opa_count_pmf(double mean, std::int64_t k, std::int64_t n) {
  require_k(k);
  if (!(mean >= 0.0)) throw DomainError("mean", "must be >= 0");
  return std::exp(special::thermal_count_log_pmf(k, n, mean));
}

ThresholdDecision opa_error_exact(const ScenarioParams& params, double gain, std::int64_t k,
                                  ThresholdPolicy policy) {
  require_k(k);
  const OpaStatistics s = opa_output_means(params, gain);
  return decide(thermal_law(s.n0, k), thermal_law(s.n1, k), k, policy);
}

ThresholdDecision opa_error_onoff(const ScenarioParams& params, double gain, std::int64_t k,
                                  ThresholdPolicy policy) {
  require_k(k);
  const OpaStatistics s = opa_output_means(params, gain);
  return decide(click_law(s.n0, k), click_law(s.n1, k), k, policy);
}

double opa_exponent(const ScenarioParams& params, double gain) {
  const OpaStatistics s = opa_output_means(params, gain);
  const double gap = mean_gap(params, gain);
  const double spread = s.sigma0 + s.sigma1;
  return gap * gap / (2.0 * spread * spread);
}

GaussianOpaResult opa_error_gaussian(const ScenarioParams& params, double gain, std::int64_t k) {
  require_k(k);
  GaussianOpaResult r;
  r.r_opa = opa_exponent(params, gain);
  r.error = from_log(special::log_half_erfc(std::sqrt(r.r_opa * static_cast<double>(k))));
  return r;
}

GainOptimum optimize_gain(const ScenarioParams& params) {
  // Search variable x = ln(G - 1) on [ln 1e-12, ln 0.5].
  const double lo = std::log(1e-12);
  const double hi = std::log(0.5);
  auto neg_rate = [&](double x) { return -opa_exponent(params, 1.0 + std::exp(x)); };

  constexpr int kCoarse = 49;
  int best = 0;
  double best_value = 0.0;
  for (int i = 0; i < kCoarse; ++i) {
    const double v = neg_rate(lo + (hi - lo) * i / (kCoarse - 1.0));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }

  GainOptimum out;
  if (best_value == 0.0) {
    out.degenerate = true;
    out.gain = 1.0 + std::exp(hi);
    out.r_opa = 0.0;
    return out;
  }
  const double step = (hi - lo) / (kCoarse - 1.0);
  const double a = std::max(lo, lo + (best - 1) * step);
  const double b = std::min(hi, lo + (best + 1) * step);
  const double x = special::golden_section_minimize(neg_rate, a, b, 1e-4);
  out.gain = 1.0 + std::exp(x);
  out.r_opa = opa_exponent(params, out.gain);
  return out;
}

double bhattacharyya_preset_gain(const ScenarioParams& params) {
  if (!(params.n_b > 0.0)) throw DomainError("n_b", "preset gain needs N_B > 0");
  return 1.0 + params.n_s / std::sqrt(params.n_b);
}

double resolve_gain(const ScenarioParams& params, const GainSetting& setting) {
  switch (setting.mode) {
    case GainSetting::Mode::fixed:
      if (!(setting.value > 1.0)) throw DomainError("gain", "OPA gain must be > 1");
      return setting.value;
    case GainSetting::Mode::bhattacharyya_preset: return bhattacharyya_preset_gain(params);
    case GainSetting::Mode::automatic: break;
  }
  return optimize_gain(params).gain;
}

BhattacharyyaResult opa_bhattacharyya(const ScenarioParams& params, double gain) {
  const OpaStatistics s = opa_output_means(params, gain);
  // 1/Q_B - 1 = (sqrt N1 - sqrt N0)^2 / (sqrt((1+N0)(1+N1)) + 1 + sqrt(N0 N1))
  const double root_gap = mean_gap(params, gain) / (std::sqrt(s.n1) + std::sqrt(s.n0));
  const double excess = root_gap * root_gap /
                        (std::sqrt((1.0 + s.n0) * (1.0 + s.n1)) + 1.0 + std::sqrt(s.n0 * s.n1));
  BhattacharyyaResult r;
  r.r_b_exact = std::log1p(excess);
  r.q_b = 1.0 / (1.0 + excess);

  const double eps2 = gain - 1.0;
  const double ns = params.n_s;
  r.r_b_paper_form = eps2 * params.kappa * ns * (ns + 1.0) /
                     (2.0 * ns * (ns + 1.0) +
                      2.0 * eps2 * (1.0 + 2.0 * ns) * (1.0 + ns + params.n_b));
  return r;
}

HelstromResult helstrom_single_shot(const JointState& rho0, const JointState& rho1) {
  const SpectralData diff = block_eigendecompose(rho0, rho1, SpectralMode::difference);
  const SpectralData each = block_eigendecompose(rho0, rho1, SpectralMode::each);

  HelstromResult r;
  r.clamped_mass = each.first.clamped_mass + each.second.clamped_mass;

  double largest = 0.0;
  for (const auto& b : diff.first.blocks)
    if (b.values.size() > 0) largest = std::max(largest, b.values.cwiseAbs().maxCoeff());
  if (largest <= 1e-14) {
    r.degenerate = true;
    return r;
  }

  double positive = 0.0;
  double accept0 = 0.0;  // Tr(P rho0)
  double accept1 = 0.0;  // Tr(P rho1)
  for (const auto& b : diff.first.blocks) {
    const Block* m0 = rho0.rho.find(b.key);
    const Block* m1 = rho1.rho.find(b.key);
    for (Eigen::Index i = 0; i < b.values.size(); ++i) {
      if (b.values[i] <= 0.0) continue;
      positive += b.values[i];
      const auto v = b.vectors.col(i);
      if (m0 != nullptr) accept0 += v.dot(m0->matrix * v);
      if (m1 != nullptr) accept1 += v.dot(m1->matrix * v);
    }
  }
  r.trace_distance = positive;
  r.pe_single = 0.5 * (1.0 - positive);
  r.p01 = accept0;
  r.p10 = 1.0 - accept1;
  return r;
}

MajorityVoteResult majority_vote_error(double p01, double p10, std::int64_t k,
                                       VoteMethod method) {
  require_k(k);
  constexpr double kSlack = 1e-12;
  if (!(p01 >= 0.0 && p01 <= 0.5 + kSlack))
    throw DomainError("p01", "majority vote needs per-pair error <= 1/2");
  if (!(p10 >= 0.0 && p10 <= 0.5 + kSlack))
    throw DomainError("p10", "majority vote needs per-pair error <= 1/2");

  // Target absent errs when more than half the votes say present; target
  // present errs when at least half say absent (ties go to absent).
  const std::int64_t false_alarm_at = k / 2 + 1;
  const std::int64_t miss_at = (k + 1) / 2;

  MajorityVoteResult out;
  if (k % 2 == 0)
    out.tie_mass = std::exp(special::log_binomial_pmf(static_cast<double>(k / 2),
                                                      static_cast<double>(k), p10, 1.0 - p10));

  double log_a = -INFINITY;
  double log_b = -INFINITY;
  if (method == VoteMethod::exact_binomial) {
    log_a = special::binomial_upper_tail(k, false_alarm_at, p01, 1.0 - p01).log_p;
    log_b = special::binomial_upper_tail(k, miss_at, p10, 1.0 - p10).log_p;
  } else {
    const double kd = static_cast<double>(k);
    auto gaussian_tail = [&](double p, double boundary) {
      const double var = kd * p * (1.0 - p);
      if (var == 0.0) return kd * p >= boundary ? 0.0 : -INFINITY;
      return special::log_normal_upper_tail((boundary - kd * p) / std::sqrt(var));
    };
    // Continuity correction puts the boundary half-way between the last
    // correct count and the first erroneous one.
    log_a = gaussian_tail(p01, static_cast<double>(false_alarm_at) - 0.5);
    log_b = gaussian_tail(p10, static_cast<double>(miss_at) - 0.5);
  }
  out.error = from_log(special::log_add(log_a, log_b) - std::numbers::ln2);
  return out;
}

MajorityVoteResult separable_helstrom_error(const HelstromResult& helstrom, std::int64_t k,
                                            VoteMethod method) {
  const double p = std::min(helstrom.pe_single, 0.5);
  return majority_vote_error(p, p, k, method);
}

}  // namespace qillum
