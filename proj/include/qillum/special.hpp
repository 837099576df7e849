#pragma once

// Special functions and discrete-distribution tails, all evaluated in a way
// that keeps full relative precision deep into the tails.

#include <cmath>
#include <cstdint>
#include <functional>

namespace qillum::special {

/// ln(n!) for real n >= 0.
double log_factorial(double n);

/// Terminating Gauss series 2F1(-n1, -n2; -c_mag; z), c_mag >= n1 + n2.
/// Terms are formed from log-magnitudes and summed with compensation.
/// Throws DomainError if c_mag < n1 + n2.
double hypergeom_2f1_terminating(int n1, int n2, int c_mag, double z);

/// 2F1(-n1, -n2; c; w) for c > 0 and w >= 0. Every term is non-negative, so
/// there is no cancellation. Relates to the form above through
///   2F1(-n1,-n2;-(n1+n2+l);z) = (n1+l)!(n2+l)!/(l!(n1+n2+l)!) 2F1(-n1,-n2;l+1;1-z).
/// Returns the logarithm of the sum.
double log_hypergeom_2f1_positive(int n1, int n2, double c, double w);

/// 1/2 erfc(x) and its natural log. The log stays finite for any x >= 0
/// (asymptotic series past x = 26).
double half_erfc(double x);
double log_half_erfc(double x);

/// Standard normal upper tail Q(z) = P(Z > z), and its log.
double normal_upper_tail(double z);
double log_normal_upper_tail(double z);

/// Stirling-series remainder ln(n!) - [(n+1/2)ln n - n + ln sqrt(2 pi)].
double stirling_error(double n);

/// Saddle-point deviance x ln(x/np) + np - x, accurate when x ~ np.
double binomial_deviance(double x, double np);

/// ln[ C(n, x) p^x q^(n-x) ] for real 0 <= x <= n, q = 1 - p supplied
/// separately so that tiny complements keep their precision.
double log_binomial_pmf(double x, double n, double p, double q);

/// ln[ C(x + r - 1, x) p^r q^x ]: negative-binomial pmf with r successes.
double log_negbinomial_pmf(double x, double r, double p, double q);

/// A probability carried together with its natural log.
struct Prob {
  double p = 0.0;
  double log_p = -INFINITY;

  static Prob from_log(double log_p) { return {std::exp(log_p), log_p}; }
  static Prob zero() { return {}; }
  static Prob one() { return {1.0, 0.0}; }
};

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

/// Regularised incomplete beta I_x(a, b) and its complement 1 - I_x(a, b).
/// The smaller of the two tails is computed directly by Lentz's continued
/// fraction; the other one by complement. `y` must equal 1 - x.
struct BetaTails {
  Prob lower;  ///< I_x(a, b)
  Prob upper;  ///< 1 - I_x(a, b)
};
BetaTails incomplete_beta(double a, double b, double x, double y);

/// P(X >= t) and P(X <= t) for X ~ Binomial(trials, q); qc = 1 - q.
Prob binomial_upper_tail(std::int64_t trials, std::int64_t t, double q, double qc);
Prob binomial_lower_tail(std::int64_t trials, std::int64_t t, double q, double qc);

/// P(N >= t) and P(N <= t) for the total photon count of `modes` independent
/// thermal modes with per-mode mean `mean`.
Prob thermal_count_upper_tail(std::int64_t modes, std::int64_t t, double mean);
Prob thermal_count_lower_tail(std::int64_t modes, std::int64_t t, double mean);

/// ln P(N = n) for the same K-mode thermal count.
double thermal_count_log_pmf(std::int64_t modes, std::int64_t n, double mean);

/// Golden-section minimisation of a unimodal function on [lo, hi]. Stops
/// once the bracket is narrower than `tol`. Returns the abscissa.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

}  // namespace qillum::special
