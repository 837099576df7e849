#include "qillum/special.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <vector>

#include "qillum/errors.hpp"

namespace qillum::special {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;
constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kLnSqrtPi = 0.57236494292470008707171367567653;

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 5'000'000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

// ln[ x^a y^b / B(a, b) ] with y = 1 - x.
double log_beta_prefactor(double a, double b, double x, double y) {
  if (a >= 1.0 && b >= 1.0) {
    // x^a y^b / B(a,b) = (a+b-1) x y C(a+b-2, a-1) x^(a-1) y^(b-1)
    return std::log(a + b - 1.0) + std::log(x) + std::log(y) +
           log_binomial_pmf(a - 1.0, a + b - 2.0, x, y);
  }
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log(y);
}

}  // namespace

double log_factorial(double n) { return std::lgamma(n + 1.0); }

double hypergeom_2f1_terminating(int n1, int n2, int c_mag, double z) {
  if (n1 < 0 || n2 < 0) throw DomainError("n", "series indices must be non-negative");
  if (c_mag < n1 + n2)
    throw DomainError("c_mag", "third parameter magnitude must be >= n1 + n2");
  if (z == 0.0) return 1.0;

  const int terms = std::min(n1, n2);
  const double log_abs_z = std::log(std::abs(z));
  const bool z_negative = z < 0.0;
  CompensatedSum sum;
  sum.add(1.0);
  for (int j = 1; j <= terms; ++j) {
    const double log_mag = log_factorial(n1) - log_factorial(n1 - j) + log_factorial(n2) -
                           log_factorial(n2 - j) - (log_factorial(c_mag) - log_factorial(c_mag - j)) -
                           log_factorial(j) + j * log_abs_z;
    // (-n1)_j (-n2)_j > 0 while (-c)_j carries (-1)^j.
    const bool negative = ((j % 2) == 1) != (z_negative && (j % 2) == 1);
    const double term = std::exp(log_mag);
    sum.add(negative ? -term : term);
  }
  return sum.value();
}

double log_hypergeom_2f1_positive(int n1, int n2, double c, double w) {
  if (n1 < 0 || n2 < 0) throw DomainError("n", "series indices must be non-negative");
  if (!(c > 0.0)) throw DomainError("c", "must be positive");
  if (!(w >= 0.0)) throw DomainError("w", "argument must be non-negative");
  if (w == 0.0) return 0.0;

  const int terms = std::min(n1, n2);
  const double log_w = std::log(w);
  double log_term = 0.0;
  double log_sum = 0.0;
  for (int j = 0; j < terms; ++j) {
    log_term += std::log(static_cast<double>(n1 - j)) + std::log(static_cast<double>(n2 - j)) -
                std::log(c + j) - std::log(j + 1.0) + log_w;
    log_sum = log_add(log_sum, log_term);
  }
  return log_sum;
}

double half_erfc(double x) { return 0.5 * std::erfc(x); }

double log_half_erfc(double x) {
  if (x < 26.0) return std::log(0.5 * std::erfc(x));
  // erfc(x) ~ exp(-x^2)/(x sqrt(pi)) * sum_n (-1)^n (2n-1)!! / (2x^2)^n
  const double inv = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double series = 1.0;
  for (int n = 1; n < 12; ++n) {
    term *= -(2.0 * n - 1.0) * inv;
    series += term;
  }
  return -x * x - std::log(x) - kLnSqrtPi - std::numbers::ln2 + std::log(series);
}

double normal_upper_tail(double z) { return half_erfc(z / std::numbers::sqrt2); }

double log_normal_upper_tail(double z) { return log_half_erfc(z / std::numbers::sqrt2); }

double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    if (n == 0.0) return kLnSqrt2Pi;
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
  }
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

double binomial_deviance(double x, double np) {
  if (x == 0.0) return np;
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

double log_binomial_pmf(double x, double n, double p, double q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (x < 0.0 || x > n) return kNegInf;
  if (p == 0.0) return x == 0.0 ? 0.0 : kNegInf;
  if (q == 0.0) return x == n ? 0.0 : kNegInf;
  if (x == 0.0) {
    if (n == 0.0) return 0.0;
    return p < 0.1 ? -binomial_deviance(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) return q < 0.1 ? -binomial_deviance(n, n * p) - n * q : n * std::log(p);
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    binomial_deviance(x, n * p) - binomial_deviance(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

double log_negbinomial_pmf(double x, double r, double p, double q) {
  if (x < 0.0) return -std::numeric_limits<double>::infinity();
  if (x == 0.0) return r * std::log(p);
  // C(x+r-1, x) p^r q^x = r/(x+r) * C(x+r, r) p^r q^x
  return std::log(r / (x + r)) + log_binomial_pmf(r, x + r, p, q);
}

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

BetaTails incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("a,b", "incomplete beta needs a, b > 0");
  if (x <= 0.0) return {Prob::zero(), Prob::one()};
  if (y <= 0.0) return {Prob::one(), Prob::zero()};

  const double log_bt = log_beta_prefactor(a, b, x, y);
  BetaTails out;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double log_small = log_bt + std::log(beta_continued_fraction(a, b, x)) - std::log(a);
    out.lower = Prob::from_log(std::min(log_small, 0.0));
    const double log_rest = std::log1p(-std::min(out.lower.p, 1.0));
    out.upper = Prob::from_log(log_rest);
  } else {
    const double log_small = log_bt + std::log(beta_continued_fraction(b, a, y)) - std::log(b);
    out.upper = Prob::from_log(std::min(log_small, 0.0));
    const double log_rest = std::log1p(-std::min(out.upper.p, 1.0));
    out.lower = Prob::from_log(log_rest);
  }
  return out;
}

Prob binomial_upper_tail(std::int64_t trials, std::int64_t t, double q, double qc) {
  if (t <= 0) return Prob::one();
  if (t > trials) return Prob::zero();
  // P(X >= t) = I_q(t, n - t + 1)
  return incomplete_beta(static_cast<double>(t), static_cast<double>(trials - t + 1), q, qc).lower;
}

Prob binomial_lower_tail(std::int64_t trials, std::int64_t t, double q, double qc) {
  if (t < 0) return Prob::zero();
  if (t >= trials) return Prob::one();
  // 1 - P(X >= t + 1)
  return incomplete_beta(static_cast<double>(t + 1), static_cast<double>(trials - t), q, qc).upper;
}

Prob thermal_count_lower_tail(std::int64_t modes, std::int64_t t, double mean) {
  if (t < 0) return Prob::zero();
  if (mean == 0.0) return Prob::one();
  // Success probability p = 1/(1+N) per mode; P(N <= t) = I_p(K, t + 1).
  const double p = 1.0 / (1.0 + mean);
  const double q = mean / (1.0 + mean);
  return incomplete_beta(static_cast<double>(modes), static_cast<double>(t + 1), p, q).lower;
}

Prob thermal_count_upper_tail(std::int64_t modes, std::int64_t t, double mean) {
  if (t <= 0) return Prob::one();
  if (mean == 0.0) return Prob::zero();
  const double p = 1.0 / (1.0 + mean);
  const double q = mean / (1.0 + mean);
  return incomplete_beta(static_cast<double>(modes), static_cast<double>(t), p, q).upper;
}

double thermal_count_log_pmf(std::int64_t modes, std::int64_t n, double mean) {
  if (n < 0) return -INFINITY;
  if (mean == 0.0) return n == 0 ? 0.0 : -INFINITY;
  const double p = 1.0 / (1.0 + mean);
  const double q = mean / (1.0 + mean);
  return log_negbinomial_pmf(static_cast<double>(n), static_cast<double>(modes), p, q);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace qillum::special
