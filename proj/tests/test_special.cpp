#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qillum/errors.hpp"
#include "qillum/special.hpp"

using namespace qillum;
using namespace qillum::special;
using oracle::Rational;

namespace {

double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

TEST_SUITE("special") {

TEST_CASE("log_factorial matches small factorials") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(rel_err(log_factorial(5), std::log(120.0)) < 1e-15);
  CHECK(rel_err(log_factorial(170), std::lgamma(171.0)) < 1e-14);
}

TEST_CASE("terminating 2F1 hand values") {
  CHECK(hypergeom_2f1_terminating(0, 0, 0, 0.7) == 1.0);
  CHECK(hypergeom_2f1_terminating(1, 1, 2, 0.4) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(hypergeom_2f1_terminating(1, 1, 2, -3.0) == doctest::Approx(2.5).epsilon(1e-15));
  const double want = to_double(oracle::hypergeom_2f1_exact(2, 1, 4, Rational(1, 2)));
  CHECK(rel_err(hypergeom_2f1_terminating(2, 1, 4, 0.5), want) < 1e-15);
  CHECK_THROWS_AS(hypergeom_2f1_terminating(3, 2, 4, 0.5), DomainError);
}

TEST_CASE("terminating 2F1 agrees with exact rational arithmetic") {
  const Rational zs[] = {Rational(-2), Rational(-1), Rational(0), Rational(1, 2), Rational(1)};
  double worst = 0.0;
  for (int n1 = 0; n1 <= 10; ++n1)
    for (int n2 = 0; n2 <= 10; ++n2)
      for (int l = 0; l <= 5; ++l)
        for (const Rational& z : zs) {
          const int c = n1 + n2 + l;
          const double want = to_double(oracle::hypergeom_2f1_exact(n1, n2, c, z));
          // Every term of the series at -|z| is positive with the same
          // magnitude, so this is the scale that rounding errors live on.
          const double scale = to_double(oracle::hypergeom_2f1_exact(n1, n2, c, -abs(z)));
          const double got = hypergeom_2f1_terminating(n1, n2, c, to_double(z));
          worst = std::max(worst, std::abs(got - want) / scale);
        }
  CHECK(worst < 1e-13);
}

TEST_CASE("positive-term 2F1 reproduces the terminating form") {
  // 2F1(-n1,-n2;-(n1+n2+l);1-w) = (n1+l)!(n2+l)!/(l!(n1+n2+l)!) 2F1(-n1,-n2;l+1;w)
  const Rational ws[] = {Rational(1, 10), Rational(1, 2), Rational(2), Rational(1, 1000)};
  double worst = 0.0;
  for (int n1 = 0; n1 <= 10; ++n1)
    for (int n2 = 0; n2 <= 10; ++n2)
      for (int l = 0; l <= 5; ++l)
        for (const Rational& w : ws) {
          const double want =
              to_double(oracle::hypergeom_2f1_exact(n1, n2, n1 + n2 + l, Rational(1) - w));
          const double log_prefactor = log_factorial(n1 + l) + log_factorial(n2 + l) -
                                       log_factorial(l) - log_factorial(n1 + n2 + l);
          const double got =
              std::exp(log_prefactor + log_hypergeom_2f1_positive(n1, n2, l + 1.0, to_double(w)));
          worst = std::max(worst, rel_err(got, want));
        }
  CHECK(worst < 1e-12);
}

TEST_CASE("log_half_erfc against 50-digit erfc") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  double worst = 0.0;
  for (double x = 0.0; x <= 40.0; x += 0.37) {
    const Big want = boost::multiprecision::log(boost::math::erfc(Big(x)) / 2);
    worst = std::max(worst, rel_err(log_half_erfc(x), want.convert_to<double>()));
    if (x <= 27.0) {
      const Big v = boost::math::erfc(Big(x)) / 2;
      CHECK(rel_err(half_erfc(x), v.convert_to<double>()) < 1e-10);
    }
  }
  CHECK(worst < 1e-10);
  CHECK(half_erfc(0.0) == 0.5);
}

TEST_CASE("normal tail is a rescaled erfc") {
  for (double z : {-3.0, -0.5, 0.0, 0.7, 5.0, 30.0}) {
    CHECK(rel_err(normal_upper_tail(z), half_erfc(z / std::sqrt(2.0))) < 1e-14);
    CHECK(rel_err(log_normal_upper_tail(z), std::log(normal_upper_tail(z))) < 1e-12);
  }
}

TEST_CASE("stirling_error and binomial pmf against lgamma") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  for (double n : {1.0, 7.0, 15.5, 60.0, 1e3}) {
    const Big bn(n);
    const Big direct = boost::math::lgamma(bn + 1) -
                       ((bn + Big(0.5)) * log(bn) - bn +
                        log(2 * boost::math::constants::pi<Big>()) / 2);
    // small n go through lgamma differences, accurate relative to lgamma itself
    const double scale = std::max(1.0, std::lgamma(n + 1.0));
    CHECK(std::abs(stirling_error(n) - direct.convert_to<double>()) < 1e-15 * scale);
  }
  for (std::int64_t n : {1, 5, 40, 200})
    for (std::int64_t x = 0; x <= n; x += std::max<std::int64_t>(1, n / 7)) {
      const double p = 0.137;
      const double want = std::log(static_cast<double>(oracle::binomial_pmf(n, x, p)));
      CHECK(std::abs(log_binomial_pmf(x, n, p, 1.0 - p) - want) < 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("thermal count pmf and tails against direct summation") {
  for (std::int64_t k : {1, 10, 50, 1000})
    for (double mean : {0.115, 0.116475, 2.0}) {
      const double centre = k * mean;
      const double sd = std::sqrt(k * mean * (mean + 1.0));
      for (double z : {-2.0, -0.5, 0.0, 1.0, 3.0, 8.0}) {
        const auto t = static_cast<std::int64_t>(std::max(0.0, std::round(centre + z * sd)));
        const auto want = oracle::thermal_count_tails(k, t, mean);
        CHECK(rel_err(thermal_count_lower_tail(k, t, mean).p, static_cast<double>(want.lower)) <
              1e-11);
        CHECK(rel_err(thermal_count_upper_tail(k, t, mean).p, static_cast<double>(want.upper)) <
              1e-11);
      }
    }
  // pmf normalisation
  double total = 0.0;
  for (int n = 0; n <= 200; ++n) total += std::exp(thermal_count_log_pmf(10, n, 0.115));
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(thermal_count_upper_tail(5, 0, 0.3).p == 1.0);
}

TEST_CASE("binomial tails against direct summation") {
  for (std::int64_t n : {1, 3, 20, 200})
    for (double q : {0.02, 0.3, 0.5, 0.91})
      for (std::int64_t t = 0; t <= n; t += std::max<std::int64_t>(1, n / 9)) {
        long double upper = 0.0L;
        long double lower = 0.0L;
        for (std::int64_t x = 0; x <= n; ++x) {
          const long double pmf = oracle::binomial_pmf(n, x, q);
          if (x >= t) upper += pmf;
          if (x <= t) lower += pmf;
        }
        CHECK(rel_err(binomial_upper_tail(n, t, q, 1.0 - q).p, static_cast<double>(upper)) < 1e-11);
        CHECK(rel_err(binomial_lower_tail(n, t, q, 1.0 - q).p, static_cast<double>(lower)) < 1e-11);
      }
  CHECK(binomial_upper_tail(10, 11, 0.4, 0.6).p == 0.0);
  CHECK(binomial_lower_tail(10, 10, 0.4, 0.6).p == 1.0);
}

TEST_CASE("incomplete beta tails are complementary") {
  for (double a : {0.5, 3.0, 400.0})
    for (double b : {1.0, 7.0, 1e5})
      for (double x : {1e-6, 0.01, 0.3, 0.9}) {
        const BetaTails t = incomplete_beta(a, b, x, 1.0 - x);
        CHECK(t.lower.p + t.upper.p == doctest::Approx(1.0).epsilon(1e-13));
      }
}

TEST_CASE("log_add") {
  CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_add(-INFINITY, 1.5) == 1.5);
  CHECK(log_add(-1e4, -1e4) == doctest::Approx(-1e4 + std::log(2.0)));
}

TEST_CASE("golden section finds a parabola vertex") {
  const double x = golden_section_minimize([](double v) { return (v - 0.3) * (v - 0.3); }, 0.0,
                                           1.0, 1e-8);
  CHECK(std::abs(x - 0.3) < 1e-7);
}

}  // TEST_SUITE
