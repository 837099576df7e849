#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

#include "qillum/bounds.hpp"
#include "qillum/errors.hpp"

using namespace qillum;

namespace {

const ScenarioParams kNominal = validate_params({0.01, 0.01, 20.0});

// Chernoff overlap of two displaced thermal states with equal background N
// whose mean fields differ by alpha.
double coherent_q_s(double alpha2, double n, double s) {
  const double a = std::pow(n + 1.0, s) - std::pow(n, s);
  const double b = std::pow(n + 1.0, 1.0 - s) - std::pow(n, 1.0 - s);
  return std::exp(-alpha2 * a * b);
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("q_s of a state with itself is its trace") {
  const SpdcPair pair = build_spdc_pair(kNominal, 1e-9);
  for (double s : {0.0, 0.3, 0.5, 1.0})
    CHECK(std::abs(q_s(pair.rho0, pair.rho0, s) - pair.rho0.trace()) <= 1e-12);
  CHECK(std::abs(q_s(pair.rho0, pair.rho1, 0.0) - pair.rho1.trace()) <= 1e-12);
  CHECK(std::abs(q_s(pair.rho0, pair.rho1, 1.0) - pair.rho0.trace()) <= 1e-12);
  CHECK_THROWS_AS(q_s(pair.rho0, pair.rho1, 1.5), DomainError);

  const ScenarioParams dark = validate_params({0.01, 0.0, 20.0});
  const SpdcPair same = build_spdc_pair(dark, 1e-9);
  CHECK(std::abs(q_s(same.rho0, same.rho1, 0.5) - same.rho0.trace()) <= 1e-12);
  const ChernoffResult c = qcb(same.rho0, same.rho1);
  CHECK(c.s_star == 0.5);
  CHECK(c.exponent <= 1e-9);
}

TEST_CASE("Bhattacharyya overlap at the nominal operating point") {
  const SpdcPair pair = build_spdc_pair(kNominal, 1e-9);
  const double r_half = -std::log(q_s(pair.rho0, pair.rho1, 0.5));
  CHECK(r_half >= 2.5e-6);
  CHECK(r_half <= 5e-6);
  const ChernoffResult c = qcb(pair.rho0, pair.rho1);
  CHECK(c.q_qcb <= c.q_half);
  CHECK(c.s_star >= 0.0);
  CHECK(c.s_star <= 1.0);
  CHECK(c.exponent >= -std::log(c.q_half) - 1e-15);
}

TEST_CASE("coherent pair agrees with the closed-form overlap") {
  const ScenarioParams p = validate_params({0.3, 0.5, 1.0});
  const CoherentPair pair = build_coherent_pair(p, 1e-13);
  const Spectrum s0 = decompose(pair.rho0, true);
  const Spectrum s1 = decompose(pair.rho1, true);
  for (double s : {0.1, 0.2, 0.5, 0.8}) {
    CAPTURE(s);
    CHECK(q_s(s0, s1, s) == doctest::Approx(coherent_q_s(0.15, 1.0, s)).epsilon(1e-9));
  }
  const ChernoffResult c = qcb(s0, s1);
  CHECK(std::abs(c.s_star - 0.5) <= 1e-3);
}

TEST_CASE("coherent Chernoff exponent at the nominal operating point") {
  const ChernoffResult c = coherent_chernoff(kNominal, 1e-9);
  const double exact = -std::log(coherent_q_s(1e-4, 20.0, 0.5));
  CHECK(c.exponent == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("error bounds: trivial overlaps and definitions") {
  const BoundTriple t = error_prob_bounds(1.0, 1.0, 1000);
  CHECK(t.lower == 0.5);
  CHECK(t.upper_qcb == 0.5);
  CHECK(t.upper_bhatt == 0.5);

  const double r = 1e-5;
  const BoundTriple u = error_prob_bounds(std::exp(-r), std::exp(-r), 1000000);
  CHECK(u.upper_qcb == doctest::Approx(std::exp(-10.0) / 2).epsilon(1e-9));
  CHECK(u.upper_bhatt == doctest::Approx(std::exp(-10.0) / 2).epsilon(1e-9));

  CHECK_THROWS_AS(error_prob_bounds(0.9, 0.95, 10), DomainError);
  CHECK_THROWS_AS(error_prob_bounds(1.1, 0.95, 10), DomainError);
  CHECK_THROWS_AS(error_prob_bounds(0.9, 0.8, 0), DomainError);
}

TEST_CASE("lower bound against 50-digit evaluation") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  for (double q_half : {0.999999, 1.0 - 1e-12, 0.9, 0.5})
    for (std::int64_t k : {1LL, 10LL, 1000LL, 1000000LL, 100000000LL}) {
      const BoundTriple b = error_prob_bounds(q_half, q_half, k);
      const Big x = boost::multiprecision::pow(Big(q_half), 2 * k);
      const Big want = (1 - boost::multiprecision::sqrt(1 - x)) / 2;
      if (want == 0) continue;
      const double log_want = boost::multiprecision::log(want).convert_to<double>();
      CAPTURE(q_half);
      CAPTURE(k);
      CHECK(std::abs(b.log_lower - log_want) <= 1e-12 * std::max(1.0, std::abs(log_want)));
    }
  const BoundTriple b = error_prob_bounds(0.999999, 0.999999, 1000000);
  CHECK(b.lower == doctest::Approx((1.0 - std::sqrt(1.0 - std::exp(-2.0))) / 2).epsilon(1e-5));
}

TEST_CASE("bound ordering holds for random overlaps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r_half = std::pow(10.0, -12.0 + 12.0 * u(rng));
    // ln Q_s is convex with ln Q_0 = ln Q_1 = 0, so r_half <= r_qcb <= 2 r_half
    const double r_qcb = r_half * (1.0 + u(rng));
    const auto k = static_cast<std::int64_t>(std::pow(10.0, 8.0 * u(rng)));
    const BoundTriple b = error_prob_bounds_from_exponents(r_half, r_qcb, std::max<std::int64_t>(1, k));
    CHECK(b.log_lower <= b.log_upper_qcb);
    CHECK(b.log_upper_qcb <= b.log_upper_bhatt);
    CHECK(b.log_upper_bhatt <= std::log(0.5));
  }
}

TEST_CASE("closed-form exponents") {
  const ExponentReport r = asymptotic_exponents(kNominal);
  CHECK(r.r_q == doctest::Approx(5e-6).epsilon(1e-14));
  CHECK(r.r_c == doctest::Approx(1.25e-6).epsilon(1e-14));
  CHECK(std::abs(r.r_c_hom - 1e-4 / 82.0) <= 1e-18);
  CHECK_FALSE(r.regime_approximation);
  CHECK(asymptotic_exponents(validate_params({0.5, 0.5, 1.0})).regime_approximation);

  const ExponentReport dark = asymptotic_exponents(validate_params({0.01, 0.0, 20.0}));
  CHECK(dark.r_q == 0.0);
  CHECK(dark.r_c == 0.0);
  CHECK(dark.r_c_hom == 0.0);
  CHECK_THROWS_AS(asymptotic_exponents(validate_params({0.01, 0.01, 0.0})), DomainError);
}

}  // TEST_SUITE

TEST_SUITE("regime_limits") {

TEST_CASE("numeric SPDC exponent approaches kappa N_S / N_B as N_B grows") {
  const double n_bs[] = {10.0, 50.0, 200.0};
  const double tolerance[] = {0.25, 0.10, 0.05};
  double previous = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ScenarioParams p = validate_params({0.01, 0.01, n_bs[i]});
    const double ratio = spdc_chernoff(p, 1e-9).exponent / (p.kappa * p.n_s / p.n_b);
    CAPTURE(n_bs[i]);
    CAPTURE(ratio);
    CHECK(std::abs(ratio - 1.0) <= tolerance[i]);
    CHECK(ratio > previous);
    previous = ratio;
  }
}

}  // TEST_SUITE
