#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <hpl/bessel.hpp>
#include <hpl/errors.hpp>

namespace {

// Ascending series for I_nu, adequate for small and moderate arguments.
double bessel_i_series(double nu, double z) {
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double log_term = (2.0 * k + nu) * std::log(z / 2.0) -
                            std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0);
    const double term = std::exp(log_term);
    sum += term;
    if (k > 4 && term < 1e-18 * sum) break;
  }
  return sum;
}

// K_nu from the reflection formula, for non-integer nu and small-ish z
// (the subtraction loses accuracy as z grows).
double bessel_k_reflection(double nu, double z) {
  return std::numbers::pi / (2.0 * std::sin(nu * std::numbers::pi)) *
         (bessel_i_series(-nu, z) - bessel_i_series(nu, z));
}

// Logarithmic series for K_0.
double bessel_k0_series(double z) {
  const double egamma = 0.5772156649015329;
  double sum = -(std::log(z / 2.0) + egamma) * bessel_i_series(0.0, z);
  double harmonic = 0.0;
  double factor = 1.0;  // (z^2/4)^k / (k!)^2
  for (int k = 1; k <= 60; ++k) {
    factor *= (z * z / 4.0) / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    sum += factor * harmonic;
  }
  return sum;
}

double k_half(double z) {
  return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
}

}  // namespace

TEST_CASE("matches the reflection-formula series at non-integer order",
          "[bessel]") {
  for (double nu : {0.3, 0.5, 0.75, 1.25, 1.7, 2.5, 3.25}) {
    for (double z : {0.05, 0.2, 0.5, 1.0, 2.0}) {
      const double expect = bessel_k_reflection(nu, z);
      REQUIRE(hpl::bessel_k(nu, z) == Catch::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("matches the logarithmic series at order zero", "[bessel]") {
  for (double z : {0.05, 0.1, 0.5, 1.0, 2.0, 3.0}) {
    REQUIRE(hpl::bessel_k(0.0, z) ==
            Catch::Approx(bessel_k0_series(z)).epsilon(1e-11));
  }
}

TEST_CASE("half-integer closed forms", "[bessel]") {
  for (double z : {0.1, 1.0, 5.0, 50.0, 500.0}) {
    REQUIRE(hpl::bessel_k(0.5, z) == Catch::Approx(k_half(z)).epsilon(1e-12));
    REQUIRE(hpl::bessel_k(1.5, z) ==
            Catch::Approx(k_half(z) * (1.0 + 1.0 / z)).epsilon(1e-12));
    REQUIRE(hpl::bessel_k(2.5, z) ==
            Catch::Approx(k_half(z) * (1.0 + 3.0 / z + 3.0 / (z * z)))
                .epsilon(1e-11));
  }
}

TEST_CASE("reference values", "[bessel]") {
  REQUIRE(hpl::bessel_k(0.0, 1.0) ==
          Catch::Approx(0.42102443824070834).epsilon(1e-13));
  REQUIRE(hpl::bessel_k(1.0, 1.0) ==
          Catch::Approx(0.6019072301972346).epsilon(1e-13));
}

TEST_CASE("three-term recurrence holds", "[bessel]") {
  for (double nu : {0.0, 0.4, 1.0, 1.8}) {
    for (double z : {0.3, 1.0, 4.0, 20.0}) {
      const double lhs = hpl::bessel_k(nu + 2.0, z);
      const double rhs =
          hpl::bessel_k(nu, z) + 2.0 * (nu + 1.0) / z * hpl::bessel_k(nu + 1.0, z);
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("symmetry, decay, and domain errors", "[bessel]") {
  REQUIRE(hpl::bessel_k(-1.3, 0.7) == hpl::bessel_k(1.3, 0.7));
  REQUIRE(hpl::bessel_k(0.3, 800.0) == 0.0);
  REQUIRE(hpl::bessel_k(0.0, 0.5) > hpl::bessel_k(0.0, 1.0));
  REQUIRE(hpl::bessel_k(0.0, 1.0) > hpl::bessel_k(0.0, 2.0));
  REQUIRE_THROWS_AS(hpl::bessel_k(1.0, 0.0), hpl::config_error);
  REQUIRE_THROWS_AS(hpl::bessel_k(1.0, -2.0), hpl::config_error);
  REQUIRE_THROWS_AS(hpl::bessel_k(1e4, 1e-3), hpl::overflow_error);
}
