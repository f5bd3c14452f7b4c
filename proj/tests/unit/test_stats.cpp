#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <hpl/stats.hpp>

TEST_CASE("error function at reference points", "[stats]") {
  REQUIRE(hpl::erf_scalar(0.0) == 0.0);
  REQUIRE(hpl::erf_scalar(1.0) == Catch::Approx(0.8427007929497149).epsilon(1e-13));
  REQUIRE(hpl::erfc_scalar(2.0) ==
          Catch::Approx(0.0046777349810472645).epsilon(1e-12));
  REQUIRE(hpl::erf_scalar(-1.0) == Catch::Approx(-hpl::erf_scalar(1.0)));
  REQUIRE(hpl::erfc_scalar(10.0) ==
          Catch::Approx(2.0884875837625446e-45).epsilon(1e-10));
}

TEST_CASE("normal quantile against classical values", "[stats]") {
  REQUIRE(hpl::normal_quantile(0.5) == 0.0);
  REQUIRE(hpl::normal_quantile(0.975) ==
          Catch::Approx(1.959963984540054).epsilon(1e-13));
  REQUIRE(hpl::normal_quantile(0.995) ==
          Catch::Approx(2.5758293035489004).epsilon(1e-13));
  REQUIRE(hpl::normal_quantile(0.9999) ==
          Catch::Approx(3.719016485455709).epsilon(1e-12));
  REQUIRE(hpl::normal_quantile(0.025) ==
          Catch::Approx(-1.959963984540054).epsilon(1e-13));
}

TEST_CASE("normal cdf and quantile are inverse", "[stats]") {
  for (double p : {1e-8, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-6}) {
    const double x = hpl::normal_quantile(p);
    REQUIRE(hpl::normal_cdf(x) == Catch::Approx(p).epsilon(1e-11));
  }
}

TEST_CASE("regularized gamma agrees with the erf identity", "[stats]") {
  // P(1/2, x) = erf(sqrt(x))
  for (double x : {0.01, 0.25, 1.0, 3.0, 10.0}) {
    REQUIRE(hpl::gamma_p(0.5, x) ==
            Catch::Approx(hpl::erf_scalar(std::sqrt(x))).epsilon(1e-12));
  }
  REQUIRE(hpl::gamma_p(3.0, 0.0) == 0.0);
  REQUIRE(hpl::gamma_p(2.5, 1e8) == Catch::Approx(1.0));
}

TEST_CASE("chi-square distribution identities", "[stats]") {
  // Two degrees of freedom is an exponential.
  for (double x : {0.1, 1.0, 2.0, 7.5}) {
    REQUIRE(hpl::chi2_cdf(x, 2.0) ==
            Catch::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
  }
  // Three degrees of freedom has the closed form
  // F(x) = erf(sqrt(x/2)) - sqrt(2x/pi) exp(-x/2).
  for (double x : {0.5, 3.0, 9.0, 20.0}) {
    const double expect =
        hpl::erf_scalar(std::sqrt(x / 2.0)) -
        std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-x / 2.0);
    REQUIRE(hpl::chi2_cdf(x, 3.0) == Catch::Approx(expect).epsilon(1e-12));
  }
  // Density integrates the cdf: finite-difference check.
  const double h = 1e-6;
  for (double x : {1.0, 4.0, 11.0}) {
    const double fd = (hpl::chi2_cdf(x + h, 5.0) - hpl::chi2_cdf(x - h, 5.0)) /
                      (2.0 * h);
    REQUIRE(hpl::chi2_pdf(x, 5.0) == Catch::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("chi-square quantile inverts the cdf", "[stats]") {
  for (double k : {1.0, 2.0, 3.0, 6.0, 13.0}) {
    for (double p : {0.001, 0.05, 0.5, 0.9, 0.9999}) {
      const double x = hpl::chi2_quantile(p, k);
      REQUIRE(hpl::chi2_cdf(x, k) == Catch::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("two-sample KS p-value behaves monotonically", "[stats]") {
  REQUIRE(hpl::ks_two_sample_pvalue(0.0, 500, 500) == Catch::Approx(1.0));
  const double p_small = hpl::ks_two_sample_pvalue(0.05, 500, 500);
  const double p_mid = hpl::ks_two_sample_pvalue(0.10, 500, 500);
  const double p_large = hpl::ks_two_sample_pvalue(0.30, 500, 500);
  REQUIRE(p_small > p_mid);
  REQUIRE(p_mid > p_large);
  REQUIRE(p_large < 1e-6);
  REQUIRE(p_small > 0.5);
}

TEST_CASE("sample moments", "[stats]") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  REQUIRE(hpl::sample_mean(v) == 2.5);
  REQUIRE(hpl::sample_variance(v) == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
}
