#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <hpl/covariance.hpp>
#include <hpl/errors.hpp>
#include <hpl/pool.hpp>
#include <hpl/spectral.hpp>

namespace {

hpl::NoiseModel single(double alpha, double kappa) {
  hpl::NoiseModel m;
  m.components.push_back({1.0, alpha, kappa});
  return m;
}

// Independent trapezoid transcription of the covariance-power transform,
// with a coarser grid than the library uses.
double convolution_oracle(const hpl::NoiseModel& model, int j, double lambda) {
  const double step = 0.04;
  const double t_max = 8000.0;
  const auto n = static_cast<std::size_t>(t_max / step);
  double sum = 0.5 * std::pow(hpl::covariance_at(model, 0.0), j);
  for (std::size_t k = 1; k < n; ++k) {
    const double t = step * static_cast<double>(k);
    sum += std::pow(hpl::covariance_at(model, t), j) * std::cos(lambda * t);
  }
  return sum * step / std::numbers::pi;
}

}  // namespace

TEST_CASE("normalization constants", "[spectral]") {
  REQUIRE(hpl::spectral_c1(3.0) ==
          Catch::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  // c1(alpha) = 2^{(1-alpha)/2} / (sqrt(pi) Gamma(alpha/2))
  for (double alpha : {0.25, 0.85, 1.5, 2.5}) {
    const double expect = std::pow(2.0, (1.0 - alpha) / 2.0) /
                          (std::sqrt(std::numbers::pi) *
                           std::tgamma(alpha / 2.0));
    REQUIRE(hpl::spectral_c1(alpha) == Catch::Approx(expect).epsilon(1e-14));
  }
  // c2(alpha) = 1 / (2 Gamma(alpha) cos(alpha pi / 2)); at 1/2 it is
  // 1/sqrt(2 pi).
  REQUIRE(hpl::spectral_c2(0.5) ==
          Catch::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  REQUIRE_THROWS_AS(hpl::spectral_c2(1.0), hpl::config_error);
  REQUIRE_THROWS_AS(hpl::spectral_c2(0.0), hpl::config_error);
}

TEST_CASE("density value at the origin for a smooth case", "[spectral]") {
  const auto m = single(3.0, 0.0);
  REQUIRE(hpl::spectral_density_at(m, 0.0) ==
          Catch::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("density is symmetric and positive", "[spectral]") {
  const auto m = single(1.5, 0.5);
  for (double l : {0.1, 0.45, 0.8, 2.0, 10.0}) {
    REQUIRE(hpl::spectral_density_at(m, l) == hpl::spectral_density_at(m, -l));
    REQUIRE(hpl::spectral_density_at(m, l) > 0.0);
  }
}

TEST_CASE("on-atom value matches the limit when alpha > 1", "[spectral]") {
  const double alpha = 2.5, kappa = 0.5;
  const double at_atom = hpl::spectral_density_component_at_kappa(alpha, kappa);
  const double near = hpl::spectral_density_component(alpha, kappa, kappa + 1e-8);
  REQUIRE(at_atom == Catch::Approx(near).epsilon(1e-6));
  // kappa = 0 doubles the regular term into the limit.
  const double at_zero = hpl::spectral_density_component_at_kappa(3.0, 0.0);
  const double near_zero = hpl::spectral_density_component(3.0, 0.0, 1e-9);
  REQUIRE(at_zero == Catch::Approx(near_zero).epsilon(1e-6));
}

TEST_CASE("density diverges on the atom when alpha <= 1", "[spectral]") {
  REQUIRE_THROWS_AS(hpl::spectral_density_component(0.85, 0.5, 0.5),
                    hpl::singularity_error);
  REQUIRE(hpl::spectral_density_component(0.85, 0.5, 0.5 + 1e-6) > 100.0);
}

TEST_CASE("small-separation power law in the singular regime", "[spectral]") {
  for (double alpha : {0.25, 0.45}) {
    const double kappa = 0.5;
    for (double h : {1e-4, 1e-6}) {
      const double f = hpl::spectral_density_component(alpha, kappa, kappa + h);
      const double law = 0.5 * hpl::spectral_c2(alpha) * std::pow(h, alpha - 1.0);
      REQUIRE(f / law == Catch::Approx(1.0).margin(0.02));
    }
  }
}

TEST_CASE("quadrature inverts the density back to the covariance",
          "[spectral]") {
  for (double alpha : {0.25, 0.45, 0.85, 1.5, 2.5}) {
    const auto m = single(alpha, 0.5);
    REQUIRE(hpl::spectral_fourier(m, 0.0, 85.0) ==
            Catch::Approx(1.0).margin(1e-3));
    for (double t : {1.0, 2.0, 5.0}) {
      REQUIRE(hpl::spectral_fourier(m, t, 85.0) ==
              Catch::Approx(hpl::covariance_at(m, t)).margin(1e-3));
    }
  }
}

TEST_CASE("quadrature handles mixtures and the zero atom", "[spectral]") {
  hpl::NoiseModel m;
  m.components.push_back({0.4, 0.45, 0.0});
  m.components.push_back({0.6, 2.5, 0.7});
  REQUIRE(hpl::spectral_fourier(m, 0.0, 85.0) == Catch::Approx(1.0).margin(2e-3));
  REQUIRE(hpl::spectral_fourier(m, 3.0, 85.0) ==
          Catch::Approx(hpl::covariance_at(m, 3.0)).margin(2e-3));
}

TEST_CASE("convolved densities match an independent trapezoid", "[spectral]") {
  const auto m = single(2.5, 0.5);
  for (int j : {2, 3}) {
    for (double lambda : {0.0, 0.6, 1.0}) {
      const double expect = convolution_oracle(m, j, lambda);
      REQUIRE(hpl::spectral_convolution(m, j, lambda) ==
              Catch::Approx(expect).margin(1e-5));
    }
  }
}

TEST_CASE("first convolution power reproduces the density", "[spectral]") {
  const auto m = single(1.5, 0.5);
  for (double lambda : {0.2, 0.6, 1.1}) {
    REQUIRE(hpl::spectral_convolution(m, 1, lambda) ==
            Catch::Approx(hpl::spectral_density_at(m, lambda)).margin(1e-4));
  }
}

TEST_CASE("convolution preconditions", "[spectral]") {
  const auto lrd = single(0.45, 0.5);
  REQUIRE_THROWS_AS(hpl::spectral_convolution(lrd, 2, 0.0),
                    hpl::divergence_error);
  REQUIRE_NOTHROW(hpl::spectral_convolution(lrd, 3, 0.0));
  REQUIRE_THROWS_AS(hpl::spectral_convolution(lrd, 0, 0.0), hpl::config_error);
}

TEST_CASE("convolution cache is safe under concurrency", "[spectral]") {
  const auto m = single(1.5, 0.3);
  const double reference = hpl::spectral_convolution(m, 2, 0.4);
  std::vector<double> results(16);
  hpl::parallel_for(results.size(), 8, [&](std::size_t i) {
    results[i] = hpl::spectral_convolution(m, 2, 0.4);
  });
  for (double r : results) REQUIRE(r == reference);
}

TEST_CASE("singular point enumeration", "[spectral]") {
  REQUIRE(hpl::singular_points(single(1.0, 0.0)) == std::vector<double>{0.0});
  const auto m = single(1.0, 0.5);
  REQUIRE(hpl::singular_points(m) == std::vector<double>{-0.5, 0.5});
  hpl::NoiseModel mix;
  mix.components.push_back({0.5, 1.0, 0.0});
  mix.components.push_back({0.5, 2.0, 0.7});
  REQUIRE(hpl::singular_points(mix) ==
          std::vector<double>{-0.7, 0.0, 0.7});
}
