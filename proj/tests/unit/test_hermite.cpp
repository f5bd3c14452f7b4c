#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <hpl/errors.hpp>
#include <hpl/hermite.hpp>
#include <hpl/rng.hpp>

TEST_CASE("polynomial values", "[hermite]") {
  REQUIRE(hpl::hermite_eval(0, 1.7) == 1.0);
  REQUIRE(hpl::hermite_eval(1, 1.7) == 1.7);
  REQUIRE(hpl::hermite_eval(2, 1.0) == 0.0);
  REQUIRE(hpl::hermite_eval(3, 2.0) == 2.0);
  REQUIRE(hpl::hermite_eval(4, 0.0) == 3.0);
  for (double x : {-2.0, -0.3, 0.0, 0.9, 3.1}) {
    REQUIRE(hpl::hermite_eval(2, x) == Catch::Approx(x * x - 1.0).epsilon(1e-14));
    REQUIRE(hpl::hermite_eval(3, x) ==
            Catch::Approx(x * (x * x - 3.0)).epsilon(1e-13));
    REQUIRE(hpl::hermite_eval(4, x) ==
            Catch::Approx(x * x * (x * x - 6.0) + 3.0).margin(1e-12));
    REQUIRE(hpl::hermite_eval(5, x) ==
            Catch::Approx(x * (x * x * x * x - 10.0 * x * x + 15.0))
                .margin(1e-11));
  }
}

TEST_CASE("orthogonality under the Gaussian by Monte Carlo", "[hermite]") {
  hpl::NormalStream stream(314);
  const std::size_t n = 200000;
  double h2h3 = 0.0, h3h3 = 0.0, h1h3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = stream.normal(i);
    const double h1 = hpl::hermite_eval(1, z);
    const double h2 = hpl::hermite_eval(2, z);
    const double h3 = hpl::hermite_eval(3, z);
    h2h3 += h2 * h3;
    h3h3 += h3 * h3;
    h1h3 += h1 * h3;
  }
  REQUIRE(std::fabs(h2h3 / n) < 0.15);
  REQUIRE(h3h3 / n == Catch::Approx(6.0).margin(0.25));
  REQUIRE(std::fabs(h1h3 / n) < 0.1);
}

TEST_CASE("builtin transforms", "[hermite]") {
  for (int m = 1; m <= 4; ++m) {
    const auto spec = hpl::builtin_transform(m);
    REQUIRE(spec.rank == static_cast<std::size_t>(m));
    REQUIRE(spec.coefficients.size() == static_cast<std::size_t>(m));
    double mfac = 1.0;
    for (int k = 2; k <= m; ++k) mfac *= k;
    REQUIRE(spec.coefficients.back() == mfac);
    REQUIRE(spec.variance() == Catch::Approx(mfac).epsilon(1e-14));
    for (double u : {-1.4, 0.0, 0.6, 2.2}) {
      REQUIRE(hpl::transform_apply(spec, u) ==
              Catch::Approx(hpl::hermite_eval(m, u)).margin(1e-12));
    }
  }
  REQUIRE_THROWS_AS(hpl::builtin_transform(0), hpl::config_error);
  REQUIRE_THROWS_AS(hpl::builtin_transform(5), hpl::config_error);
}

TEST_CASE("general expansion evaluates like its builtin twin", "[hermite]") {
  hpl::TransformSpec spec;
  spec.kind = hpl::TransformKind::kGeneral;
  spec.coefficients = {0.0, 0.0, 6.0};
  spec.rank = 3;
  const auto h3 = hpl::builtin_transform(3);
  for (double u : {-2.0, -0.5, 0.0, 1.3, 2.8}) {
    REQUIRE(hpl::transform_apply(spec, u) ==
            Catch::Approx(hpl::transform_apply(h3, u)).margin(1e-12));
  }
}

TEST_CASE("coefficient extraction recovers simple polynomials", "[hermite]") {
  const auto quad = hpl::hermite_coefficients(
      [](double u) { return u * u - 1.0; });
  REQUIRE(quad.rank == 2);
  REQUIRE(quad.coefficients[1] == Catch::Approx(2.0).margin(1e-10));
  REQUIRE(std::fabs(quad.coefficients[0]) < 1e-10);

  const auto cubic =
      hpl::hermite_coefficients([](double u) { return u * u * u; });
  REQUIRE(cubic.rank == 1);
  REQUIRE(cubic.coefficients[0] == Catch::Approx(3.0).margin(1e-10));
  REQUIRE(cubic.coefficients[2] == Catch::Approx(6.0).margin(1e-10));

  const auto linear = hpl::hermite_coefficients([](double u) { return u; });
  REQUIRE(linear.rank == 1);
  REQUIRE(linear.coefficients[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("coefficient extraction of a smooth transform", "[hermite]") {
  // g(u) = exp(u) - exp(1/2) has C_k = exp(1/2) for every k >= 1.
  const double root_e = std::exp(0.5);
  const auto spec = hpl::hermite_coefficients(
      [&](double u) { return std::exp(u) - root_e; }, 8, 64);
  REQUIRE(spec.rank == 1);
  for (std::size_t k = 0; k < 8; ++k) {
    REQUIRE(spec.coefficients[k] == Catch::Approx(root_e).epsilon(1e-9));
  }
}

TEST_CASE("centering and degeneracy are enforced", "[hermite]") {
  REQUIRE_THROWS_AS(hpl::hermite_coefficients([](double u) { return u * u; }),
                    hpl::not_centered_error);
  REQUIRE_THROWS_AS(hpl::hermite_coefficients([](double) { return 0.0; }),
                    hpl::degenerate_error);
  REQUIRE_THROWS_AS(hpl::hermite_coefficients([](double u) { return u; }, 4, 3),
                    hpl::config_error);
}

TEST_CASE("transform_path maps values and keeps provenance", "[hermite]") {
  hpl::SamplePath path;
  path.values = {0.0, 1.0, -2.0};
  path.seed = 77;
  path.method = hpl::GenMethod::kCirculant;
  const auto out = hpl::transform_path(hpl::builtin_transform(2), path);
  REQUIRE(out.values == std::vector<double>{-1.0, 0.0, 3.0});
  REQUIRE(out.seed == 77);
  REQUIRE(out.method == hpl::GenMethod::kCirculant);

  hpl::SamplePath empty;
  REQUIRE_THROWS_AS(hpl::transform_path(hpl::builtin_transform(1), empty),
                    hpl::size_error);
}

TEST_CASE("transform fingerprints separate kinds and coefficients",
          "[hermite]") {
  const auto h1 = hpl::builtin_transform(1);
  const auto h2 = hpl::builtin_transform(2);
  REQUIRE(hpl::fingerprint(h1) != hpl::fingerprint(h2));
  auto general = h2;
  general.kind = hpl::TransformKind::kGeneral;
  REQUIRE(hpl::fingerprint(general) != hpl::fingerprint(h2));
}
