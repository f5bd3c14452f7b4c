#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <hpl/covariance.hpp>
#include <hpl/errors.hpp>

namespace {

hpl::NoiseModel single(double alpha, double kappa) {
  hpl::NoiseModel m;
  m.components.push_back({1.0, alpha, kappa});
  return m;
}

}  // namespace

TEST_CASE("single component closed form", "[covariance]") {
  const auto m = single(1.5, 0.0);
  REQUIRE(hpl::covariance_at(m, 0.0) == 1.0);
  REQUIRE(hpl::covariance_at(m, 1.0) ==
          Catch::Approx(std::pow(2.0, -0.75)).epsilon(1e-15));
  for (double t : {0.5, 2.0, 7.0, 40.0}) {
    REQUIRE(hpl::covariance_at(m, t) ==
            Catch::Approx(std::pow(1.0 + t * t, -0.75)).epsilon(1e-15));
  }

  const auto osc = single(0.85, 0.5);
  for (double t : {1.0, 3.0, 10.0}) {
    const double expect = std::cos(0.5 * t) * std::pow(1.0 + t * t, -0.425);
    REQUIRE(hpl::covariance_at(osc, t) == Catch::Approx(expect).epsilon(1e-15));
  }
  REQUIRE(hpl::covariance_at(osc, -3.0) == hpl::covariance_at(osc, 3.0));
}

TEST_CASE("mixtures add with their weights", "[covariance]") {
  hpl::NoiseModel m;
  m.components.push_back({0.3, 1.5, 0.0});
  m.components.push_back({0.7, 2.5, 0.8});
  REQUIRE(hpl::covariance_at(m, 0.0) == Catch::Approx(1.0));
  for (double t : {1.0, 4.5}) {
    const double expect = 0.3 * std::pow(1.0 + t * t, -0.75) +
                          0.7 * std::cos(0.8 * t) * std::pow(1.0 + t * t, -1.25);
    REQUIRE(hpl::covariance_at(m, t) == Catch::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("alpha_min picks the slowest component", "[covariance]") {
  hpl::NoiseModel m;
  m.components.push_back({0.5, 0.45, 0.0});
  m.components.push_back({0.5, 2.5, 0.5});
  REQUIRE(m.alpha_min() == 0.45);
}

TEST_CASE("model validation", "[covariance]") {
  hpl::NoiseModel empty;
  REQUIRE_THROWS_AS(hpl::validate(empty), hpl::config_error);

  auto bad_weight = single(1.0, 0.0);
  bad_weight.components[0].weight = -0.2;
  REQUIRE_THROWS_AS(hpl::validate(bad_weight), hpl::config_error);

  auto bad_sum = single(1.0, 0.0);
  bad_sum.components[0].weight = 0.6;
  REQUIRE_THROWS_AS(hpl::validate(bad_sum), hpl::config_error);

  auto bad_alpha = single(0.0, 0.0);
  REQUIRE_THROWS_AS(hpl::validate(bad_alpha), hpl::config_error);

  hpl::NoiseModel unsorted;
  unsorted.components.push_back({0.5, 1.0, 0.7});
  unsorted.components.push_back({0.5, 1.0, 0.2});
  REQUIRE_THROWS_AS(hpl::validate(unsorted), hpl::config_error);

  hpl::NoiseModel fine;
  fine.components.push_back({0.25, 0.85, 0.0});
  fine.components.push_back({0.75, 1.5, 0.3});
  REQUIRE_NOTHROW(hpl::validate(fine));
}

TEST_CASE("fingerprint tracks content", "[covariance]") {
  const auto a = single(1.5, 0.5);
  auto b = a;
  REQUIRE(hpl::fingerprint(a) == hpl::fingerprint(b));
  b.components[0].alpha = 1.5000000001;
  REQUIRE(hpl::fingerprint(a) != hpl::fingerprint(b));
  auto c = a;
  c.components[0].kappa = 0.6;
  REQUIRE(hpl::fingerprint(a) != hpl::fingerprint(c));
  auto d = a;
  d.components.push_back({0.0, 2.0, 1.0});
  REQUIRE(hpl::fingerprint(a) != hpl::fingerprint(d));
}
