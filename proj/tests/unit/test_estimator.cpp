#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <hpl/errors.hpp>
#include <hpl/estimator.hpp>
#include <hpl/rng.hpp>

namespace {

hpl::SamplePath clean_signal(const hpl::TrigParams& theta, std::size_t t_len) {
  hpl::SamplePath x;
  x.values.resize(t_len);
  for (std::size_t i = 0; i < t_len; ++i)
    x.values[i] = hpl::regression_value(theta, static_cast<double>(i + 1));
  return x;
}

hpl::TrigParams one_harmonic(double a, double b, double phi) {
  hpl::TrigParams theta;
  theta.harmonics.push_back({a, b, phi});
  return theta;
}

}  // namespace

TEST_CASE("objective is the scaled residual sum", "[estimator]") {
  const auto theta = one_harmonic(1.0, 1.0, 0.6);
  auto x = clean_signal(theta, 32);
  REQUIRE(hpl::objective_qt(theta, x) == Catch::Approx(0.0).margin(1e-28));
  x.values[0] += 2.0;  // one residual of 2 => Q_T = 4/T
  REQUIRE(hpl::objective_qt(theta, x) == Catch::Approx(4.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("periodogram initializer lands within a bin", "[estimator]") {
  const std::size_t t_len = 512;
  const auto theta = one_harmonic(1.3, -0.7, 0.6137);
  const auto x = clean_signal(theta, t_len);
  const hpl::WalkerSet walker(t_len, 0.0, 1.0);
  const auto init = hpl::periodogram_init(x, 1, walker);
  const double bin = 2.0 * std::numbers::pi / static_cast<double>(t_len);
  REQUIRE(std::fabs(init.harmonics[0].phi - 0.6137) < bin);
  REQUIRE(init.harmonics[0].a == Catch::Approx(1.3).margin(0.1));
  REQUIRE(init.harmonics[0].b == Catch::Approx(-0.7).margin(0.1));
}

TEST_CASE("noiseless recovery is exact to solver precision", "[estimator]") {
  const std::size_t t_len = 512;
  const auto theta = one_harmonic(1.0, 0.4, 0.377);
  const auto x = clean_signal(theta, t_len);
  const hpl::WalkerSet walker(t_len, 0.0, 1.0);
  const auto est = hpl::walker_lse(x, 1, walker);
  REQUIRE(est.diagnostics.converged);
  REQUIRE(est.theta.harmonics[0].phi == Catch::Approx(0.377).margin(1e-9));
  REQUIRE(est.theta.harmonics[0].a == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(est.theta.harmonics[0].b == Catch::Approx(0.4).margin(1e-7));
  REQUIRE(est.objective < 1e-14);
}

TEST_CASE("noiseless recovery of two separated harmonics", "[estimator]") {
  const std::size_t t_len = 1024;
  hpl::TrigParams theta;
  theta.harmonics.push_back({1.2, -0.8, 0.35});
  theta.harmonics.push_back({0.9, 0.6, 0.72});
  const auto x = clean_signal(theta, t_len);
  const hpl::WalkerSet walker(t_len, 0.0, 1.0);
  const auto est = hpl::walker_lse(x, 2, walker);
  REQUIRE(est.diagnostics.converged);
  REQUIRE(est.theta.harmonics[0].phi == Catch::Approx(0.35).margin(1e-8));
  REQUIRE(est.theta.harmonics[1].phi == Catch::Approx(0.72).margin(1e-8));
  REQUIRE(est.theta.harmonics[0].a == Catch::Approx(1.2).margin(1e-6));
  REQUIRE(est.theta.harmonics[1].b == Catch::Approx(0.6).margin(1e-6));
}

TEST_CASE("white noise shifts the estimate only slightly", "[estimator]") {
  const std::size_t t_len = 2048;
  const auto theta = one_harmonic(1.0, 1.0, 0.6);
  auto x = clean_signal(theta, t_len);
  hpl::NormalStream stream(505);
  for (std::size_t i = 0; i < t_len; ++i)
    x.values[i] += 0.3 * stream.normal(i);
  const hpl::WalkerSet walker(t_len, 0.0, 1.0);
  const auto est = hpl::walker_lse(x, 1, walker);
  REQUIRE(est.diagnostics.converged);
  REQUIRE(std::fabs(est.theta.harmonics[0].phi - 0.6) < 5e-4);
  REQUIRE(std::fabs(est.theta.harmonics[0].a - 1.0) < 0.1);
  REQUIRE(std::fabs(est.theta.harmonics[0].b - 1.0) < 0.1);
  REQUIRE(est.objective == Catch::Approx(0.09).margin(0.02));
}

TEST_CASE("profiled and joint optimization agree on clean data",
          "[estimator]") {
  const std::size_t t_len = 256;
  const auto theta = one_harmonic(0.8, -1.1, 0.52);
  const auto x = clean_signal(theta, t_len);
  const hpl::WalkerSet walker(t_len, 0.0, 1.0);
  hpl::LseOptions profiled;
  profiled.profiled = true;
  const auto joint = hpl::walker_lse(x, 1, walker);
  const auto prof = hpl::walker_lse(x, 1, walker, profiled);
  REQUIRE(prof.theta.harmonics[0].phi ==
          Catch::Approx(joint.theta.harmonics[0].phi).margin(1e-7));
  REQUIRE(prof.theta.harmonics[0].a ==
          Catch::Approx(joint.theta.harmonics[0].a).margin(1e-5));
}

TEST_CASE("estimates respect the admissible band", "[estimator]") {
  const std::size_t t_len = 256;
  const auto theta = one_harmonic(1.0, 0.0, 0.09);
  const auto x = clean_signal(theta, t_len);
  // Band forced above the true frequency: the estimate must stay inside.
  const hpl::WalkerSet walker(t_len, 0.2, 1.0);
  const auto est = hpl::walker_lse(x, 1, walker);
  REQUIRE(est.theta.harmonics[0].phi >= walker.lower);
  REQUIRE(est.theta.harmonics[0].phi <= walker.upper);
}

TEST_CASE("input validation", "[estimator]") {
  const auto theta = one_harmonic(1.0, 0.0, 0.5);
  const auto x = clean_signal(theta, 8);
  REQUIRE_THROWS_AS(hpl::walker_lse(x, 1, hpl::WalkerSet(8, 0.0, 1.0)),
                    hpl::size_error);

  const auto ok = clean_signal(theta, 64);
  REQUIRE_THROWS_AS(hpl::walker_lse(ok, 0, hpl::WalkerSet(64, 0.0, 1.0)),
                    hpl::config_error);
  // Five harmonics cannot be separated inside a band of width 1 - 1/8
  // when the minimum separation is 1/8.
  REQUIRE_THROWS_AS(hpl::walker_lse(ok, 8, hpl::WalkerSet(64, 0.0, 1.0)),
                    hpl::init_error);
}
