#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include <hpl/errors.hpp>
#include <hpl/lm.hpp>

TEST_CASE("linear least squares converges immediately", "[lm]") {
  Eigen::MatrixXd a(4, 2);
  a << 1, 1, 1, 2, 1, 3, 1, 4;
  Eigen::VectorXd b(4);
  b << 6, 5, 7, 10;
  const Eigen::VectorXd truth =
      (a.transpose() * a).ldlt().solve(a.transpose() * b);

  auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                Eigen::MatrixXd* jac) {
    r = a * x - b;
    if (jac) *jac = a;
  };
  const auto result = hpl::lm_minimize(fn, Eigen::VectorXd::Zero(2), 4);
  REQUIRE(result.diagnostics.converged);
  REQUIRE(result.diagnostics.iterations <= 3);
  REQUIRE((result.x - truth).norm() < 1e-10);
}

TEST_CASE("Rosenbrock valley from the classic start", "[lm]") {
  auto fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& r,
               Eigen::MatrixXd* jac) {
    r.resize(2);
    r << 10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0];
    if (jac) {
      jac->resize(2, 2);
      *jac << -20.0 * x[0], 10.0, -1.0, 0.0;
    }
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto result = hpl::lm_minimize(fn, x0, 2);
  REQUIRE(result.diagnostics.converged);
  REQUIRE(result.x[0] == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(result.x[1] == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("box constraints clamp the minimizer", "[lm]") {
  auto fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& r,
               Eigen::MatrixXd* jac) {
    r.resize(1);
    r << x[0] - 2.0;
    if (jac) {
      jac->resize(1, 1);
      *jac << 1.0;
    }
  };
  hpl::LmBox box;
  box.lower = Eigen::VectorXd::Constant(1, -10.0);
  box.upper = Eigen::VectorXd::Constant(1, 1.0);
  const auto result =
      hpl::lm_minimize(fn, Eigen::VectorXd::Zero(1), 1, box);
  REQUIRE(result.x[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("an already-optimal start stops at iteration zero", "[lm]") {
  auto fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& r,
               Eigen::MatrixXd* jac) {
    r.resize(2);
    r << x[0] - 1.0, x[1] + 2.0;
    if (jac) {
      jac->resize(2, 2);
      jac->setIdentity();
    }
  };
  Eigen::VectorXd x0(2);
  x0 << 1.0, -2.0;
  const auto result = hpl::lm_minimize(fn, x0, 2);
  REQUIRE(result.diagnostics.converged);
  REQUIRE(result.diagnostics.iterations == 0);
  REQUIRE(result.diagnostics.reason == hpl::LmStop::kGradient);
}

TEST_CASE("projection hook constrains trial steps", "[lm]") {
  auto fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& r,
               Eigen::MatrixXd* jac) {
    r.resize(1);
    r << x[0] - 5.0;
    if (jac) {
      jac->resize(1, 1);
      *jac << 1.0;
    }
  };
  auto project = [](Eigen::VectorXd& x) {
    if (x[0] > 2.0) x[0] = 2.0;
  };
  const auto result =
      hpl::lm_minimize(fn, Eigen::VectorXd::Zero(1), 1, {}, {}, project);
  REQUIRE(result.x[0] == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("non-finite residuals at the start are rejected", "[lm]") {
  auto fn = [](const Eigen::VectorXd&, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(1);
    r << std::numeric_limits<double>::quiet_NaN();
    if (jac) jac->setOnes(1, 1);
  };
  REQUIRE_THROWS_AS(hpl::lm_minimize(fn, Eigen::VectorXd::Zero(1), 1),
                    hpl::config_error);
}
