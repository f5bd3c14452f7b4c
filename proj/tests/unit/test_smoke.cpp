#include <catch2/catch_amalgamated.hpp>

#include <hpl/hpl.hpp>

TEST_CASE("umbrella header compiles and basic pipeline runs", "[harness]") {
  hpl::NoiseModel model;
  model.components.push_back({1.0, 2.5, 0.5});
  hpl::TrigParams theta;
  theta.harmonics.push_back({1.0, 1.0, 0.6});

  const auto transform = hpl::builtin_transform(2);
  const auto path = hpl::synthesize_observations(theta, model, transform, 256,
                                                 /*seed=*/42);
  REQUIRE(path.values.size() == 256);
  REQUIRE(path.method == hpl::GenMethod::kCholesky);

  const double q = hpl::objective_qt(theta, path);
  REQUIRE(q > 0.0);
}
