// Monte Carlo look at the normalized deviation functionals of the noise:
// under a rank-1 subordination the triples look trivariate Gaussian at a
// moderate horizon, while a rank-4 subordination of the same Gaussian base
// is still visibly far from Gaussian at the same horizon.

#include <cstdio>
#include <vector>

#include <Eigen/Dense>

#include <hpl/hpl.hpp>

namespace {

void battery(const hpl::CholeskyFactor& factor, const hpl::TransformSpec& g,
             const hpl::TrigParams& theta, int reps, const char* label) {
  Eigen::MatrixXd triples(reps, 3);
  for (int r = 0; r < reps; ++r) {
    const auto xi = factor.sample(1000 + static_cast<std::uint64_t>(r));
    const auto eps = hpl::transform_path(g, xi);
    const auto z = hpl::zeta_functionals(eps, theta);
    triples(r, 0) = z.zeta_a;
    triples(r, 1) = z.zeta_b;
    triples(r, 2) = z.zeta_phi;
  }

  const auto hz = hpl::henze_zirkler(triples);
  const auto dh = hpl::doornik_hansen(triples);
  const auto [skew, kurt] = hpl::mardia_stats(triples);
  const auto d2 = hpl::mahalanobis_squared(triples);
  int inside = 0;
  for (double v : d2)
    if (v <= 9.0) ++inside;

  std::printf("%s\n", label);
  std::printf("  %-18s statistic %9.4f   p = %.4f\n", "Henze-Zirkler",
              hz.statistic, hz.p_value);
  std::printf("  %-18s statistic %9.4f   p = %.4f\n", "Doornik-Hansen",
              dh.statistic, dh.p_value);
  std::printf("  %-18s statistic %9.4f   p = %.4f\n", "Mardia skewness",
              skew.statistic, skew.p_value);
  std::printf("  %-18s statistic %9.4f   p = %.4f\n", "Mardia kurtosis",
              kurt.statistic, kurt.p_value);
  std::printf("  within the c = 3 ellipsoid: %.3f (Gaussian reference %.3f)\n\n",
              static_cast<double>(inside) / reps, hpl::chi2_cdf(9.0, 3.0));
}

}  // namespace

int main() {
  hpl::TrigParams theta;
  theta.harmonics.push_back({1.0, 1.0, 0.6});

  hpl::NoiseModel noise;
  noise.components.push_back({1.0, 0.85, 0.5});

  const std::size_t t_len = 1024;
  const int reps = 400;
  const hpl::CholeskyFactor factor(noise, t_len);

  std::printf("deviation functionals, %d replications at T = %zu\n\n", reps,
              t_len);
  battery(factor, hpl::builtin_transform(1), theta, reps,
          "rank-1 transform (linear)");
  battery(factor, hpl::builtin_transform(4), theta, reps,
          "rank-4 transform (quartic)");
  return 0;
}
