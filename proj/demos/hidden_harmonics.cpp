// Recovering two hidden harmonics from a subordinated-Gaussian background:
// synthesize an observation, estimate by nonlinear least squares, and size
// the errors against the asymptotic covariance.

#include <cstdio>

#include <hpl/hpl.hpp>

int main() {
  hpl::TrigParams theta;
  theta.harmonics.push_back({1.2, -0.8, 0.35});
  theta.harmonics.push_back({0.9, 0.6, 0.72});

  hpl::NoiseModel noise;
  noise.components.push_back({0.4, 1.5, 0.0});
  noise.components.push_back({0.6, 2.5, 0.5});

  const auto transform = hpl::builtin_transform(2);  // quadratic subordination
  const std::size_t t_len = 4096;
  const auto x =
      hpl::synthesize_observations(theta, noise, transform, t_len, /*seed=*/7);

  const hpl::WalkerSet walker(t_len, theta.phi_lower, theta.phi_upper);
  const auto est = hpl::walker_lse(x, theta.harmonics.size(), walker);

  const auto gamma = hpl::gamma_matrix(theta, noise, transform);
  const double root_t = std::sqrt(static_cast<double>(t_len));

  std::printf("T = %zu, converged = %s, Q_T = %.6f\n\n", t_len,
              est.diagnostics.converged ? "yes" : "no", est.objective);
  std::printf("%-4s %10s %10s %12s %14s\n", "par", "true", "estimate", "error",
              "asymptotic sd");
  for (std::size_t k = 0; k < theta.harmonics.size(); ++k) {
    const auto& tr = theta.harmonics[k];
    const auto& ht = est.theta.harmonics[k];
    const auto& block = gamma.blocks[k];
    const double sd_a = std::sqrt(block(0, 0)) / root_t;
    const double sd_b = std::sqrt(block(1, 1)) / root_t;
    const double sd_phi =
        std::sqrt(block(2, 2)) / (root_t * static_cast<double>(t_len));
    std::printf("A_%zu  %10.5f %10.5f %12.2e %14.2e\n", k + 1, tr.a, ht.a,
                ht.a - tr.a, sd_a);
    std::printf("B_%zu  %10.5f %10.5f %12.2e %14.2e\n", k + 1, tr.b, ht.b,
                ht.b - tr.b, sd_b);
    std::printf("phi_%zu%10.5f %10.5f %12.2e %14.2e\n", k + 1, tr.phi, ht.phi,
                ht.phi - tr.phi, sd_phi);
  }
  return 0;
}
