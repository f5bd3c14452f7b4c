#pragma once

// Asymptotic-normality machinery for the single-harmonic experiment: the
// normalized zeta-functionals of the subordinated noise, the deviation
// scaling diag(sqrt(T), sqrt(T), T^{3/2}), and the limiting covariance of
// the scaled estimation errors.
//
// The limit covariance per harmonic is Gamma_k = 2 pi f_eps(phi_k) H_k^{-1},
// where f_eps = sum_{j>=m} (C_j^2 / j!) f^{(*j)} is the spectral density of
// the subordinated noise eps = G(xi) and H_k is the limiting normalized Gram
// matrix of the regression gradient,
//
//   H_k = [ 1/2    0     B/4  ]
//         [ 0      1/2  -A/4  ]      (C^2 = A^2 + B^2),
//         [ B/4   -A/4  C^2/6 ]
//
// obtained from sum cos^2(phi t) ~ T/2, sum t cos(phi t) ~ T^2/4 phase
// averages. Inverting H_k gives the positive definite block
//
//   Gamma_k = (4 pi f_eps(phi_k) / C_k^2) [ A^2+4B^2  -3AB   -6B ]
//                                         [ -3AB    4A^2+B^2  6A ]
//                                         [ -6B        6A     12 ].

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "hpl/covariance.hpp"
#include "hpl/errors.hpp"
#include "hpl/hermite.hpp"
#include "hpl/path.hpp"
#include "hpl/spectral.hpp"
#include "hpl/trig.hpp"

namespace hpl {

struct ZetaTriple {
  double zeta_a = 0.0;
  double zeta_b = 0.0;
  double zeta_phi = 0.0;
  std::size_t t_horizon = 0;
  std::array<double, 3> weights_norm = {0.0, 0.0, 0.0};  // W_A, W_B, W_phi
};

/// The three normalized weighted sums of a noise path eps(t), t = 1..T, with
/// weights w_A(t) = cos(phi t), w_B(t) = sin(phi t), and
/// w_phi(t) = t(-A sin(phi t) + B cos(phi t)), each normalized by
/// W(T) = sqrt(sum_t w(t)^2). Defined for single-harmonic parameters only.
inline ZetaTriple zeta_functionals(const SamplePath& noise,
                                   const TrigParams& theta) {
  require_nonempty(noise, "zeta_functionals");
  validate(theta);
  if (theta.harmonics.size() != 1)
    throw config_error(
        "zeta_functionals: defined for a single harmonic (N = 1)");
  if (noise.values.size() < 2)
    throw size_error("zeta_functionals: horizon must be >= 2");

  const double a = theta.harmonics[0].a;
  const double b = theta.harmonics[0].b;
  const double phi = theta.harmonics[0].phi;
  const double c_step = std::cos(phi);
  const double s_step = std::sin(phi);

  double c = 1.0, s = 0.0;
  double num_a = 0.0, num_b = 0.0, num_phi = 0.0;
  double w2_a = 0.0, w2_b = 0.0, w2_phi = 0.0;
  for (std::size_t i = 0; i < noise.values.size(); ++i) {
    const double c_next = c * c_step - s * s_step;
    s = s * c_step + c * s_step;
    c = c_next;
    const double t = static_cast<double>(i + 1);
    if ((i & 255u) == 255u) {
      c = std::cos(phi * t);
      s = std::sin(phi * t);
    }
    const double w_phi = t * (-a * s + b * c);
    const double eps = noise.values[i];
    num_a += c * eps;
    num_b += s * eps;
    num_phi += w_phi * eps;
    w2_a += c * c;
    w2_b += s * s;
    w2_phi += w_phi * w_phi;
  }

  ZetaTriple triple;
  triple.t_horizon = noise.values.size();
  triple.weights_norm = {std::sqrt(w2_a), std::sqrt(w2_b), std::sqrt(w2_phi)};
  triple.zeta_a = num_a / triple.weights_norm[0];
  triple.zeta_b = num_b / triple.weights_norm[1];
  triple.zeta_phi = num_phi / triple.weights_norm[2];
  return triple;
}

/// Per-harmonic scaled estimation errors
/// (sqrt(T)(A_hat - A), sqrt(T)(B_hat - B), T^{3/2}(phi_hat - phi)),
/// stacked into a vector of length 3N.
inline Eigen::VectorXd normalized_deviation(const TrigParams& theta_hat,
                                            const TrigParams& theta,
                                            std::size_t t_horizon) {
  if (theta_hat.harmonics.size() != theta.harmonics.size())
    throw config_error("normalized_deviation: harmonic counts differ");
  if (t_horizon == 0)
    throw config_error("normalized_deviation: horizon must be >= 1");
  const double sqrt_t = std::sqrt(static_cast<double>(t_horizon));
  const double t32 = sqrt_t * static_cast<double>(t_horizon);
  const std::size_t n = theta.harmonics.size();
  Eigen::VectorXd dev(static_cast<Eigen::Index>(3 * n));
  for (std::size_t k = 0; k < n; ++k) {
    dev(static_cast<Eigen::Index>(3 * k)) =
        sqrt_t * (theta_hat.harmonics[k].a - theta.harmonics[k].a);
    dev(static_cast<Eigen::Index>(3 * k + 1)) =
        sqrt_t * (theta_hat.harmonics[k].b - theta.harmonics[k].b);
    dev(static_cast<Eigen::Index>(3 * k + 2)) =
        t32 * (theta_hat.harmonics[k].phi - theta.harmonics[k].phi);
  }
  return dev;
}

struct GammaOptions {
  int j_max = 16;  // cap on expansion terms for general transforms
  ConvolutionOptions conv;
  double conv_rel_tol = 1e-3;  // quadrature tolerance carried into the bound
};

struct GammaMatrix {
  std::vector<Eigen::Matrix3d> blocks;  // one per harmonic
  int series_terms_used = 0;
  double truncation_error_bound = 0.0;

  /// Block-diagonal assembly, 3N x 3N.
  Eigen::MatrixXd assembled() const {
    const auto n = static_cast<Eigen::Index>(blocks.size());
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (Eigen::Index k = 0; k < n; ++k)
      full.block<3, 3>(3 * k, 3 * k) = blocks[static_cast<std::size_t>(k)];
    return full;
  }
};

/// The limiting covariance Gamma = diag(Gamma_k) of the normalized
/// deviations, per the block formula in the header comment. Requires the
/// summable-covariance regime alpha_min * rank > 1.
inline GammaMatrix gamma_matrix(const TrigParams& theta, const NoiseModel& model,
                                const TransformSpec& transform,
                                const GammaOptions& opt = {}) {
  validate(theta);
  validate(model);
  const auto m = static_cast<int>(transform.rank);
  if (!(model.alpha_min() * m > 1.0))
    throw divergence_error(
        "gamma_matrix: alpha * rank = " +
        std::to_string(model.alpha_min() * m) +
        " <= 1, outside the summable-covariance regime");

  const int j_cap =
      std::min<int>(opt.j_max, static_cast<int>(transform.coefficients.size()));

  GammaMatrix gamma;
  double worst_bound = 0.0;
  for (const auto& h : theta.harmonics) {
    const double c2 = h.c_squared();
    double series = 0.0;
    double series_bound = 0.0;
    double f_max = 0.0;
    int terms = 0;
    double factorial = 1.0;
    for (int j = 1; j <= j_cap; ++j) {
      factorial *= j;
      const double coeff = transform.coefficients[static_cast<std::size_t>(j - 1)];
      if (coeff == 0.0) continue;
      const double f_j = spectral_convolution(model, j, h.phi, opt.conv);
      const double weight = coeff * coeff / factorial;
      series += weight * f_j;
      series_bound += weight * std::fabs(f_j) * opt.conv_rel_tol;
      f_max = std::max(f_max, std::fabs(f_j));
      ++terms;
    }
    // Tail of the coefficient list beyond the cap, bounded by the largest
    // computed convolution value.
    double tail_mass = 0.0;
    double fact_tail = factorial;
    for (std::size_t j = static_cast<std::size_t>(j_cap) + 1;
         j <= transform.coefficients.size(); ++j) {
      fact_tail *= static_cast<double>(j);
      const double coeff = transform.coefficients[j - 1];
      tail_mass += coeff * coeff / fact_tail;
    }
    series_bound += tail_mass * f_max;

    const double scale = 4.0 * std::numbers::pi_v<double> * series / c2;
    const double a = h.a;
    const double b = h.b;
    Eigen::Matrix3d block;
    block << a * a + 4.0 * b * b, -3.0 * a * b, -6.0 * b,
        -3.0 * a * b, 4.0 * a * a + b * b, 6.0 * a,
        -6.0 * b, 6.0 * a, 12.0;
    gamma.blocks.push_back(scale * block);
    gamma.series_terms_used = std::max(gamma.series_terms_used, terms);
    const double bound_scale = 4.0 * std::numbers::pi_v<double> / c2;
    worst_bound = std::max(worst_bound, bound_scale * series_bound *
                                            block.cwiseAbs().maxCoeff());
  }
  gamma.truncation_error_bound = worst_bound;
  return gamma;
}

}  // namespace hpl
