#pragma once

// Stationary noise covariance family
//
//   B(t) = sum_j D_j cos(kappa_j t) / (1 + t^2)^(alpha_j / 2),
//
// a convex mixture of cyclical, polynomially decaying components. The
// mixture weights sum to one so that B(0) = 1; each alpha_j > 0 controls the
// decay (alpha_j <= 1 gives long-range dependence) and kappa_j >= 0 places
// the spectral peak pair at +-kappa_j.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hpl/errors.hpp"
#include "hpl/rng.hpp"

namespace hpl {

struct NoiseComponent {
  double weight = 1.0;  // D_j
  double alpha = 1.0;   // decay exponent, > 0
  double kappa = 0.0;   // cycle frequency, >= 0
};

struct NoiseModel {
  std::vector<NoiseComponent> components;

  /// Smallest decay exponent across components; drives the dependence range.
  double alpha_min() const {
    double a = components.empty() ? 0.0 : components.front().alpha;
    for (const auto& c : components) a = std::min(a, c.alpha);
    return a;
  }
};

/// Enforces the model invariants: weights nonnegative and summing to 1
/// (within 1e-12), all alpha positive, kappas strictly increasing.
inline void validate(const NoiseModel& model) {
  if (model.components.empty())
    throw config_error("noise model: needs at least one component");
  double weight_sum = 0.0;
  double prev_kappa = -1.0;
  for (std::size_t j = 0; j < model.components.size(); ++j) {
    const auto& c = model.components[j];
    const std::string tag = "noise component " + std::to_string(j);
    if (!(c.weight >= 0.0)) throw config_error(tag + ": weight must be >= 0");
    if (!(c.alpha > 0.0)) throw config_error(tag + ": alpha must be > 0");
    if (!(c.kappa >= 0.0)) throw config_error(tag + ": kappa must be >= 0");
    if (!(c.kappa > prev_kappa))
      throw config_error(tag + ": kappas must be strictly increasing");
    prev_kappa = c.kappa;
    weight_sum += c.weight;
  }
  if (std::fabs(weight_sum - 1.0) > 1e-12)
    throw config_error("noise model: weights must sum to 1");
}

/// B(t). Even in t, B(0) = 1, |B(t)| <= 1 on valid models.
inline double covariance_at(const NoiseModel& model, double t) {
  const double decay_base = 1.0 + t * t;
  double value = 0.0;
  for (const auto& c : model.components)
    value += c.weight * std::cos(c.kappa * t) *
             std::pow(decay_base, -0.5 * c.alpha);
  return value;
}

/// Stable content hash of the model parameters, used to key caches and to
/// stamp generated paths with their provenance.
inline std::uint64_t fingerprint(const NoiseModel& model) {
  std::uint64_t h = 0x6e6f697365u;  // arbitrary domain separator
  h = hash_combine(h, model.components.size());
  for (const auto& c : model.components) {
    h = hash_combine(h, double_bits(c.weight));
    h = hash_combine(h, double_bits(c.alpha));
    h = hash_combine(h, double_bits(c.kappa));
  }
  return h;
}

}  // namespace hpl
