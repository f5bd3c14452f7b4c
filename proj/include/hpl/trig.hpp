#pragma once

// Harmonic regression types: the sum-of-sinusoids signal
//
//   g(t, theta) = sum_k [ A_k cos(phi_k t) + B_k sin(phi_k t) ]
//
// with squared amplitudes C_k^2 = A_k^2 + B_k^2 > 0 and ordered frequencies
// confined to an open band (phi_lower, phi_upper). The Walker box narrows
// that band with the horizon-dependent margins that make the frequencies
// identifiable at rate T^(3/2).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "hpl/errors.hpp"
#include "hpl/rng.hpp"

namespace hpl {

struct Harmonic {
  double a = 0.0;    // cosine amplitude A_k
  double b = 0.0;    // sine amplitude B_k
  double phi = 0.0;  // frequency, radians per step

  double c_squared() const { return a * a + b * b; }
};

struct TrigParams {
  std::vector<Harmonic> harmonics;
  double phi_lower = 0.0;
  double phi_upper = 1.0;

  std::size_t n_harmonics() const { return harmonics.size(); }
};

/// Enforces the signal invariants: C_k^2 > 0 throughout and frequencies
/// strictly increasing inside (phi_lower, phi_upper) with 0 <= phi_lower and
/// phi_upper < pi.
inline void validate(const TrigParams& theta) {
  if (theta.harmonics.empty())
    throw config_error("trig params: needs at least one harmonic");
  if (!(theta.phi_lower >= 0.0))
    throw config_error("trig params: phi_lower must be >= 0");
  if (!(theta.phi_upper < std::numbers::pi_v<double>))
    throw config_error("trig params: phi_upper must be < pi");
  double prev = theta.phi_lower;
  for (std::size_t k = 0; k < theta.harmonics.size(); ++k) {
    const auto& h = theta.harmonics[k];
    const std::string tag = "harmonic " + std::to_string(k);
    if (!(h.c_squared() > 0.0))
      throw config_error(tag + ": amplitude C^2 must be > 0");
    if (!(h.phi > prev))
      throw config_error(tag + ": frequencies must increase within bounds");
    prev = h.phi;
  }
  if (!(prev < theta.phi_upper))
    throw config_error("trig params: largest frequency must be < phi_upper");
}

/// Signal value g(t, theta).
inline double regression_value(const TrigParams& theta, double t) {
  double value = 0.0;
  for (const auto& h : theta.harmonics)
    value += h.a * std::cos(h.phi * t) + h.b * std::sin(h.phi * t);
  return value;
}

/// Per-harmonic gradient of g(t, theta) with respect to (A_k, B_k, phi_k):
/// (cos phi_k t, sin phi_k t, t(-A_k sin phi_k t + B_k cos phi_k t)),
/// written into `grad` as consecutive triples. Returns the value.
inline double regression_eval(const TrigParams& theta, double t,
                              double* grad) {
  double value = 0.0;
  for (std::size_t k = 0; k < theta.harmonics.size(); ++k) {
    const auto& h = theta.harmonics[k];
    const double c = std::cos(h.phi * t);
    const double s = std::sin(h.phi * t);
    value += h.a * c + h.b * s;
    grad[3 * k + 0] = c;
    grad[3 * k + 1] = s;
    grad[3 * k + 2] = t * (-h.a * s + h.b * c);
  }
  return value;
}

/// Admissible frequency set for horizon T: the configured band intersected
/// with (1/sqrt(T), phi_upper), plus the pairwise separation floor 1/sqrt(T).
struct WalkerSet {
  std::size_t t_horizon = 0;
  double lower = 0.0;
  double upper = 0.0;
  double min_separation = 0.0;

  WalkerSet(std::size_t t, double phi_lower, double phi_upper) {
    if (t < 2) throw config_error("walker set: horizon must be >= 2");
    const double margin = 1.0 / std::sqrt(static_cast<double>(t));
    t_horizon = t;
    lower = std::max(phi_lower, margin);
    upper = phi_upper;
    min_separation = margin;
    if (!(lower < upper))
      throw config_error("walker set: empty admissible frequency band");
  }
};

/// Stable content hash of the signal parameters.
inline std::uint64_t fingerprint(const TrigParams& theta) {
  std::uint64_t h = 0x74726967u;  // arbitrary domain separator
  h = hash_combine(h, theta.harmonics.size());
  for (const auto& hk : theta.harmonics) {
    h = hash_combine(h, double_bits(hk.a));
    h = hash_combine(h, double_bits(hk.b));
    h = hash_combine(h, double_bits(hk.phi));
  }
  h = hash_combine(h, double_bits(theta.phi_lower));
  h = hash_combine(h, double_bits(theta.phi_upper));
  return h;
}

}  // namespace hpl
