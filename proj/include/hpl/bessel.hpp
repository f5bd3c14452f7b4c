#pragma once

// Modified Bessel function of the second kind (McDonald function) K_nu(z),
// evaluated from the integral representation
//
//   K_nu(z) = Int_0^inf cosh(nu u) exp(-z cosh u) du ,
//
// whose integrand is even in u, smooth, and double-exponentially decaying,
// so the trapezoidal rule converges spectrally fast. Step halving continues
// until the requested relative tolerance is met.

#include <cmath>

#include "hpl/errors.hpp"

namespace hpl {

/// K_nu(z) for real order nu and z > 0. Symmetric in nu. Throws a
/// config_error for z <= 0 and an overflow_error when the result exceeds
/// double range (small z combined with large |nu|). Underflows to 0 for very
/// large z.
inline double bessel_k(double nu, double z, double rel_tol = 1e-13) {
  if (!(z > 0.0)) throw config_error("bessel_k: requires z > 0");
  nu = std::fabs(nu);
  if (z > 740.0) return 0.0;  // K_nu(z) ~ sqrt(pi/2z) e^{-z} underflows.

  // Integrand peak: d/du [nu u - z cosh u] = 0 at sinh u* = nu / z. The
  // integral is bounded by roughly e^{log_peak}, so a large exponent means
  // the result cannot be represented.
  const double u_peak = nu > 0.0 ? std::asinh(nu / z) : 0.0;
  const double log_peak = nu * u_peak - z * std::cosh(u_peak);
  if (log_peak > 690.0)
    throw overflow_error("bessel_k: result overflows double range");

  // Truncate where the integrand has fallen ~55 e-folds below its peak.
  double u_end = u_peak + 2.0;
  for (int i = 0; i < 64; ++i) {
    if (nu * u_end - z * std::cosh(u_end) < log_peak - 55.0) break;
    u_end += 1.0;
  }

  const auto integrand = [&](double u) {
    const double a = nu * u;
    // For large arguments cosh(a) alone overflows; fold it into the exponent
    // (the e^{-a} half is then below double precision anyway).
    if (a > 36.0) return 0.5 * std::exp(a - z * std::cosh(u));
    return std::cosh(a) * std::exp(-z * std::cosh(u));
  };

  int n = 16;
  double h = u_end / n;
  double sum = 0.5 * integrand(0.0);
  for (int i = 1; i < n; ++i) sum += integrand(i * h);
  sum += 0.5 * integrand(u_end);
  double value = h * sum;

  for (int pass = 0; pass < 14; ++pass) {
    double mid = 0.0;
    for (int i = 0; i < n; ++i) mid += integrand((i + 0.5) * h);
    const double refined = 0.5 * value + 0.5 * h * mid;
    n *= 2;
    h *= 0.5;
    const double change = std::fabs(refined - value);
    value = refined;
    if (pass >= 2 && change <= rel_tol * std::fabs(value)) break;
  }
  if (!std::isfinite(value))
    throw overflow_error("bessel_k: non-finite quadrature result");
  return value;
}

}  // namespace hpl
