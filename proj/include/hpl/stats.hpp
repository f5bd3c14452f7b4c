#pragma once

// Scalar distribution functions used throughout the library. Everything here
// is self-contained double-precision numerics: the error function pair uses
// Cody's rational Chebyshev approximations, the normal quantile is Wichura's
// PPND16, and the chi-square pair is built on the regularized incomplete
// gamma function with a Wilson-Hilferty-seeded Newton inversion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>

#include "hpl/errors.hpp"

namespace hpl {

namespace detail {

/// erfc on [0.46875, 4] and erf on [0, 0.46875] share exp(-x^2) split into
/// a truncated square plus remainder to avoid cancellation (Cody's trick).
inline double erfc_exp_scale(double x) {
  const double ysq = std::trunc(x * 16.0) / 16.0;
  const double del = (x - ysq) * (x + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

}  // namespace detail

/// Complementary error function, |relative error| below 1e-14 on the real
/// line. Rational approximations follow W. J. Cody's three-interval scheme.
inline double erfc_scalar(double x) {
  constexpr double kA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                            3.77485237685302021e+02, 3.20937758913846947e+03,
                            1.85777706184603153e-01};
  constexpr double kB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                            1.28261652607737228e+03, 2.84423683343917062e+03};
  constexpr double kC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                            6.61191906371416295e+01, 2.98635138197400131e+02,
                            8.81952221241769090e+02, 1.71204761263407058e+03,
                            2.05107837782607147e+03, 1.23033935479799725e+03,
                            2.15311535474403846e-08};
  constexpr double kD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                            5.37181101862009858e+02, 1.62138957456669019e+03,
                            3.29079923573345963e+03, 4.36261909014324716e+03,
                            3.43936767414372164e+03, 1.23033935480374942e+03};
  constexpr double kP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                            1.25781726111229246e-01, 1.60837851487422766e-02,
                            6.58749161529837803e-04, 1.63153871373020978e-02};
  constexpr double kQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                            5.27905102951428412e-01, 6.05183413124413191e-02,
                            2.33520497626869185e-03};
  constexpr double kInvSqrtPi = 5.6418958354775628695e-01;

  const double ax = std::fabs(x);
  double result;
  if (ax <= 0.46875) {
    const double y = ax * ax;
    double xnum = kA[4] * y;
    double xden = y;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + kA[i]) * y;
      xden = (xden + kB[i]) * y;
    }
    const double erf_val = x * (xnum + kA[3]) / (xden + kB[3]);
    return 1.0 - erf_val;
  }
  if (ax <= 4.0) {
    double xnum = kC[8] * ax;
    double xden = ax;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + kC[i]) * ax;
      xden = (xden + kD[i]) * ax;
    }
    result = (xnum + kC[7]) / (xden + kD[7]);
    result *= detail::erfc_exp_scale(ax);
  } else if (ax < 26.6) {
    const double y = 1.0 / (ax * ax);
    double xnum = kP[5] * y;
    double xden = y;
    for (int i = 0; i < 4; ++i) {
      xnum = (xnum + kP[i]) * y;
      xden = (xden + kQ[i]) * y;
    }
    result = y * (xnum + kP[4]) / (xden + kQ[4]);
    result = (kInvSqrtPi - result) / ax;
    result *= detail::erfc_exp_scale(ax);
  } else {
    result = 0.0;
  }
  return x < 0.0 ? 2.0 - result : result;
}

inline double erf_scalar(double x) { return 1.0 - erfc_scalar(x); }

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * erfc_scalar(-x / std::numbers::sqrt2_v<double>);
}

/// Standard normal quantile (Wichura's algorithm AS 241, PPND16 variant).
/// Absolute error is below 1e-15 for p away from the extreme tails.
inline double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw config_error("normal_quantile: p must lie in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) *
                 r +
             4.5921953931549871457e+4) *
                r +
            1.3731693765509461125e+4) *
               r +
           1.9715909503065514427e+3) *
              r +
          1.3314166789178437745e+2) *
             r +
         3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) *
                 r +
             2.1213794301586595867e+4) *
                r +
            5.3941960214247511077e+3) *
               r +
           6.8718700749205790830e+2) *
              r +
          4.2313330701600911252e+1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

/// Regularized lower incomplete gamma function P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw config_error("gamma_p: requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 800; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16)
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    throw divergence_error("gamma_p: series failed to converge");
  }
  // Lentz continued fraction for Q(a, x).
  constexpr double kFpMin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 800; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) {
      const double q = std::exp(-x + a * std::log(x) - gln) * h;
      return 1.0 - q;
    }
  }
  throw divergence_error("gamma_p: continued fraction failed to converge");
}

/// Chi-square CDF with k degrees of freedom.
inline double chi2_cdf(double x, double k) {
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * k, 0.5 * x);
}

inline double chi2_pdf(double x, double k) {
  if (x <= 0.0) return 0.0;
  const double h = 0.5 * k;
  return std::exp((h - 1.0) * std::log(x) - 0.5 * x - std::lgamma(h) -
                  h * std::numbers::ln2_v<double>);
}

/// Chi-square quantile: Wilson-Hilferty start polished by safeguarded Newton.
inline double chi2_quantile(double p, double k) {
  if (!(p >= 0.0) || !(p < 1.0))
    throw config_error("chi2_quantile: p must lie in [0, 1)");
  if (!(k > 0.0)) throw config_error("chi2_quantile: k must be positive");
  if (p == 0.0) return 0.0;

  const double z = normal_quantile(p);
  const double t = 2.0 / (9.0 * k);
  double x = k * std::pow(1.0 - t + z * std::sqrt(t), 3.0);
  if (!(x > 0.0) || !std::isfinite(x)) {
    // Small-p asymptotic of the incomplete gamma: P(a, y) ~ y^a / (a Gamma(a)).
    const double a = 0.5 * k;
    x = 2.0 * std::exp((std::log(p) + std::log(a) + std::lgamma(a)) / a);
  }

  double lo = 0.0;
  double hi = std::max(x * 8.0, k + 64.0);
  while (chi2_cdf(hi, k) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw divergence_error("chi2_quantile: bracket overflow");
  }
  x = std::min(std::max(x, lo + 1e-300), hi);
  for (int it = 0; it < 128; ++it) {
    const double f = chi2_cdf(x, k) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double fp = chi2_pdf(x, k);
    double step = fp > 0.0 ? f / fp : 0.0;
    double next = x - step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-14 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

/// Asymptotic Kolmogorov distribution tail used for two-sample KS p-values.
inline double ks_two_sample_pvalue(double d_stat, std::size_t n1,
                                   std::size_t n2) {
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    (static_cast<double>(n1) + static_cast<double>(n2));
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d_stat;
  double sum = 0.0;
  for (int j = 1; j <= 128; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  const double p = 2.0 * sum;
  return std::min(1.0, std::max(0.0, p));
}

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unbiased sample variance (n - 1 denominator).
inline double sample_variance(std::span<const double> v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace hpl
