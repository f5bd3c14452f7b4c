#pragma once

// Spectral side of the covariance family. Each component
// cos(kappa t)/(1+t^2)^(alpha/2) has spectral density
//
//   f_{alpha,kappa}(lambda) = (c1(alpha)/2) [ K_nu(|lambda+kappa|) |lambda+kappa|^nu
//                                           + K_nu(|lambda-kappa|) |lambda-kappa|^nu ],
//
// with nu = (alpha-1)/2 and c1(alpha) = 2^{(1-alpha)/2} / (sqrt(pi) Gamma(alpha/2)),
// normalized so that B(t) = Int e^{i lambda t} f(lambda) d lambda. For
// alpha > 1 the density is continuous with a finite value at lambda = +-kappa;
// for alpha <= 1 it blows up like c2(alpha)/2 |lambda -+ kappa|^{alpha-1}
// (integrably), which is the long-range-dependent regime.
//
// Also here: quadrature utilities aware of those singular points, the j-fold
// spectral self-convolution computed through the time domain, and the
// classification of a (noise, transform, signal) triple into the dependence
// regimes that decide which limit theorems apply.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hpl/bessel.hpp"
#include "hpl/covariance.hpp"
#include "hpl/errors.hpp"
#include "hpl/hermite.hpp"
#include "hpl/trig.hpp"

namespace hpl {

/// Normalization constant c1(alpha) = 2^{(1-alpha)/2} / (sqrt(pi) Gamma(alpha/2)).
inline double spectral_c1(double alpha) {
  if (!(alpha > 0.0)) throw config_error("spectral_c1: alpha must be > 0");
  return std::exp2(0.5 * (1.0 - alpha)) /
         (std::sqrt(std::numbers::pi_v<double>) * std::tgamma(0.5 * alpha));
}

/// Long-range singularity constant c2(alpha) = 1 / (2 Gamma(alpha) cos(alpha pi / 2))
/// for 0 < alpha < 1: f_{alpha,kappa}(kappa + h) ~ (c2(alpha)/2) h^{alpha-1}.
inline double spectral_c2(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw config_error("spectral_c2: requires 0 < alpha < 1");
  return 1.0 /
         (2.0 * std::tgamma(alpha) * std::cos(0.5 * std::numbers::pi_v<double> * alpha));
}

namespace detail {

/// One half-term K_nu(z) z^nu of the component density, with the z -> 0
/// limit 2^{nu-1} Gamma(nu) filled in for nu > 0. Callers screen out the
/// singular case (nu <= 0 with z ~ 0) beforehand.
inline double bessel_kernel(double nu, double z) {
  if (z < 1e-13) {
    if (nu > 0.0) return std::exp2(nu - 1.0) * std::tgamma(nu);
    throw singularity_error("spectral density: evaluation at singular point");
  }
  return bessel_k(nu, z) * std::pow(z, nu);
}

}  // namespace detail

/// f_{alpha,kappa}(lambda) for a single component. Throws singularity_error
/// at lambda = +-kappa when alpha <= 1.
inline double spectral_density_component(double alpha, double kappa,
                                         double lambda) {
  const double nu = 0.5 * (alpha - 1.0);
  const double z_plus = std::fabs(lambda + kappa);
  const double z_minus = std::fabs(lambda - kappa);
  if (alpha <= 1.0 && (z_plus < 1e-13 || z_minus < 1e-13))
    throw singularity_error(
        "spectral density: singular point at kappa = " + std::to_string(kappa) +
        " (alpha = " + std::to_string(alpha) + " <= 1)");
  return 0.5 * spectral_c1(alpha) *
         (detail::bessel_kernel(nu, z_plus) + detail::bessel_kernel(nu, z_minus));
}

/// Mixture density f(lambda) = sum_j D_j f_{alpha_j, kappa_j}(lambda).
/// Even in lambda, nonnegative; integrates to B(0) = 1 over the real line.
inline double spectral_density_at(const NoiseModel& model, double lambda) {
  double value = 0.0;
  for (const auto& c : model.components)
    value += c.weight * spectral_density_component(c.alpha, c.kappa, lambda);
  return value;
}

/// Finite value of f_{alpha,kappa} at lambda = +-kappa for alpha > 1:
/// (c1/2) [ K_nu(2 kappa) (2 kappa)^nu + 2^{nu-1} Gamma(nu) ], the second
/// term being the z -> 0 limit of K_nu(z) z^nu.
inline double spectral_density_component_at_kappa(double alpha, double kappa) {
  if (!(alpha > 1.0))
    throw singularity_error(
        "spectral density: no finite value at kappa for alpha <= 1");
  const double nu = 0.5 * (alpha - 1.0);
  const double limit_term = std::exp2(nu - 1.0) * std::tgamma(nu);
  const double cross_term =
      kappa > 0.0 ? bessel_k(nu, 2.0 * kappa) * std::pow(2.0 * kappa, nu)
                  : limit_term;
  return 0.5 * spectral_c1(alpha) * (cross_term + limit_term);
}

/// All spectral atoms {+-kappa_j} of the model (0 listed once).
inline std::vector<double> singular_points(const NoiseModel& model) {
  std::vector<double> pts;
  for (const auto& c : model.components) {
    if (c.kappa > 0.0) pts.push_back(-c.kappa);
    pts.push_back(c.kappa);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

// ---------------------------------------------------------------------------
// Singularity-aware quadrature of f against Fourier kernels.

struct SpectralQuadOptions {
  int panels_per_side = 16;    // geometric panels stacked toward each atom
  double panel_ratio = 0.25;   // geometric shrink factor
  double max_panel_width = 1.5;  // resolves the cos(lambda t) oscillation
  double tail_cutoff = 80.0;   // K_nu decay makes f negligible past kappa_max + cutoff
};

namespace detail {

inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <class F>
double gl16(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGl16Nodes.size(); ++i) {
    const double d = half * kGl16Nodes[i];
    sum += kGl16Weights[i] * (f(mid - d) + f(mid + d));
  }
  return half * sum;
}

/// Integrates f over [a, b] with geometric panels clustered toward the `a`
/// endpoint (pass negated coordinates to cluster toward b).
template <class F>
double gl16_geometric(const F& f, double a, double b,
                      const SpectralQuadOptions& opt) {
  const double width = b - a;
  double total = 0.0;
  double hi = 1.0;
  for (int p = 0; p < opt.panels_per_side; ++p) {
    const double lo = (p + 1 == opt.panels_per_side) ? 0.0 : hi * opt.panel_ratio;
    total += gl16(f, a + lo * width, a + hi * width);
    hi = lo;
  }
  return total;
}

}  // namespace detail

/// Int_{-L}^{L} f(lambda) e^{i lambda t} d lambda, which is real and equals
/// 2 Int_0^L f(lambda) cos(lambda t) d lambda by evenness. At t = 0 this
/// checks the normalization Int f = B(0); at general t it inverts the
/// spectral representation. Splits the domain at every atom kappa_j; on a
/// side owned by a long-range component (alpha_j <= 1) it integrates in the
/// variable u = z^alpha_j (z the distance to the atom), which turns the
/// z^{alpha_j - 1} blow-up into a bounded integrand; every special endpoint
/// additionally gets geometrically shrinking panels.
inline double spectral_fourier(const NoiseModel& model, double t, double half_width,
                               const SpectralQuadOptions& opt = {}) {
  validate(model);
  if (!(half_width > 0.0))
    throw config_error("spectral_fourier: half_width must be > 0");

  const auto integrand = [&](double lambda) {
    return spectral_density_at(model, lambda) * std::cos(lambda * t);
  };

  // Atoms inside (0, L), plus alpha for the owner of each atom (0 is owned
  // by a kappa = 0 component when present).
  double kappa_max = 0.0;
  std::map<double, double> atom_alpha;  // atom -> smallest alpha owning it
  atom_alpha[0.0] = 2.0;                // plain endpoint unless a component owns 0
  for (const auto& c : model.components) {
    kappa_max = std::max(kappa_max, c.kappa);
    auto [it, inserted] = atom_alpha.try_emplace(c.kappa, c.alpha);
    if (!inserted) it->second = std::min(it->second, c.alpha);
  }
  const double effective_l = std::min(half_width, kappa_max + opt.tail_cutoff);

  std::vector<std::pair<double, double>> atoms;  // (position, owner alpha)
  for (const auto& [pos, alpha] : atom_alpha)
    if (pos < effective_l) atoms.emplace_back(pos, alpha);
  atoms.emplace_back(effective_l, 2.0);  // plain right endpoint

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    const auto [left, alpha_left] = atoms[i];
    const auto [right, alpha_right] = atoms[i + 1];
    const double mid = 0.5 * (left + right);

    // Left half [left, mid], clustered toward the atom at `left`.
    const auto left_half = [&](double z0, double z1) {
      if (alpha_left <= 1.0) {
        // u = z^alpha, z = distance above the atom.
        const double a = alpha_left;
        const auto sub = [&](double u) {
          const double z = std::pow(u, 1.0 / a);
          return integrand(left + z) * std::pow(u, (1.0 - a) / a) / a;
        };
        return detail::gl16_geometric(sub, std::pow(z0, a), std::pow(z1, a), opt);
      }
      const auto shifted = [&](double z) { return integrand(left + z); };
      return detail::gl16_geometric(shifted, z0, z1, opt);
    };
    // Right half [mid, right], clustered toward the atom at `right`.
    const auto right_half = [&](double z0, double z1) {
      if (alpha_right <= 1.0) {
        const double a = alpha_right;
        const auto sub = [&](double u) {
          const double z = std::pow(u, 1.0 / a);
          return integrand(right - z) * std::pow(u, (1.0 - a) / a) / a;
        };
        return detail::gl16_geometric(sub, std::pow(z0, a), std::pow(z1, a), opt);
      }
      const auto shifted = [&](double z) { return integrand(right - z); };
      return detail::gl16_geometric(shifted, z0, z1, opt);
    };

    // Respect the oscillation length of cos(lambda t): chop each half into
    // sections no wider than max_panel_width / (1 + |t|/4), refining
    // geometrically only in the section adjacent to the atom.
    const double section_cap = opt.max_panel_width / (1.0 + 0.25 * std::fabs(t));
    const double half_len = mid - left;
    const int sections = std::max(1, static_cast<int>(std::ceil(half_len / section_cap)));
    const double step = half_len / sections;
    total += left_half(0.0, step);
    for (int s = 1; s < sections; ++s)
      total += detail::gl16(integrand, left + s * step, left + (s + 1) * step);
    total += right_half(0.0, step);
    for (int s = 1; s < sections; ++s)
      total += detail::gl16(integrand, right - (s + 1) * step, right - s * step);
  }
  return 2.0 * total;
}

// ---------------------------------------------------------------------------
// j-fold spectral self-convolution.

struct ConvolutionOptions {
  double t_max = 1e4;      // truncation of the time-domain integral
  double grid_step = 0.05;  // trapezoid step
};

namespace detail {

/// Cache of sampled B(kh)^j arrays keyed by (model, j, grid). Read-mostly;
/// a mutex guards the map while entries themselves are immutable.
inline const std::vector<double>& covariance_power_grid(const NoiseModel& model,
                                                        int j,
                                                        const ConvolutionOptions& opt) {
  struct Key {
    std::uint64_t model_fp;
    int j;
    std::uint64_t t_max_bits, step_bits;
    auto operator<=>(const Key&) const = default;
  };
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<std::vector<double>>> cache;

  const Key key{fingerprint(model), j, double_bits(opt.t_max),
                double_bits(opt.grid_step)};
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (!slot) {
    const auto n = static_cast<std::size_t>(std::floor(opt.t_max / opt.grid_step));
    auto grid = std::make_unique<std::vector<double>>(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      const double b = covariance_at(model, k * opt.grid_step);
      double p = 1.0;
      for (int i = 0; i < j; ++i) p *= b;
      (*grid)[k] = p;
    }
    slot = std::move(grid);
  }
  return *slot;
}

}  // namespace detail

/// f^{(*j)}(lambda), the j-fold self-convolution of the spectral density,
/// computed through the time domain as (1/2pi) Int B(t)^j e^{-i lambda t} dt
/// truncated to [-t_max, t_max] (the transform of B^j equals the convolution
/// of the transforms). Requires alpha_min * j > 1 for absolute integrability.
inline double spectral_convolution(const NoiseModel& model, int j, double lambda,
                                   const ConvolutionOptions& opt = {}) {
  validate(model);
  if (j < 1) throw config_error("spectral_convolution: j must be >= 1");
  if (!(opt.t_max > 0.0 && opt.grid_step > 0.0))
    throw config_error("spectral_convolution: grid parameters must be > 0");
  if (!(model.alpha_min() * j > 1.0))
    throw divergence_error(
        "spectral_convolution: alpha * j = " +
        std::to_string(model.alpha_min() * j) +
        " <= 1, B^j is not absolutely integrable");

  const auto& grid = detail::covariance_power_grid(model, j, opt);
  const double h = opt.grid_step;

  // Trapezoid with cos(lambda k h) generated by a rotation recurrence.
  const double c = std::cos(lambda * h);
  const double s = std::sin(lambda * h);
  double cos_k = 1.0, sin_k = 0.0;
  double sum = 0.5 * grid[0];
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double cos_next = cos_k * c - sin_k * s;
    sin_k = sin_k * c + cos_k * s;
    cos_k = cos_next;
    sum += grid[k] * cos_k;
  }
  {
    const double cos_next = cos_k * c - sin_k * s;
    sum += 0.5 * grid.back() * cos_next;
  }
  return sum * h / std::numbers::pi_v<double>;
}

// ---------------------------------------------------------------------------
// Dependence-regime classification.

enum class Regime { kA4Case1, kA4Case2, kIv2013Extension, kA4Prime, kUnknown };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kA4Case1: return "short_range_rank1";
    case Regime::kA4Case2: return "summable_rank_m";
    case Regime::kIv2013Extension: return "moderate_lrd_rank1";
    case Regime::kA4Prime: return "strong_lrd_rank1";
    case Regime::kUnknown: return "unclassified";
  }
  return "unclassified";
}

struct ConditionReport {
  std::size_t hermite_rank = 1;
  double alpha_min = 0.0;
  Regime regime = Regime::kUnknown;
  std::vector<double> noise_singularities;  // {+-kappa_j}
  std::vector<double> regression_atoms;     // {phi_k}
  bool a5_satisfied = true;  // spectral atoms of noise and signal disjoint
};

/// Classifies the (noise, transform, signal) triple into the dependence
/// regime that determines which asymptotic results are in force, and checks
/// that the signal frequencies avoid the noise spectral atoms.
inline ConditionReport condition_report(const NoiseModel& model,
                                        const TransformSpec& transform,
                                        const TrigParams& theta) {
  validate(model);
  validate(theta);
  ConditionReport report;
  report.hermite_rank = transform.rank;
  report.alpha_min = model.alpha_min();
  const std::size_t m = transform.rank;
  const double a = report.alpha_min;
  if (m == 1 && a > 1.0) {
    report.regime = Regime::kA4Case1;
  } else if (m >= 2 && a * static_cast<double>(m) > 1.0) {
    report.regime = Regime::kA4Case2;
  } else if (m == 1 && a > 0.5 && a <= 1.0) {
    report.regime = Regime::kIv2013Extension;
  } else if (m == 1 && a < 0.5) {
    report.regime = Regime::kA4Prime;
  } else {
    report.regime = Regime::kUnknown;
  }
  report.noise_singularities = singular_points(model);
  for (const auto& h : theta.harmonics) report.regression_atoms.push_back(h.phi);
  report.a5_satisfied = true;
  for (double phi : report.regression_atoms)
    for (double xi : report.noise_singularities)
      if (std::fabs(phi - xi) <= 1e-12) report.a5_satisfied = false;
  return report;
}

}  // namespace hpl
