#pragma once

// Frequency/amplitude estimation for the harmonic regression model:
// the least-squares objective Q_T, periodogram peak-picking initialization
// (with golden-section refinement between Fourier bins and closed-form
// amplitude starts), and the constrained nonlinear least-squares estimator
// with frequencies confined to the Walker admissible set.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "hpl/errors.hpp"
#include "hpl/fft.hpp"
#include "hpl/lm.hpp"
#include "hpl/path.hpp"
#include "hpl/trig.hpp"

namespace hpl {

inline constexpr std::size_t kMinHorizonForEstimation = 16;

/// Q_T(theta) = (1/T) sum_{t=1..T} (x(t) - g(t, theta))^2.
inline double objective_qt(const TrigParams& theta, const SamplePath& x) {
  require_nonempty(x, "objective_qt");
  validate(theta);
  const std::size_t t_len = x.values.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < t_len; ++i) {
    const double diff =
        x.values[i] - regression_value(theta, static_cast<double>(i + 1));
    sum += diff * diff;
  }
  return sum / static_cast<double>(t_len);
}

namespace detail {

/// Continuous periodogram I(w) = |sum_t x(t) e^{-iwt}|^2 / T, t = 1..T.
inline double periodogram_at(const std::vector<double>& values, double w) {
  const double c_step = std::cos(w);
  const double s_step = std::sin(w);
  double c = 1.0, s = 0.0;  // rotates to (cos wt, sin wt), starting at t=1
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double c_next = c * c_step - s * s_step;
    s = s * c_step + c * s_step;
    c = c_next;
    if ((i & 1023u) == 1023u) {
      const double t = static_cast<double>(i + 1);
      c = std::cos(w * t);
      s = std::sin(w * t);
    }
    re += values[i] * c;
    im -= values[i] * s;
  }
  return (re * re + im * im) / static_cast<double>(values.size());
}

/// Golden-section maximization of the periodogram on [lo, hi].
inline double golden_max(const std::vector<double>& values, double lo,
                         double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = periodogram_at(values, x1);
  double f2 = periodogram_at(values, x2);
  for (int i = 0; i < 64 && (b - a) > 1e-13; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = periodogram_at(values, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = periodogram_at(values, x1);
    }
  }
  return 0.5 * (a + b);
}

/// Closed-form least-squares amplitudes at fixed frequencies.
inline void linear_amplitudes(const std::vector<double>& values,
                              std::vector<Harmonic>& harmonics) {
  const std::size_t n = harmonics.size();
  const std::size_t t_len = values.size();
  Eigen::MatrixXd design(t_len, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = harmonics[k].phi;
    const double c_step = std::cos(phi);
    const double s_step = std::sin(phi);
    double c = 1.0, s = 0.0;
    for (std::size_t i = 0; i < t_len; ++i) {
      const double c_next = c * c_step - s * s_step;
      s = s * c_step + c * s_step;
      c = c_next;
      if ((i & 1023u) == 1023u) {
        const double t = static_cast<double>(i + 1);
        c = std::cos(phi * t);
        s = std::sin(phi * t);
      }
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k)) = c;
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k + 1)) = s;
    }
  }
  const Eigen::Map<const Eigen::VectorXd> y(values.data(),
                                            static_cast<Eigen::Index>(t_len));
  Eigen::VectorXd ab =
      (design.transpose() * design).ldlt().solve(design.transpose() * y);
  for (std::size_t k = 0; k < n; ++k) {
    harmonics[k].a = ab(static_cast<Eigen::Index>(2 * k));
    harmonics[k].b = ab(static_cast<Eigen::Index>(2 * k + 1));
  }
}

/// Restores ordering and pairwise separation of the frequencies (in place),
/// keeping them inside [lower, upper].
inline void enforce_separation(std::vector<double>& phis, double lower,
                               double upper, double min_sep) {
  const std::size_t n = phis.size();
  std::sort(phis.begin(), phis.end());
  for (std::size_t k = 0; k < n; ++k) {
    const double floor_k = lower + static_cast<double>(k) * min_sep;
    if (phis[k] < floor_k) phis[k] = floor_k;
    if (k > 0 && phis[k] < phis[k - 1] + min_sep) phis[k] = phis[k - 1] + min_sep;
  }
  for (std::size_t k = n; k-- > 0;) {
    const double cap_k = upper - static_cast<double>(n - 1 - k) * min_sep;
    if (phis[k] > cap_k) phis[k] = cap_k;
    if (k + 1 < n && phis[k] > phis[k + 1] - min_sep) phis[k] = phis[k + 1] - min_sep;
  }
}

}  // namespace detail

/// Initial estimate from the periodogram: the n largest Fourier-bin values
/// inside the Walker band with pairwise separation at least min_separation,
/// each refined by golden-section search between neighboring bins, with
/// amplitudes from the exact linear least-squares fit at those frequencies.
inline TrigParams periodogram_init(const SamplePath& x, std::size_t n_harmonics,
                                   const WalkerSet& walker) {
  require_nonempty(x, "periodogram_init");
  if (x.values.size() < kMinHorizonForEstimation)
    throw size_error("periodogram_init: horizon must be >= 16");
  if (n_harmonics == 0)
    throw config_error("periodogram_init: need at least one harmonic");
  const std::size_t t_len = x.values.size();
  if (walker.upper - walker.lower <
      static_cast<double>(n_harmonics - 1) * walker.min_separation)
    throw init_error("periodogram_init: band too narrow for harmonic count");

  // Fourier-bin periodogram via one FFT; x is real so bins j and T-j mirror.
  std::vector<std::complex<double>> spectrum(t_len);
  for (std::size_t i = 0; i < t_len; ++i) spectrum[i] = x.values[i];
  fft_inplace(spectrum, -1);

  const double bin_width = 2.0 * std::numbers::pi_v<double> /
                           static_cast<double>(t_len);
  std::vector<std::pair<double, std::size_t>> candidates;  // (power, bin)
  for (std::size_t j = 1; 2 * j < t_len; ++j) {
    const double w = bin_width * static_cast<double>(j);
    if (w < walker.lower || w > walker.upper) continue;
    candidates.emplace_back(std::norm(spectrum[j]), j);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& lhs, const auto& rhs) {
              return lhs.first != rhs.first ? lhs.first > rhs.first
                                            : lhs.second < rhs.second;
            });

  std::vector<double> phis;
  for (const auto& [power, j] : candidates) {
    if (phis.size() == n_harmonics) break;
    const double w = bin_width * static_cast<double>(j);
    bool admissible = true;
    for (double chosen : phis)
      if (std::fabs(w - chosen) < walker.min_separation) admissible = false;
    if (admissible) phis.push_back(w);
  }
  if (phis.size() < n_harmonics)
    throw init_error("periodogram_init: fewer admissible periodogram peaks "
                     "than requested harmonics");

  for (double& phi : phis) {
    const double lo = std::max(walker.lower, phi - bin_width);
    const double hi = std::min(walker.upper, phi + bin_width);
    phi = detail::golden_max(x.values, lo, hi);
  }
  detail::enforce_separation(phis, walker.lower, walker.upper,
                             walker.min_separation);

  TrigParams theta;
  theta.phi_lower = walker.lower;
  theta.phi_upper = walker.upper;
  theta.harmonics.resize(n_harmonics);
  for (std::size_t k = 0; k < n_harmonics; ++k) theta.harmonics[k].phi = phis[k];
  detail::linear_amplitudes(x.values, theta.harmonics);
  return theta;
}

struct LseOptions {
  LmOptions lm;            // max_iter 200, grad_tol 1e-10, step_tol 1e-12
  bool profiled = false;   // optimize phi only, amplitudes by linear solve
};

struct LseResult {
  TrigParams theta;
  LmDiagnostics diagnostics;
  double objective = 0.0;  // Q_T at the estimate
};

namespace detail {

/// Residuals r_t = (x(t) - g(t, theta)) / sqrt(T) and the Jacobian in the
/// stacked parameterization p = (A_1, B_1, phi_1, A_2, ...): r'r = Q_T.
inline void lse_residuals(const std::vector<double>& values,
                          const Eigen::VectorXd& p, Eigen::VectorXd& r,
                          Eigen::MatrixXd* jac) {
  const std::size_t t_len = values.size();
  const std::size_t n = static_cast<std::size_t>(p.size()) / 3;
  const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(t_len));
  for (std::size_t i = 0; i < t_len; ++i)
    r(static_cast<Eigen::Index>(i)) = values[i] * inv_sqrt_t;

  for (std::size_t k = 0; k < n; ++k) {
    const double a = p(static_cast<Eigen::Index>(3 * k));
    const double b = p(static_cast<Eigen::Index>(3 * k + 1));
    const double phi = p(static_cast<Eigen::Index>(3 * k + 2));
    const double c_step = std::cos(phi);
    const double s_step = std::sin(phi);
    double c = 1.0, s = 0.0;
    for (std::size_t i = 0; i < t_len; ++i) {
      const double c_next = c * c_step - s * s_step;
      s = s * c_step + c * s_step;
      c = c_next;
      if ((i & 255u) == 255u) {
        const double t = static_cast<double>(i + 1);
        c = std::cos(phi * t);
        s = std::sin(phi * t);
      }
      const auto row = static_cast<Eigen::Index>(i);
      r(row) -= (a * c + b * s) * inv_sqrt_t;
      if (jac != nullptr) {
        const double t = static_cast<double>(i + 1);
        (*jac)(row, static_cast<Eigen::Index>(3 * k)) = -c * inv_sqrt_t;
        (*jac)(row, static_cast<Eigen::Index>(3 * k + 1)) = -s * inv_sqrt_t;
        (*jac)(row, static_cast<Eigen::Index>(3 * k + 2)) =
            -t * (-a * s + b * c) * inv_sqrt_t;
      }
    }
  }
}

}  // namespace detail

/// Nonlinear least squares from the periodogram start, frequencies boxed to
/// [walker.lower, walker.upper] with pairwise separation enforced by
/// projection. Joint (A, B, phi) optimization by default; profiled mode
/// iterates on phi alone with amplitudes re-solved linearly each evaluation.
inline LseResult walker_lse(const SamplePath& x, std::size_t n_harmonics,
                            const WalkerSet& walker,
                            const LseOptions& opt = {}) {
  TrigParams init = periodogram_init(x, n_harmonics, walker);
  const std::size_t n = n_harmonics;
  const auto t_len = static_cast<Eigen::Index>(x.values.size());
  const double inf = std::numeric_limits<double>::infinity();

  LmResult lm;
  if (!opt.profiled) {
    Eigen::VectorXd p(3 * n);
    LmBox box;
    box.lower = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(3 * n), -inf);
    box.upper = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(3 * n), inf);
    for (std::size_t k = 0; k < n; ++k) {
      p(static_cast<Eigen::Index>(3 * k)) = init.harmonics[k].a;
      p(static_cast<Eigen::Index>(3 * k + 1)) = init.harmonics[k].b;
      p(static_cast<Eigen::Index>(3 * k + 2)) = init.harmonics[k].phi;
      box.lower(static_cast<Eigen::Index>(3 * k + 2)) = walker.lower;
      box.upper(static_cast<Eigen::Index>(3 * k + 2)) = walker.upper;
    }
    const auto project = [&](Eigen::VectorXd& q) {
      std::vector<double> phis(n);
      for (std::size_t k = 0; k < n; ++k)
        phis[k] = q(static_cast<Eigen::Index>(3 * k + 2));
      detail::enforce_separation(phis, walker.lower, walker.upper,
                                 walker.min_separation);
      for (std::size_t k = 0; k < n; ++k)
        q(static_cast<Eigen::Index>(3 * k + 2)) = phis[k];
    };
    const auto fn = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                        Eigen::MatrixXd* jac) {
      detail::lse_residuals(x.values, q, r, jac);
    };
    lm = lm_minimize(fn, p, t_len, box, opt.lm, project);
  } else {
    Eigen::VectorXd p(n);
    LmBox box;
    box.lower = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), walker.lower);
    box.upper = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), walker.upper);
    for (std::size_t k = 0; k < n; ++k)
      p(static_cast<Eigen::Index>(k)) = init.harmonics[k].phi;
    const auto project = [&](Eigen::VectorXd& q) {
      std::vector<double> phis(q.data(), q.data() + q.size());
      detail::enforce_separation(phis, walker.lower, walker.upper,
                                 walker.min_separation);
      for (std::size_t k = 0; k < n; ++k)
        q(static_cast<Eigen::Index>(k)) = phis[k];
    };
    const auto fn = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                        Eigen::MatrixXd* jac) {
      std::vector<Harmonic> hs(n);
      for (std::size_t k = 0; k < n; ++k)
        hs[k].phi = q(static_cast<Eigen::Index>(k));
      detail::linear_amplitudes(x.values, hs);
      Eigen::VectorXd full(3 * n);
      for (std::size_t k = 0; k < n; ++k) {
        full(static_cast<Eigen::Index>(3 * k)) = hs[k].a;
        full(static_cast<Eigen::Index>(3 * k + 1)) = hs[k].b;
        full(static_cast<Eigen::Index>(3 * k + 2)) = hs[k].phi;
      }
      if (jac == nullptr) {
        detail::lse_residuals(x.values, full, r, nullptr);
        return;
      }
      Eigen::MatrixXd full_jac(r.size(), static_cast<Eigen::Index>(3 * n));
      detail::lse_residuals(x.values, full, r, &full_jac);
      for (std::size_t k = 0; k < n; ++k)
        jac->col(static_cast<Eigen::Index>(k)) =
            full_jac.col(static_cast<Eigen::Index>(3 * k + 2));
    };
    lm = lm_minimize(fn, p, t_len, box, opt.lm, project);
  }

  LseResult result;
  result.theta.phi_lower = walker.lower;
  result.theta.phi_upper = walker.upper;
  result.theta.harmonics.resize(n);
  if (!opt.profiled) {
    for (std::size_t k = 0; k < n; ++k) {
      result.theta.harmonics[k].a = lm.x(static_cast<Eigen::Index>(3 * k));
      result.theta.harmonics[k].b = lm.x(static_cast<Eigen::Index>(3 * k + 1));
      result.theta.harmonics[k].phi = lm.x(static_cast<Eigen::Index>(3 * k + 2));
    }
  } else {
    for (std::size_t k = 0; k < n; ++k)
      result.theta.harmonics[k].phi = lm.x(static_cast<Eigen::Index>(k));
    detail::linear_amplitudes(x.values, result.theta.harmonics);
  }
  // A projected solution can sit exactly on the band boundary; keep the
  // stored frequencies strictly interior so the parameter invariants hold.
  for (auto& h : result.theta.harmonics) {
    if (h.phi <= walker.lower)
      h.phi = std::nextafter(walker.lower, walker.upper);
    if (h.phi >= walker.upper)
      h.phi = std::nextafter(walker.upper, walker.lower);
  }
  result.diagnostics = lm.diagnostics;
  result.objective = lm.diagnostics.objective;
  return result;
}

}  // namespace hpl
