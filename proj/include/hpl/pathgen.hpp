#pragma once

// Stationary Gaussian path generation with a prescribed covariance model,
// by dense Cholesky factorization (exact, O(T^3) setup, capped horizon) or
// by circulant embedding (exact when the embedding is nonnegative definite,
// O(M log M) per path, any horizon), plus the full observation synthesizer
// x(t) = g(t, theta) + G(xi(t)).
//
// Normal draws come from a counter-based stream indexed by position, so a
// path is a pure function of (seed, model, T, method) regardless of thread
// scheduling.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hpl/covariance.hpp"
#include "hpl/errors.hpp"
#include "hpl/fft.hpp"
#include "hpl/hermite.hpp"
#include "hpl/path.hpp"
#include "hpl/rng.hpp"
#include "hpl/trig.hpp"

namespace hpl {

enum class PathRoute { kAuto, kCholesky, kCirculant };

struct PathGenOptions {
  PathRoute route = PathRoute::kAuto;
  std::size_t cholesky_max = 8192;  // largest horizon for dense factorization
  double nugget = 0.0;              // optional diagonal regularization
  int padding_factor = 2;           // initial circulant embedding oversize
  double clip_tolerance = 1e-8;     // relative clip threshold for eigenvalues
};

/// Dense lower-triangular factor of the Toeplitz covariance at lags
/// 0..T-1. Build once, sample many; prefix sampling reuses the leading
/// block, so paths of different horizons under the same seed share their
/// initial segments (nested common random numbers).
class CholeskyFactor {
 public:
  CholeskyFactor(const NoiseModel& model, std::size_t t, double nugget = 0.0)
      : t_(t), model_fp_(fingerprint(model)) {
    validate(model);
    if (t == 0) throw size_error("cholesky: horizon must be >= 1");
    factor_.resize(t, t);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        factor_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            covariance_at(model, static_cast<double>(i - j));

    nugget_ = nugget;
    for (int attempt = 0; attempt < 2; ++attempt) {
      Eigen::MatrixXd work =
          factor_.selfadjointView<Eigen::Lower>();
      if (nugget_ > 0.0)
        work.diagonal().array() += nugget_;
      Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
      if (llt.info() == Eigen::Success) {
        factor_ = std::move(work);
        return;
      }
      if (nugget_ > 0.0) break;
      nugget_ = 1e-10;  // retry once with the suggested regularization
    }
    throw factorization_error(
        "cholesky: covariance factorization failed even with nugget " +
        std::to_string(nugget_) + "; consider the circulant method");
  }

  std::size_t horizon() const { return t_; }
  double nugget() const { return nugget_; }
  std::uint64_t model_fingerprint() const { return model_fp_; }

  /// Path of the full horizon.
  SamplePath sample(std::uint64_t seed) const { return sample_prefix(t_, seed); }

  /// Path of horizon t <= horizon() from the leading block of the factor.
  SamplePath sample_prefix(std::size_t t, std::uint64_t seed) const {
    if (t == 0 || t > t_)
      throw size_error("cholesky: prefix horizon out of range");
    Eigen::VectorXd eta(static_cast<Eigen::Index>(t));
    NormalStream stream(seed);
    stream.fill_normal(eta.data(), static_cast<std::size_t>(eta.size()), 0);
    Eigen::VectorXd values =
        factor_.topLeftCorner(t, t).triangularView<Eigen::Lower>() * eta;
    SamplePath path;
    path.values.assign(values.data(), values.data() + values.size());
    path.seed = seed;
    path.method = GenMethod::kCholesky;
    path.model_fingerprint = model_fp_;
    path.nugget = nugget_;
    return path;
  }

 private:
  Eigen::MatrixXd factor_;
  std::size_t t_ = 0;
  double nugget_ = 0.0;
  std::uint64_t model_fp_ = 0;
};

/// Circulant embedding of the Toeplitz covariance: the covariance sequence
/// is wrapped into a circulant of size M (a power of two at least
/// padding_factor*(T-1)), whose eigenvalues are the DFT of the wrapped
/// sequence. If some eigenvalues dip below zero the embedding is doubled up
/// to 32x; residual negative mass within tolerance is clipped and recorded.
class CirculantEmbedding {
 public:
  CirculantEmbedding(const NoiseModel& model, std::size_t t,
                     int padding_factor = 2, double clip_tolerance = 1e-8)
      : t_(t), model_fp_(fingerprint(model)) {
    validate(model);
    if (t == 0) throw size_error("circulant: horizon must be >= 1");
    if (padding_factor < 2)
      throw config_error("circulant: padding_factor must be >= 2");

    std::size_t m_initial = 1;
    const std::size_t needed =
        std::max<std::size_t>(2, static_cast<std::size_t>(padding_factor) *
                                     (t > 1 ? t - 1 : 1));
    while (m_initial < needed) m_initial *= 2;

    for (std::size_t m = m_initial; m <= 32 * m_initial; m *= 2) {
      if (try_embed(model, m, clip_tolerance)) return;
    }
    throw approximation_error(
        "circulant: embedding stays indefinite after maximal padding "
        "(relative negative mass " +
        std::to_string(deficit_) + ")");
  }

  std::size_t horizon() const { return t_; }
  std::size_t embed_size() const { return eigenvalues_.size(); }
  double clipped_mass() const { return clipped_mass_; }
  std::uint64_t model_fingerprint() const { return model_fp_; }

  SamplePath sample(std::uint64_t seed) const {
    SamplePath path;
    path.seed = seed;
    path.method = GenMethod::kCirculant;
    path.model_fingerprint = model_fp_;
    path.clipped_mass = clipped_mass_;
    NormalStream stream(seed);
    if (t_ == 1) {
      path.values.assign(1, stream.normal(0));
      return path;
    }
    const std::size_t m = eigenvalues_.size();
    std::vector<std::complex<double>> spectrum(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double scale = std::sqrt(eigenvalues_[k]);
      spectrum[k] = {scale * stream.normal(2 * k),
                     scale * stream.normal(2 * k + 1)};
    }
    fft_inplace(spectrum, -1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    path.values.resize(t_);
    for (std::size_t i = 0; i < t_; ++i)
      path.values[i] = spectrum[i].real() * norm;
    return path;
  }

 private:
  bool try_embed(const NoiseModel& model, std::size_t m, double clip_tolerance) {
    // Wrapped covariance row: B(0), B(1), ..., B(m/2), B(m/2 - 1), ..., B(1).
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= m / 2; ++k)
      row[k] = covariance_at(model, static_cast<double>(k));
    for (std::size_t k = m / 2 + 1; k < m; ++k) row[k] = row[m - k];
    fft_inplace(row, -1);

    double max_eig = 0.0;
    double negative_mass = 0.0;
    double total_mass = 0.0;
    for (const auto& v : row) {
      const double eig = v.real();
      max_eig = std::max(max_eig, eig);
      total_mass += std::fabs(eig);
      if (eig < 0.0) negative_mass += -eig;
    }
    deficit_ = total_mass > 0.0 ? negative_mass / total_mass : 1.0;
    double min_allowed = -clip_tolerance * max_eig;
    for (const auto& v : row)
      if (v.real() < min_allowed) return false;

    eigenvalues_.resize(m);
    for (std::size_t k = 0; k < m; ++k)
      eigenvalues_[k] = std::max(row[k].real(), 0.0);
    clipped_mass_ = deficit_;
    return true;
  }

  std::vector<double> eigenvalues_;
  std::size_t t_ = 0;
  std::uint64_t model_fp_ = 0;
  double clipped_mass_ = 0.0;
  double deficit_ = 0.0;
};

/// One-shot Cholesky path.
inline SamplePath gaussian_path_cholesky(const NoiseModel& model, std::size_t t,
                                         std::uint64_t seed,
                                         const PathGenOptions& opt = {}) {
  if (t > opt.cholesky_max)
    throw size_error("cholesky: horizon " + std::to_string(t) +
                     " exceeds cholesky_max " + std::to_string(opt.cholesky_max));
  return CholeskyFactor(model, t, opt.nugget).sample(seed);
}

/// One-shot circulant path.
inline SamplePath gaussian_path_circulant(const NoiseModel& model, std::size_t t,
                                          std::uint64_t seed,
                                          const PathGenOptions& opt = {}) {
  return CirculantEmbedding(model, t, opt.padding_factor, opt.clip_tolerance)
      .sample(seed);
}

/// Route a generation request: explicit method if configured, otherwise
/// Cholesky up to cholesky_max and circulant embedding beyond.
inline SamplePath generate_gaussian_path(const NoiseModel& model, std::size_t t,
                                         std::uint64_t seed,
                                         const PathGenOptions& opt = {}) {
  switch (opt.route) {
    case PathRoute::kCholesky:
      return gaussian_path_cholesky(model, t, seed, opt);
    case PathRoute::kCirculant:
      return gaussian_path_circulant(model, t, seed, opt);
    case PathRoute::kAuto:
      break;
  }
  if (t <= opt.cholesky_max) return gaussian_path_cholesky(model, t, seed, opt);
  return gaussian_path_circulant(model, t, seed, opt);
}

/// Full observation x(t) = g(t, theta) + G(xi(t)), t = 1..T.
inline SamplePath synthesize_observations(const TrigParams& theta,
                                          const NoiseModel& model,
                                          const TransformSpec& transform,
                                          std::size_t t, std::uint64_t seed,
                                          const PathGenOptions& opt = {}) {
  validate(theta);
  SamplePath path = generate_gaussian_path(model, t, seed, opt);
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const double time = static_cast<double>(i + 1);
    path.values[i] = regression_value(theta, time) +
                     transform_apply(transform, path.values[i]);
  }
  return path;
}

/// As above, but reusing a prepared factor (the Monte Carlo hot path).
inline SamplePath synthesize_observations(const TrigParams& theta,
                                          const CholeskyFactor& factor,
                                          const TransformSpec& transform,
                                          std::size_t t, std::uint64_t seed) {
  validate(theta);
  SamplePath path = factor.sample_prefix(t, seed);
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const double time = static_cast<double>(i + 1);
    path.values[i] = regression_value(theta, time) +
                     transform_apply(transform, path.values[i]);
  }
  return path;
}

}  // namespace hpl
