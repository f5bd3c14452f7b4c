#pragma once

// Multivariate normality battery: squared Mahalanobis distances with
// chi-square Q-Q export, the Henze-Zirkler smooth test with its lognormal
// p-value approximation, the Doornik-Hansen omnibus test, Mardia's skewness
// and kurtosis statistics, and constant-probability contour ellipsoids.
// Sample covariance uses the n-1 denominator throughout.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hpl/errors.hpp"
#include "hpl/stats.hpp"

namespace hpl {

enum class MvnTest { kHenzeZirkler, kDoornikHansen, kMardiaSkew, kMardiaKurt };

struct MvnTestResult {
  MvnTest test = MvnTest::kHenzeZirkler;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t d = 0;
};

namespace detail {

/// Rows centered and whitened by the Cholesky factor of the sample
/// covariance (n-1 denominator): row norms are Mahalanobis distances.
inline Eigen::MatrixXd whiten_rows(const Eigen::MatrixXd& sample,
                                   const char* where) {
  const Eigen::Index n = sample.rows();
  const Eigen::Index d = sample.cols();
  if (n <= d)
    throw size_error(std::string(where) + ": need more rows than columns");
  const Eigen::RowVectorXd mean = sample.colwise().mean();
  const Eigen::MatrixXd centered = sample.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw rank_error(std::string(where) + ": singular sample covariance");
  return llt.matrixL().solve(centered.transpose()).transpose();
}

}  // namespace detail

/// d_i^2 = (x_i - mean)' S^{-1} (x_i - mean) for every row. The values sum
/// to (n-1) d exactly.
inline std::vector<double> mahalanobis_squared(const Eigen::MatrixXd& sample) {
  const Eigen::MatrixXd white = detail::whiten_rows(sample, "mahalanobis");
  std::vector<double> d2(static_cast<std::size_t>(white.rows()));
  for (Eigen::Index i = 0; i < white.rows(); ++i)
    d2[static_cast<std::size_t>(i)] = white.row(i).squaredNorm();
  return d2;
}

/// Ordered pairs (chi-square_d quantile at (i - 0.5)/n, i-th order statistic
/// of the distances), ready for Q-Q plotting.
inline std::vector<std::pair<double, double>> chi_square_qq(
    std::vector<double> distances, std::size_t d) {
  if (d == 0) throw config_error("chi_square_qq: dimension must be >= 1");
  std::sort(distances.begin(), distances.end());
  const std::size_t n = distances.size();
  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    pairs[i] = {chi2_quantile(p, static_cast<double>(d)), distances[i]};
  }
  return pairs;
}

/// Henze-Zirkler statistic with the standard smoothing parameter
/// beta = 2^{-1/2} ((2d+1) n / 4)^{1/(d+4)} and the lognormal p-value
/// approximation fitted to the statistic's asymptotic mean and variance.
inline MvnTestResult henze_zirkler(const Eigen::MatrixXd& sample) {
  const Eigen::MatrixXd white = detail::whiten_rows(sample, "henze_zirkler");
  const auto n = white.rows();
  const auto d = white.cols();
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);

  const double beta =
      std::pow((2.0 * dd + 1.0) * nd / 4.0, 1.0 / (dd + 4.0)) /
      std::numbers::sqrt2_v<double>;
  const double b2 = beta * beta;

  // (1/n^2) sum_ij exp(-b2 D_ij / 2), D_ij the pairwise squared Mahalanobis
  // distances (diagonal included: exp(0) = n terms).
  double pair_sum = nd;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      pair_sum += 2.0 * std::exp(-0.5 * b2 * (white.row(i) - white.row(j)).squaredNorm());

  double self_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    self_sum += std::exp(-0.5 * b2 * white.row(i).squaredNorm() / (1.0 + b2));

  const double statistic =
      nd * (pair_sum / (nd * nd) -
            2.0 * std::pow(1.0 + b2, -0.5 * dd) * self_sum / nd +
            std::pow(1.0 + 2.0 * b2, -0.5 * dd));

  // Lognormal approximation: first two moments of the limiting law.
  const double a = 1.0 + 2.0 * b2;
  const double w = (1.0 + b2) * (1.0 + 3.0 * b2);
  const double mean =
      1.0 - std::pow(a, -0.5 * dd) *
                (1.0 + dd * b2 / a + dd * (dd + 2.0) * b2 * b2 / (2.0 * a * a));
  const double b4 = b2 * b2;
  const double b8 = b4 * b4;
  const double variance =
      2.0 * std::pow(1.0 + 4.0 * b2, -0.5 * dd) +
      2.0 * std::pow(a, -dd) *
          (1.0 + 2.0 * dd * b4 / (a * a) +
           3.0 * dd * (dd + 2.0) * b8 / (4.0 * std::pow(a, 4))) -
      4.0 * std::pow(w, -0.5 * dd) *
          (1.0 + 3.0 * dd * b4 / (2.0 * w) + dd * (dd + 2.0) * b8 / (2.0 * w * w));

  const double log_mu =
      std::log(std::sqrt(std::pow(mean, 4) / (variance + mean * mean)));
  const double log_sigma =
      std::sqrt(std::log((variance + mean * mean) / (mean * mean)));

  MvnTestResult result;
  result.test = MvnTest::kHenzeZirkler;
  result.statistic = statistic;
  result.n = static_cast<std::size_t>(n);
  result.d = static_cast<std::size_t>(d);
  result.p_value =
      statistic > 0.0
          ? 1.0 - normal_cdf((std::log(statistic) - log_mu) / log_sigma)
          : 1.0;
  return result;
}

/// Doornik-Hansen omnibus: standardize columns (1/n moments), decorrelate
/// through the eigendecomposition of the correlation matrix, then combine
/// the D'Agostino-transformed skewness and the gamma-transformed kurtosis of
/// every transformed coordinate into E = sum z1^2 + sum z2^2 ~ chi-square(2d).
inline MvnTestResult doornik_hansen(const Eigen::MatrixXd& sample) {
  const Eigen::Index n = sample.rows();
  const Eigen::Index d = sample.cols();
  if (n < 8) throw size_error("doornik_hansen: need at least 8 rows");
  if (n <= d) throw size_error("doornik_hansen: need more rows than columns");
  const double nd = static_cast<double>(n);

  const Eigen::RowVectorXd mean = sample.colwise().mean();
  Eigen::MatrixXd std_cols = sample.rowwise() - mean;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sd = std::sqrt(std_cols.col(j).squaredNorm() / nd);
    if (!(sd > 0.0)) throw rank_error("doornik_hansen: constant column");
    std_cols.col(j) /= sd;
  }
  const Eigen::MatrixXd corr = std_cols.transpose() * std_cols / nd;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(corr);
  if (eigen.info() != Eigen::Success || eigen.eigenvalues().minCoeff() < 1e-12)
    throw rank_error("doornik_hansen: singular correlation matrix");
  const Eigen::MatrixXd transformed =
      std_cols * eigen.eigenvectors() *
      eigen.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      eigen.eigenvectors().transpose();

  double stat = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& col = transformed.col(j);
    const double m1 = col.mean();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = col(i) - m1;
      const double v2 = v * v;
      m2 += v2;
      m3 += v2 * v;
      m4 += v2 * v2;
    }
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    const double rtb1 = m3 / (m2 * std::sqrt(m2));
    const double b2 = m4 / (m2 * m2);

    // Skewness: D'Agostino's normalizing transform.
    const double beta =
        3.0 * (nd * nd + 27.0 * nd - 70.0) * (nd + 1.0) * (nd + 3.0) /
        ((nd - 2.0) * (nd + 5.0) * (nd + 7.0) * (nd + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta - 1.0));
    const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
    const double y =
        rtb1 * std::sqrt((w2 - 1.0) * (nd + 1.0) * (nd + 3.0) /
                         (12.0 * (nd - 2.0)));
    const double z1 = delta * std::asinh(y);

    // Kurtosis: gamma approximation via a Wilson-Hilferty cube root.
    const double b1 = rtb1 * rtb1;
    const double denom = 6.0 * (nd - 3.0) * (nd + 1.0) *
                         (nd * nd + 15.0 * nd - 4.0);
    const double a_coef = (nd - 2.0) * (nd + 5.0) * (nd + 7.0) *
                          (nd * nd + 27.0 * nd - 70.0) / denom;
    const double c_coef = (nd - 7.0) * (nd + 5.0) * (nd + 7.0) *
                          (nd * nd + 2.0 * nd - 5.0) / denom;
    const double k_coef = (nd + 5.0) * (nd + 7.0) *
                          (nd * nd * nd + 37.0 * nd * nd + 11.0 * nd - 313.0) /
                          (2.0 * denom);
    const double alpha = a_coef + b1 * c_coef;
    const double chi = 2.0 * k_coef * (b2 - 1.0 - b1);
    const double z2 =
        std::sqrt(9.0 * alpha) *
        (std::cbrt(chi / (2.0 * alpha)) - 1.0 + 1.0 / (9.0 * alpha));

    stat += z1 * z1 + z2 * z2;
  }

  MvnTestResult result;
  result.test = MvnTest::kDoornikHansen;
  result.statistic = stat;
  result.n = static_cast<std::size_t>(n);
  result.d = static_cast<std::size_t>(d);
  result.p_value = 1.0 - chi2_cdf(stat, 2.0 * static_cast<double>(d));
  return result;
}

/// Mardia's multivariate skewness and kurtosis: b1 = n^{-2} sum_ij m_ij^3
/// referred to chi-square with d(d+1)(d+2)/6 df via n b1 / 6, and
/// b2 = n^{-1} sum_i m_ii^2, asymptotically normal with mean d(d+2) and
/// variance 8 d (d+2) / n (two-sided).
inline std::pair<MvnTestResult, MvnTestResult> mardia_stats(
    const Eigen::MatrixXd& sample) {
  const Eigen::MatrixXd white = detail::whiten_rows(sample, "mardia");
  const Eigen::Index n = white.rows();
  const auto d = static_cast<double>(white.cols());
  const double nd = static_cast<double>(n);

  const Eigen::MatrixXd gram = white * white.transpose();
  double b1 = 0.0;
  double b2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mii = gram(i, i);
    b2 += mii * mii;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double m = gram(i, j);
      b1 += m * m * m;
    }
  }
  b1 /= nd * nd;
  b2 /= nd;

  MvnTestResult skew;
  skew.test = MvnTest::kMardiaSkew;
  skew.statistic = nd * b1 / 6.0;
  skew.n = static_cast<std::size_t>(n);
  skew.d = static_cast<std::size_t>(d);
  const double skew_df = d * (d + 1.0) * (d + 2.0) / 6.0;
  skew.p_value = 1.0 - chi2_cdf(skew.statistic, skew_df);

  MvnTestResult kurt;
  kurt.test = MvnTest::kMardiaKurt;
  const double z = (b2 - d * (d + 2.0)) / std::sqrt(8.0 * d * (d + 2.0) / nd);
  kurt.statistic = z;
  kurt.n = static_cast<std::size_t>(n);
  kurt.d = static_cast<std::size_t>(d);
  kurt.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
  return {skew, kurt};
}

/// Constant-probability contour ellipsoid {x : (x - mu)' S^{-1} (x - mu) <= c^2}:
/// principal directions e_i with half-lengths c sqrt(lambda_i).
struct ContourEllipsoid {
  Eigen::VectorXd mean;
  Eigen::MatrixXd directions;    // columns are unit eigenvectors
  Eigen::VectorXd half_lengths;  // c * sqrt(eigenvalue), matching columns
  double c = 0.0;

  bool contains(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd centered = directions.transpose() * (x - mean);
    double q = 0.0;
    for (Eigen::Index i = 0; i < centered.size(); ++i) {
      const double axis = half_lengths(i) / c;
      q += (centered(i) / axis) * (centered(i) / axis);
    }
    return q <= c * c;
  }
};

inline ContourEllipsoid contour_ellipsoid(const Eigen::VectorXd& mean,
                                          const Eigen::MatrixXd& cov,
                                          double c) {
  if (!(c > 0.0)) throw config_error("contour_ellipsoid: c must be > 0");
  if (cov.rows() != cov.cols() || cov.rows() != mean.size())
    throw config_error("contour_ellipsoid: dimension mismatch");
  if (!cov.isApprox(cov.transpose(), 1e-10))
    throw config_error("contour_ellipsoid: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(cov);
  if (eigen.info() != Eigen::Success || eigen.eigenvalues().minCoeff() <= 0.0)
    throw config_error("contour_ellipsoid: covariance must be positive definite");
  ContourEllipsoid out;
  out.mean = mean;
  out.directions = eigen.eigenvectors();
  out.half_lengths = c * eigen.eigenvalues().cwiseSqrt();
  out.c = c;
  return out;
}

}  // namespace hpl
