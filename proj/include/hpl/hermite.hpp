#pragma once

// Probabilists' Hermite polynomials H_k, subordination transforms
//
//   G(u) = sum_k (C_k / k!) H_k(u),  C_k = E[G(Z) H_k(Z)],  Z ~ N(0,1),
//
// and the Hermite rank m = min{k >= 1 : C_k != 0}. Four centered polynomial
// transforms of rank 1..4 are built in with closed forms; arbitrary centered
// square-integrable transforms go through Gauss-Hermite projection.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hpl/errors.hpp"
#include "hpl/path.hpp"
#include "hpl/rng.hpp"

namespace hpl {

/// H_k(x) by the three-term recurrence H_{k+1} = x H_k - k H_{k-1}.
inline double hermite_eval(int k, double x) {
  if (k < 0) throw config_error("hermite_eval: order must be >= 0");
  double prev = 1.0;  // H_0
  if (k == 0) return prev;
  double cur = x;  // H_1
  for (int i = 1; i < k; ++i) {
    const double next = x * cur - i * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

enum class TransformKind { kH1, kH2, kH3, kH4, kGeneral };

inline constexpr double kRankTolerance = 1e-8;
inline constexpr int kDefaultCoeffCap = 16;

struct TransformSpec {
  TransformKind kind = TransformKind::kH1;
  std::vector<double> coefficients;  // coefficients[k-1] = C_k, k = 1..K
  std::size_t rank = 1;              // m

  /// E[G(Z)^2] = sum_k C_k^2 / k!.
  double variance() const {
    double sum = 0.0;
    double factorial = 1.0;
    for (std::size_t k = 1; k <= coefficients.size(); ++k) {
      factorial *= static_cast<double>(k);
      sum += coefficients[k - 1] * coefficients[k - 1] / factorial;
    }
    return sum;
  }
};

/// The built-in rank-m transform: G = H_m for m in 1..4.
inline TransformSpec builtin_transform(int m) {
  if (m < 1 || m > 4)
    throw config_error("builtin_transform: rank must be in 1..4");
  TransformSpec spec;
  spec.kind = static_cast<TransformKind>(m - 1);
  spec.rank = static_cast<std::size_t>(m);
  spec.coefficients.assign(static_cast<std::size_t>(m), 0.0);
  double factorial = 1.0;
  for (int k = 2; k <= m; ++k) factorial *= k;
  spec.coefficients.back() = factorial;  // C_m = m!
  return spec;
}

/// G(u). Built-in kinds use closed forms; general specs sum the expansion.
inline double transform_apply(const TransformSpec& spec, double u) {
  switch (spec.kind) {
    case TransformKind::kH1:
      return u;
    case TransformKind::kH2:
      return u * u - 1.0;
    case TransformKind::kH3:
      return u * (u * u - 3.0);
    case TransformKind::kH4: {
      const double u2 = u * u;
      return u2 * (u2 - 6.0) + 3.0;
    }
    case TransformKind::kGeneral: {
      double value = 0.0;
      double prev = 1.0;
      double cur = u;
      double factorial = 1.0;
      for (std::size_t k = 1; k <= spec.coefficients.size(); ++k) {
        factorial *= static_cast<double>(k);
        value += spec.coefficients[k - 1] / factorial * cur;
        const double next = u * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
      }
      return value;
    }
  }
  throw config_error("transform_apply: unknown transform kind");
}

/// Pointwise subordination eps(t) = G(xi(t)). Preserves path provenance.
inline SamplePath transform_path(const TransformSpec& spec,
                                 const SamplePath& xi) {
  require_nonempty(xi, "transform_path");
  SamplePath out = xi;
  for (double& v : out.values) v = transform_apply(spec, v);
  return out;
}

namespace detail {

/// Gauss-Hermite nodes/weights for weight e^{-x^2} via the Golub-Welsch
/// eigenvalue method on the Jacobi matrix.
inline void gauss_hermite(int n, std::vector<double>& nodes,
                          std::vector<double>& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = std::sqrt(0.5 * i);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw factorization_error("gauss_hermite: eigen decomposition failed");
  const double mu0 = std::sqrt(std::numbers::pi_v<double>);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

}  // namespace detail

/// Projects a centered transform g onto the Hermite basis: C_k = E[g(Z)H_k(Z)]
/// by Gauss-Hermite quadrature. Coefficients with |C_k| <= rank tolerance are
/// stored as exact zeros. Throws not_centered_error when |C_0| exceeds the
/// tolerance and degenerate_error when every C_k (k >= 1) vanishes.
inline TransformSpec hermite_coefficients(
    const std::function<double(double)>& g, int k_max = kDefaultCoeffCap,
    int quad_order = 64) {
  if (k_max < 1) throw config_error("hermite_coefficients: k_max must be >= 1");
  if (quad_order < k_max + 1)
    throw config_error("hermite_coefficients: quad_order must be > k_max");

  std::vector<double> nodes, weights;
  detail::gauss_hermite(quad_order, nodes, weights);

  // E[g(Z) H_k(Z)] = (1/sqrt(pi)) sum_i w_i g(sqrt(2) x_i) H_k(sqrt(2) x_i).
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi_v<double>);
  std::vector<double> raw(static_cast<std::size_t>(k_max) + 1, 0.0);
  std::vector<double> h(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int i = 0; i < quad_order; ++i) {
    const double u = std::numbers::sqrt2_v<double> * nodes[i];
    const double gu = g(u);
    h[0] = 1.0;
    if (k_max >= 1) h[1] = u;
    for (int k = 1; k < k_max; ++k) h[k + 1] = u * h[k] - k * h[k - 1];
    for (int k = 0; k <= k_max; ++k) raw[k] += weights[i] * gu * h[k];
  }
  for (double& c : raw) c *= inv_sqrt_pi;

  if (std::fabs(raw[0]) >= kRankTolerance)
    throw not_centered_error(
        "hermite_coefficients: transform is not mean-zero (C_0 = " +
        std::to_string(raw[0]) + ")");

  TransformSpec spec;
  spec.kind = TransformKind::kGeneral;
  spec.coefficients.assign(raw.begin() + 1, raw.end());
  std::size_t rank = 0;
  for (std::size_t k = 1; k <= spec.coefficients.size(); ++k) {
    if (std::fabs(spec.coefficients[k - 1]) <= kRankTolerance) {
      spec.coefficients[k - 1] = 0.0;
    } else if (rank == 0) {
      rank = k;
    }
  }
  if (rank == 0)
    throw degenerate_error(
        "hermite_coefficients: all coefficients below tolerance");
  spec.rank = rank;
  return spec;
}

/// Stable content hash of a transform, used in seeding and cache keys.
inline std::uint64_t fingerprint(const TransformSpec& spec) {
  std::uint64_t h = 0x6865726du;  // arbitrary domain separator
  h = hash_combine(h, static_cast<std::uint64_t>(spec.kind));
  h = hash_combine(h, spec.rank);
  h = hash_combine(h, spec.coefficients.size());
  for (double c : spec.coefficients) h = hash_combine(h, double_bits(c));
  return h;
}

}  // namespace hpl
