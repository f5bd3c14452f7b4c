#pragma once

// Levenberg-Marquardt for box-constrained nonlinear least squares:
// damped Gauss-Newton steps (J'J + lambda diag(J'J)) delta = -J'r with the
// classic multiply-by-10 / divide-by-10 damping schedule, feasibility kept
// by projection after each trial step.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "hpl/errors.hpp"

namespace hpl {

struct LmOptions {
  int max_iter = 200;
  double grad_tol = 1e-10;
  double step_tol = 1e-12;
  double lambda0 = 1e-3;
};

enum class LmStop { kGradient, kStep, kMaxIter };

struct LmDiagnostics {
  int iterations = 0;
  double grad_norm = 0.0;
  double objective = 0.0;  // sum of squared residuals at the solution
  LmStop reason = LmStop::kMaxIter;
  bool converged = false;
};

struct LmResult {
  Eigen::VectorXd x;
  LmDiagnostics diagnostics;
};

/// Residual evaluator: fill r (preallocated to the residual count); when
/// jac is non-null, fill it as the m x n Jacobian dr/dx.
using LmResidualFn =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r,
                       Eigen::MatrixXd* jac)>;

/// Extra feasibility restoration applied after the box clamp (e.g. ordering
/// constraints). May be empty.
using LmProjectFn = std::function<void(Eigen::VectorXd& x)>;

/// Axis-aligned bounds; empty vectors mean unbounded.
struct LmBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void clamp(Eigen::VectorXd& x) const {
    if (lower.size() == x.size()) x = x.cwiseMax(lower);
    if (upper.size() == x.size()) x = x.cwiseMin(upper);
  }
};

inline LmResult lm_minimize(const LmResidualFn& fn, Eigen::VectorXd x0,
                            Eigen::Index n_residuals, const LmBox& box = {},
                            const LmOptions& opt = {},
                            const LmProjectFn& project = {}) {
  const Eigen::Index n = x0.size();
  if (n == 0) throw config_error("lm_minimize: empty parameter vector");

  const auto restore = [&](Eigen::VectorXd& x) {
    box.clamp(x);
    if (project) project(x);
  };
  restore(x0);

  Eigen::VectorXd r(n_residuals);
  Eigen::MatrixXd jac(n_residuals, n);
  fn(x0, r, &jac);
  if (!r.allFinite())
    throw config_error("lm_minimize: residual not finite at initial point");

  LmResult result;
  result.x = std::move(x0);
  double sse = r.squaredNorm();
  double lambda = opt.lambda0;

  Eigen::VectorXd grad = jac.transpose() * r;
  Eigen::MatrixXd jtj = jac.transpose() * jac;

  LmDiagnostics& diag = result.diagnostics;
  diag.grad_norm = grad.lpNorm<Eigen::Infinity>();
  if (diag.grad_norm < opt.grad_tol) {
    diag.objective = sse;
    diag.reason = LmStop::kGradient;
    diag.converged = true;
    return result;
  }

  Eigen::VectorXd r_trial(n_residuals);
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    diag.iterations = iter;

    bool accepted = false;
    double step_norm = 0.0;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = jtj(i, i);
        damped(i, i) = d + lambda * (d > 1e-32 ? d : 1e-32);
      }
      Eigen::VectorXd delta = damped.ldlt().solve(-grad);
      Eigen::VectorXd x_trial = result.x + delta;
      restore(x_trial);
      step_norm = (x_trial - result.x).norm();
      if (!(step_norm > 0.0) && lambda > 1e12) break;

      fn(x_trial, r_trial, nullptr);
      const double sse_trial =
          r_trial.allFinite() ? r_trial.squaredNorm()
                              : std::numeric_limits<double>::infinity();
      if (sse_trial < sse) {
        result.x = std::move(x_trial);
        sse = sse_trial;
        lambda = std::max(lambda * 0.1, 1e-14);
        accepted = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }

    if (!accepted) {
      // No descent direction at any damping: treat as a converged step.
      diag.objective = sse;
      diag.reason = LmStop::kStep;
      diag.converged = true;
      return result;
    }

    fn(result.x, r, &jac);
    grad = jac.transpose() * r;
    jtj = jac.transpose() * jac;
    diag.grad_norm = grad.lpNorm<Eigen::Infinity>();

    if (diag.grad_norm < opt.grad_tol) {
      diag.objective = sse;
      diag.reason = LmStop::kGradient;
      diag.converged = true;
      return result;
    }
    if (step_norm < opt.step_tol) {
      diag.objective = sse;
      diag.reason = LmStop::kStep;
      diag.converged = true;
      return result;
    }
  }

  diag.objective = sse;
  diag.reason = LmStop::kMaxIter;
  diag.converged = false;
  return result;
}

}  // namespace hpl
