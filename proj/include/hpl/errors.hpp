#pragma once

#include <stdexcept>
#include <string>

namespace hpl {

/// Base class for all errors raised by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or input contract violation (CLI exit code 2).
class config_error : public error {
 public:
  using error::error;
};

/// Numerical failure during a computation (CLI exit code 3).
class numerical_error : public error {
 public:
  using error::error;
};

/// Evaluation exactly at a spectral singularity.
class singularity_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// A series or integral that does not converge for the given parameters.
class divergence_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Result magnitude exceeds double range.
class overflow_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Matrix factorization failed (after any permitted regularization).
class factorization_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// A controlled approximation exceeded its error budget.
class approximation_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Sample covariance (or similar) is numerically rank deficient.
class rank_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// An initializer could not produce a usable starting point.
class init_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Requested problem size violates a hard size guard.
class size_error : public config_error {
 public:
  using config_error::config_error;
};

/// File could not be read, parsed, or written; message names the path.
class io_error : public config_error {
 public:
  using config_error::config_error;
};

/// A transform with nonzero mean where a centered one is required.
class not_centered_error : public config_error {
 public:
  using config_error::config_error;
};

/// A transform that is numerically zero (no usable Hermite rank).
class degenerate_error : public config_error {
 public:
  using config_error::config_error;
};

}  // namespace hpl
