#pragma once

// Thin wrapper over FFTW complex transforms. Plan creation is serialized
// behind a mutex (FFTW planning is not thread-safe) and plans are cached per
// (size, direction) with FFTW_UNALIGNED so that execution can run on caller
// buffers from any thread.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "hpl/errors.hpp"

namespace hpl {

namespace detail {

inline fftw_plan fft_plan_for(std::size_t n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& plan = cache[{n, sign}];
  if (plan == nullptr) {
    std::vector<std::complex<double>> probe(n);
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr)
      throw numerical_error("fft: plan creation failed");
  }
  return plan;
}

}  // namespace detail

/// In-place complex DFT, unnormalized, sign -1 (forward) or +1 (inverse).
inline void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) throw config_error("fft: empty input");
  fftw_plan plan = detail::fft_plan_for(data.size(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace hpl
