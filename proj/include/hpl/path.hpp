#pragma once

// Sample paths indexed t = 1..T, tagged with the provenance needed to
// reproduce them: the seed, the generation method, and a fingerprint of the
// generating noise model (0 for externally supplied data).

#include <cstdint>
#include <string>
#include <vector>

#include "hpl/errors.hpp"

namespace hpl {

enum class GenMethod : std::uint8_t {
  kCholesky = 0,
  kCirculant = 1,
  kExternal = 2,
};

struct SamplePath {
  std::vector<double> values;  // values[i] is the sample at t = i + 1
  std::uint64_t seed = 0;
  GenMethod method = GenMethod::kExternal;
  std::uint64_t model_fingerprint = 0;
  double nugget = 0.0;        // diagonal regularization applied, if any
  double clipped_mass = 0.0;  // relative spectral mass clipped, if any

  std::size_t size() const { return values.size(); }
};

inline void require_nonempty(const SamplePath& path, const char* where) {
  if (path.values.empty())
    throw config_error(std::string(where) + ": empty sample path");
}

}  // namespace hpl
