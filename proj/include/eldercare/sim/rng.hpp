#pragma once

#include <cstdint>
#include <random>

namespace eldercare::sim {

/// Seeded generator with platform-independent derived draws (the standard
/// distributions are implementation-defined, which would break cross-platform
/// reproducibility of run digests).
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace eldercare::sim
