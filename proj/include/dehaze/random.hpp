#pragma once

#include <cstdint>
#include <random>

namespace dehaze {

/// Seeded generator for synthesis and initialisation. Built on mt19937_64,
/// whose output sequence is fixed by the C++ standard; uniform and normal
/// deviates are derived by hand (53-bit mantissa fill, Box-Muller) so the
/// streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dehaze
