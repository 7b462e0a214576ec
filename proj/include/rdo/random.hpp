#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace rdo {

/// Seeded generator with platform-independent derived distributions.
///
/// The standard distribution classes are implementation-defined, so uniform
/// and integer draws are computed from the raw engine output here to keep
/// artifacts identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Stable seed derivation from (global seed, stage name, index).
std::uint64_t derive_seed(std::uint64_t global, std::string_view stage,
                          std::uint64_t index = 0);

}  // namespace rdo
