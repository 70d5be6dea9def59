#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace poropinn {

// Thin wrapper over mt19937_64. The standard distributions are
// implementation-defined, so the draws below are written out explicitly to
// keep sequences identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    shuffle(p);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

// Sub-seed offsets: every random consumer derives its stream from the single
// run seed plus a fixed offset.
namespace seed_offset {
inline constexpr std::uint64_t kInit = 0;
inline constexpr std::uint64_t kCollocation = 1000;
inline constexpr std::uint64_t kShuffle = 2000;
inline constexpr std::uint64_t kIcSubsample = 3000;
}  // namespace seed_offset

}  // namespace poropinn
