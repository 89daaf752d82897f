#pragma once

#include <cstdint>
#include <string_view>

namespace gpf {

/// Identifier recorded in reports so streams can be reproduced elsewhere.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter/1";

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator.
///
/// Stream `s` of seed `k` has key `splitmix64(k + splitmix64(s))`; the n-th
/// 64-bit output (n = 0, 1, ...) is `splitmix64(key + n * 0x9e3779b97f4a7c15)`.
/// Doubles take the top 53 bits. Normals use Box-Muller on two consecutive
/// uniforms and keep only the cosine branch, so every normal consumes exactly
/// two counter values. Gamma draws use Marsaglia-Tsang.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [lo, hi] (inclusive).
  int uniform_int(int lo, int hi) noexcept;
  double normal() noexcept;
  double gamma(double shape) noexcept;
  /// Draw with density proportional to exp(-|x|^p). Normalizing a vector of
  /// such draws by its p-norm gives the cone measure on the unit p-sphere.
  double generalized_gaussian(double p) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gpf
