#ifndef PUSTAT_RANDOM_HPP_
#define PUSTAT_RANDOM_HPP_

#include <cstdint>
#include <limits>

namespace pustat {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. Output number i of the stream with key K is
/// mix64(K + i * golden), so a stream is fully determined by its key and any
/// two keys give statistically independent sequences. Keys are derived from
/// (seed, replicate, substream) so replicates can be generated in any order
/// or on any worker and still produce identical values.
///
/// Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed, std::uint64_t replicate = 0,
                  std::uint64_t substream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    counter_ += kGolden;
    return mix64(key_ + counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }
  /// Standard normal deviate (Box-Muller, no cached second value).
  double normal() noexcept;
  /// Poisson deviate; mean 0 gives 0.
  std::uint64_t poisson(double mean);

  /// Independent child stream; children with distinct indices never share
  /// outputs with each other or with the parent.
  Stream split(std::uint64_t index) const noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  struct FromKey {};
  Stream(FromKey, std::uint64_t key) noexcept : key_(key) {}

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pustat

#endif  // PUSTAT_RANDOM_HPP_
