#include "pustat/random.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pustat {

Stream::Stream(std::uint64_t seed, std::uint64_t replicate,
               std::uint64_t substream) noexcept {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k ^ mix64(replicate + 0x632be59bd9b4e019ULL));
  k = mix64(k ^ mix64(substream + 0x85157af5ULL));
  key_ = k;
}

double Stream::normal() noexcept {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Stream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(*this);
}

Stream Stream::split(std::uint64_t index) const noexcept {
  return Stream(FromKey{}, mix64(key_ ^ mix64(index ^ 0xd1b54a32d192ed03ULL)));
}

}  // namespace pustat
