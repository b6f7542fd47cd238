#ifndef PUNCT_RANDOM_H_
#define PUNCT_RANDOM_H_

#include <cstdint>
#include <random>

namespace punct {

// Every seeded draw in the toolkit goes through std::mt19937_64 (whose output
// sequence is fixed by the standard) and the rejection sampler below, so draw
// sequences are reproducible across standard libraries.
using Generator = std::mt19937_64;

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_below(Generator& gen, std::uint64_t n) {
  // Largest multiple of n representable in 64 bits.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x > limit);
  return x % n;
}

// Fisher-Yates from the back, using uniform_below.
template <typename It>
void seeded_shuffle(It first, It last, Generator& gen) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t j = uniform_below(gen, i);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace punct

#endif  // PUNCT_RANDOM_H_
