#ifndef SYMCTRL_RANDOM_HPP_
#define SYMCTRL_RANDOM_HPP_

#include <cstdint>
#include <limits>
#include <random>

namespace symctrl {

/* unbiased draw from [0, n) by rejection; n must be nonzero. Unlike
 * std::uniform_int_distribution the mapping from engine output to result is
 * fixed, so seeded sequences are reproducible across standard libraries. */
inline std::uint64_t bounded_rand(std::mt19937_64& eng, std::uint64_t n) {
  const std::uint64_t maxv = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (maxv % n + 1u) % n;
  const std::uint64_t limit = maxv - rem;
  std::uint64_t x = eng();
  while (x > limit) x = eng();
  return x % n;
}

/* uniform draw from the closed interval [lo, hi]; reproducible like
 * bounded_rand by mapping one engine word through a fixed affine step */
inline double uniform_real(std::mt19937_64& eng, double lo, double hi) {
  const double unit =
      static_cast<double>(eng() >> 11) * 0x1.0p-53; /* [0, 1) with 53 bits */
  return lo + (hi - lo) * unit;
}

}  // namespace symctrl

#endif
