#include "gtclust/rng.h"

#include <cmath>
#include <numbers>

#include "gtclust/core.h"

namespace gtclust {

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::kInvalidInput, "uniform_below(0)");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gtclust
