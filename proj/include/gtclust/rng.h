#ifndef GTCLUST_RNG_H_
#define GTCLUST_RNG_H_

#include <cstdint>
#include <random>

namespace gtclust {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the distributions below are written
// out here because the standard library's are implementation-defined.
//
//   uniform_below(b): rejection sampling, discarding draws below 2^64 mod b,
//                     then draw % b.
//   uniform01():      top 53 bits of one draw scaled by 2^-53, in [0, 1).
//   normal():         Box-Muller cosine branch from two uniform01() draws,
//                     u1 mapped to (0, 1] as 1 - u.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  std::uint64_t uniform_below(std::uint64_t bound);
  double uniform01();
  double uniform(double lo, double hi);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace gtclust

#endif  // GTCLUST_RNG_H_
