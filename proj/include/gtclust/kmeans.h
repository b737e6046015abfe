#ifndef GTCLUST_KMEANS_H_
#define GTCLUST_KMEANS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gtclust/core.h"

namespace gtclust {

struct KMeansConfig {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 100;
};

// K distinct data points drawn without replacement (partial Fisher-Yates over
// point indices, driven by Rng). Order follows the draw.
std::vector<Point> init_centers(const Dataset& dataset,
                                const KMeansConfig& config);

// One Lloyd step: nearest-center assignment (ties go to the lowest cluster
// index), then mean recomputation. A cluster left empty receives the point
// farthest from its own cluster mean, taken from a cluster holding at least
// two points; ties go to the lowest point index.
Clustering lloyd_iteration(const Dataset& dataset,
                           std::span<const Point> centers);

struct LloydResult {
  Clustering clustering;
  std::size_t iterations = 0;
};

// Repeats lloyd_iteration until a step leaves its input centers unchanged or
// the assignment matches the previous step, or max_iterations is reached.
LloydResult lloyd_full(const Dataset& dataset, std::span<const Point> centers,
                       std::size_t max_iterations);

}  // namespace gtclust

#endif  // GTCLUST_KMEANS_H_
