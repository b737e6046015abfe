#include "gtclust/kmeans.h"

#include <limits>
#include <numeric>
#include <sstream>

#include "gtclust/rng.h"

namespace gtclust {

namespace {

void check_centers(const Dataset& dataset, std::span<const Point> centers) {
  if (centers.empty()) throw Error(Errc::kInvalidInput, "no centers given");
  if (centers.size() > dataset.size()) {
    std::ostringstream os;
    os << "k=" << centers.size() << " exceeds n=" << dataset.size();
    throw Error(Errc::kInvalidConfiguration, os.str());
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (centers[c].size() != dataset.dim()) {
      std::ostringstream os;
      os << "center " << c << " has dimension " << centers[c].size()
         << ", dataset has " << dataset.dim();
      throw Error(Errc::kStructural, os.str());
    }
  }
}

}  // namespace

std::vector<Point> init_centers(const Dataset& dataset,
                                const KMeansConfig& config) {
  const std::size_t n = dataset.size();
  if (config.k == 0 || config.k > n) {
    std::ostringstream os;
    os << "k=" << config.k << " must be in [1, " << n << "]";
    throw Error(Errc::kInvalidConfiguration, os.str());
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(config.seed);
  std::vector<Point> centers;
  centers.reserve(config.k);
  for (std::size_t i = 0; i < config.k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
    const auto p = dataset.point(idx[i]);
    centers.emplace_back(p.begin(), p.end());
  }
  return centers;
}

Clustering lloyd_iteration(const Dataset& dataset,
                           std::span<const Point> centers) {
  check_centers(dataset, centers);
  const std::size_t k = centers.size();
  const std::size_t n = dataset.size();

  const std::size_t dim = dataset.dim();
  std::vector<double> flat_centers;
  flat_centers.reserve(k * dim);
  for (const Point& c : centers) {
    flat_centers.insert(flat_centers.end(), c.begin(), c.end());
  }

  std::vector<ClusterId> assignment(n);
  const double* x = dataset.coords().data();
  for (std::size_t i = 0; i < n; ++i, x += dim) {
    ClusterId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const double* c = flat_centers.data();
    for (ClusterId j = 0; j < k; ++j, c += dim) {
      double d = 0.0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double diff = x[t] - c[t];
        d += diff * diff;
      }
      if (j == 0 || d < best_d) {
        best_d = d;
        best = j;
      }
    }
    assignment[i] = best;
  }

  Clustering clustering(dataset, k, assignment, centers);
  for (ClusterId empty = 0; empty < k; ++empty) {
    if (clustering.load(empty) > 0) continue;
    std::size_t far = n;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const ClusterId c = assignment[i];
      if (clustering.load(c) < 2) continue;
      const double d = squared_distance(dataset.point(i), clustering.center(c));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == n) {
      throw Error(Errc::kInconsistentState, "no donor for empty cluster");
    }
    assignment[far] = empty;
    clustering = Clustering(dataset, k, assignment, centers);
  }
  return clustering;
}

LloydResult lloyd_full(const Dataset& dataset, std::span<const Point> centers,
                       std::size_t max_iterations) {
  if (max_iterations == 0) {
    throw Error(Errc::kInvalidConfiguration, "max_iterations must be >= 1");
  }
  Clustering current = lloyd_iteration(dataset, centers);
  std::size_t iterations = 1;
  bool settled = current.centers() ==
                 std::vector<Point>(centers.begin(), centers.end());
  while (!settled && iterations < max_iterations) {
    Clustering next = lloyd_iteration(dataset, current.centers());
    ++iterations;
    settled = next.assignment() == current.assignment();
    current = std::move(next);
  }
  return LloydResult{std::move(current), iterations};
}

}  // namespace gtclust
