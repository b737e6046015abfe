#include "gtclust/fairness.h"

#include <algorithm>
#include <cmath>

#include "gtclust/core.h"

namespace gtclust {

namespace {

void check_values(std::span<const double> xs) {
  if (xs.empty()) throw Error(Errc::kInvalidInput, "no values to index");
  for (const double x : xs) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(Errc::kInvalidInput,
                  "fairness inputs must be finite and non-negative");
    }
  }
}

}  // namespace

double jain_index(std::span<const double> xs) {
  check_values(xs);
  double sum = 0.0;
  double sumsq = 0.0;
  for (const double x : xs) {
    sum += x;
    sumsq += x * x;
  }
  if (sumsq == 0.0) {
    throw Error(Errc::kUndefinedIndex, "Jain's index of all-zero values");
  }
  return (sum * sum) / (static_cast<double>(xs.size()) * sumsq);
}

double geometric_mean_index(std::span<const double> xs) {
  check_values(xs);
  if (xs.size() == 1) return xs[0];
  if (std::any_of(xs.begin(), xs.end(), [](double x) { return x == 0.0; })) {
    return 0.0;
  }
  if (xs.size() == 2) return std::sqrt(xs[0] * xs[1]);
  // Log-domain for longer inputs keeps the product in range.
  double log_sum = 0.0;
  for (const double x : xs) log_sum += std::log(x);
  return std::exp(log_sum / static_cast<double>(xs.size()));
}

std::vector<double> clamp_improvements(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  for (double& x : out) x = std::max(0.0, x);
  return out;
}

}  // namespace gtclust
