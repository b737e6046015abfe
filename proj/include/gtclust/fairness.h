#ifndef GTCLUST_FAIRNESS_H_
#define GTCLUST_FAIRNESS_H_

#include <span>
#include <vector>

namespace gtclust {

// Jain's index (sum x)^2 / (n * sum x^2). Lies in [1/n, 1]; 1 means every
// objective improved by the same amount. Throws kUndefinedIndex on an
// all-zero input.
double jain_index(std::span<const double> xs);

// n-th root of the product of the values; 100 when every improvement is 100%.
double geometric_mean_index(std::span<const double> xs);

// Improvements below zero (objective got worse) are clamped to zero before
// indexing.
std::vector<double> clamp_improvements(std::span<const double> xs);

}  // namespace gtclust

#endif  // GTCLUST_FAIRNESS_H_
