#ifndef GTCLUST_DATAGEN_H_
#define GTCLUST_DATAGEN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "gtclust/core.h"

namespace gtclust {

// Gaussian blobs: blob centers uniform in [mean_lo, mean_hi] per dimension,
// point noise N(0, std_dev^2) per dimension.
struct Ds1Config {
  std::size_t n_points = 150;
  std::size_t dim = 2;
  std::size_t blob_count = 8;
  double mean_lo = 0.0;
  double mean_hi = 10.0;
  double std_dev = 2.0;
  std::uint64_t seed = 0;
};

// Blob centers are drawn first, then points blob by blob; blob b holds
// n / B points plus one extra when b < n % B.
Dataset generate_ds1(const Ds1Config& config);

// Comma-separated numeric rows, '.' decimal point. A first row containing
// any non-numeric token is taken as a header and skipped.
Dataset load_csv(const std::filesystem::path& path,
                 std::optional<std::size_t> expected_dim = std::nullopt);

// One row per point with 9 significant digits, no header.
void write_csv(std::ostream& out, const Dataset& dataset);
void save_csv(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace gtclust

#endif  // GTCLUST_DATAGEN_H_
