#ifndef GTCLUST_CORE_H_
#define GTCLUST_CORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gtclust {

enum class Errc {
  kInvalidConfiguration,
  kInvalidInput,
  kStructural,
  kInconsistentState,
  kInfeasibleTransfer,
  kParse,
  kUndefinedIndex,
};

const char* to_string(Errc code);

// All library failures are reported through this one exception type; the
// code distinguishes the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

using Point = std::vector<double>;
using ClusterId = std::size_t;

// N points in D-dimensional space, stored row-major.
class Dataset {
 public:
  explicit Dataset(const std::vector<Point>& points);
  Dataset(std::size_t dim, std::vector<double> coords);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

 private:
  void validate() const;

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Exact non-negative rational num/den, kept reduced.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  bool is_integer() const noexcept { return num % den == 0; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

// ceil(value - load) and floor(load - value) in exact arithmetic.
std::int64_t ceil_gap_below(Rational value, std::int64_t load);
std::int64_t floor_gap_above(Rational value, std::int64_t load);
// |load - value| as a double, computed from integers.
double abs_gap(Rational value, std::int64_t load);

// Point-to-cluster assignment with the derived loads and mean centers.
// Centers of empty clusters are taken from `fallback_centers` when given
// (zero vectors otherwise); non-empty clusters always get their mean.
class Clustering {
 public:
  Clustering(const Dataset& dataset, std::size_t k,
             std::vector<ClusterId> assignment,
             std::span<const Point> fallback_centers = {});

  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return assignment_.size(); }
  const std::vector<ClusterId>& assignment() const noexcept {
    return assignment_;
  }
  ClusterId cluster_of(std::size_t point) const { return assignment_[point]; }
  const std::vector<Point>& centers() const noexcept { return centers_; }
  const Point& center(ClusterId c) const { return centers_[c]; }
  const std::vector<std::int64_t>& loads() const noexcept { return loads_; }
  std::int64_t load(ClusterId c) const { return loads_[c]; }
  std::size_t dim() const noexcept {
    return centers_.empty() ? 0 : centers_.front().size();
  }

  // Point indices of `c`, ascending.
  std::vector<std::size_t> members(ClusterId c) const;

 private:
  std::size_t k_ = 0;
  std::vector<ClusterId> assignment_;
  std::vector<Point> centers_;
  std::vector<std::int64_t> loads_;
};

struct ObjectiveState {
  double sse = 0.0;
  double load_metric = 0.0;
  Rational ideal_load;
};

struct ImprovementReport {
  double sse_improvement_pct = 0.0;
  double l_improvement_pct = 0.0;
};

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

// l_ideal = n / k, exact.
Rational ideal_load(std::int64_t n, std::int64_t k);

// Sum of squared Euclidean distances from each point to its cluster center.
double sse(const Dataset& dataset, const Clustering& clustering);

// Sum over clusters of (load - ideal)^2.
double load_metric(std::span<const std::int64_t> loads, Rational ideal);

// 100 * (initial - final) / initial. Positive means the objective shrank.
double improvement_pct(double initial, double final_value);

ObjectiveState evaluate(const Dataset& dataset, const Clustering& clustering);

ImprovementReport improvement(const ObjectiveState& initial,
                              const ObjectiveState& final_state);

}  // namespace gtclust

#endif  // GTCLUST_CORE_H_
