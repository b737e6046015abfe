#include "gtclust/core.h"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gtclust {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidConfiguration: return "invalid configuration";
    case Errc::kInvalidInput: return "invalid input";
    case Errc::kStructural: return "structural error";
    case Errc::kInconsistentState: return "inconsistent state";
    case Errc::kInfeasibleTransfer: return "infeasible transfer";
    case Errc::kParse: return "parse error";
    case Errc::kUndefinedIndex: return "undefined index";
  }
  return "unknown error";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

Dataset::Dataset(const std::vector<Point>& points) {
  if (points.empty()) throw Error(Errc::kInvalidInput, "dataset has no points");
  n_ = points.size();
  dim_ = points.front().size();
  coords_.reserve(n_ * dim_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (points[i].size() != dim_) {
      std::ostringstream os;
      os << "point " << i << " has " << points[i].size()
         << " coordinates, expected " << dim_;
      throw Error(Errc::kStructural, os.str());
    }
    coords_.insert(coords_.end(), points[i].begin(), points[i].end());
  }
  validate();
}

Dataset::Dataset(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw Error(Errc::kInvalidInput, "dimension must be >= 1");
  if (coords_.size() % dim_ != 0) {
    throw Error(Errc::kStructural, "coordinate count not a multiple of dim");
  }
  n_ = coords_.size() / dim_;
  validate();
}

void Dataset::validate() const {
  if (n_ == 0) throw Error(Errc::kInvalidInput, "dataset has no points");
  if (dim_ == 0) throw Error(Errc::kInvalidInput, "dimension must be >= 1");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      std::ostringstream os;
      os << "point " << i / dim_ << " coordinate " << i % dim_
         << " is not finite";
      throw Error(Errc::kInvalidInput, os.str());
    }
  }
}

namespace {

// Floor division for a positive divisor.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

}  // namespace

std::int64_t ceil_gap_below(Rational value, std::int64_t load) {
  return ceil_div(value.num - load * value.den, value.den);
}

std::int64_t floor_gap_above(Rational value, std::int64_t load) {
  return floor_div(load * value.den - value.num, value.den);
}

double abs_gap(Rational value, std::int64_t load) {
  const std::int64_t scaled = load * value.den - value.num;
  return static_cast<double>(scaled < 0 ? -scaled : scaled) /
         static_cast<double>(value.den);
}

Clustering::Clustering(const Dataset& dataset, std::size_t k,
                       std::vector<ClusterId> assignment,
                       std::span<const Point> fallback_centers)
    : k_(k), assignment_(std::move(assignment)) {
  if (k_ == 0) throw Error(Errc::kInvalidConfiguration, "k must be >= 1");
  if (assignment_.size() != dataset.size()) {
    throw Error(Errc::kStructural, "assignment size does not match dataset");
  }
  if (!fallback_centers.empty() && fallback_centers.size() != k_) {
    throw Error(Errc::kStructural, "fallback center count does not match k");
  }
  const std::size_t dim = dataset.dim();
  loads_.assign(k_, 0);
  centers_.assign(k_, Point(dim, 0.0));
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const ClusterId c = assignment_[i];
    if (c >= k_) {
      std::ostringstream os;
      os << "point " << i << " assigned to cluster " << c << " of " << k_;
      throw Error(Errc::kStructural, os.str());
    }
    ++loads_[c];
    const auto p = dataset.point(i);
    for (std::size_t d = 0; d < dim; ++d) centers_[c][d] += p[d];
  }
  for (ClusterId c = 0; c < k_; ++c) {
    if (loads_[c] > 0) {
      for (double& x : centers_[c]) x /= static_cast<double>(loads_[c]);
    } else if (!fallback_centers.empty()) {
      if (fallback_centers[c].size() != dim) {
        throw Error(Errc::kStructural, "fallback center dimension mismatch");
      }
      centers_[c].assign(fallback_centers[c].begin(), fallback_centers[c].end());
    }
  }
}

std::vector<std::size_t> Clustering::members(ClusterId c) const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(loads_.at(c)));
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] == c) out.push_back(i);
  }
  return out;
}

Rational ideal_load(std::int64_t n, std::int64_t k) {
  if (k <= 0 || n <= 0 || k > n) {
    std::ostringstream os;
    os << "need n >= k >= 1, got n=" << n << " k=" << k;
    throw Error(Errc::kInvalidConfiguration, os.str());
  }
  const std::int64_t g = std::gcd(n, k);
  return Rational{n / g, k / g};
}

double sse(const Dataset& dataset, const Clustering& clustering) {
  if (clustering.size() != dataset.size()) {
    throw Error(Errc::kStructural, "clustering size does not match dataset");
  }
  if (clustering.dim() != dataset.dim()) {
    throw Error(Errc::kStructural, "center dimension does not match dataset");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    total += squared_distance(dataset.point(i),
                              clustering.center(clustering.cluster_of(i)));
  }
  return total;
}

double load_metric(std::span<const std::int64_t> loads, Rational ideal) {
  if (loads.empty()) throw Error(Errc::kInvalidInput, "no loads");
  // Sum (l*den - num)^2 exactly, then scale once.
  long double acc = 0.0L;
  for (const std::int64_t l : loads) {
    const long double gap = static_cast<long double>(l * ideal.den - ideal.num);
    acc += gap * gap;
  }
  const long double den = static_cast<long double>(ideal.den);
  return static_cast<double>(acc / (den * den));
}

double improvement_pct(double initial, double final_value) {
  if (!(initial > 0.0)) {
    throw Error(Errc::kInvalidInput, "initial objective must be positive");
  }
  return 100.0 * (initial - final_value) / initial;
}

ObjectiveState evaluate(const Dataset& dataset, const Clustering& clustering) {
  const Rational ideal =
      ideal_load(static_cast<std::int64_t>(dataset.size()),
                 static_cast<std::int64_t>(clustering.k()));
  return ObjectiveState{sse(dataset, clustering),
                        load_metric(clustering.loads(), ideal), ideal};
}

ImprovementReport improvement(const ObjectiveState& initial,
                              const ObjectiveState& final_state) {
  // An objective that starts at zero has nothing left to improve.
  ImprovementReport r;
  if (initial.sse > 0.0) {
    r.sse_improvement_pct = improvement_pct(initial.sse, final_state.sse);
  }
  if (initial.load_metric > 0.0) {
    r.l_improvement_pct =
        improvement_pct(initial.load_metric, final_state.load_metric);
  }
  return r;
}

}  // namespace gtclust
