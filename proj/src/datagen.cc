#include "gtclust/datagen.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gtclust/rng.h"

namespace gtclust {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path,
                             std::size_t row, std::size_t col,
                             const std::string& what) {
  std::ostringstream os;
  os << path.string();
  if (row > 0) os << ": row " << row;
  if (col > 0) os << ", column " << col;
  os << ": " << what;
  throw Error(Errc::kParse, os.str());
}

}  // namespace

Dataset generate_ds1(const Ds1Config& config) {
  if (config.n_points == 0 || config.dim == 0 || config.blob_count == 0) {
    throw Error(Errc::kInvalidConfiguration,
                "n_points, dim and blob_count must be positive");
  }
  if (config.n_points < config.blob_count) {
    throw Error(Errc::kInvalidConfiguration, "n_points < blob_count");
  }
  if (!(config.std_dev > 0.0)) {
    throw Error(Errc::kInvalidConfiguration, "std_dev must be positive");
  }
  if (!(config.mean_hi >= config.mean_lo)) {
    throw Error(Errc::kInvalidConfiguration, "empty mean range");
  }

  Rng rng(config.seed);
  std::vector<double> blob_centers(config.blob_count * config.dim);
  for (double& c : blob_centers) c = rng.uniform(config.mean_lo, config.mean_hi);

  std::vector<double> coords;
  coords.reserve(config.n_points * config.dim);
  const std::size_t base = config.n_points / config.blob_count;
  const std::size_t extra = config.n_points % config.blob_count;
  for (std::size_t b = 0; b < config.blob_count; ++b) {
    const std::size_t count = base + (b < extra ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t d = 0; d < config.dim; ++d) {
        coords.push_back(blob_centers[b * config.dim + d] +
                         config.std_dev * rng.normal());
      }
    }
  }
  return Dataset(config.dim, std::move(coords));
}

Dataset load_csv(const std::filesystem::path& path,
                 std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) parse_fail(path, 0, 0, "cannot open file");

  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t row = 0;
  bool first_content_row = true;
  std::string line;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> values;
    values.reserve(cells.size());
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        bad_col = c + 1;
        break;
      }
      values.push_back(*v);
    }
    if (bad_col > 0) {
      if (first_content_row) {
        first_content_row = false;
        continue;
      }
      parse_fail(path, row, bad_col, "non-numeric cell");
    }
    first_content_row = false;
    if (dim == 0) {
      dim = values.size();
      if (expected_dim && dim != *expected_dim) {
        std::ostringstream os;
        os << "expected " << *expected_dim << " columns, found " << dim;
        parse_fail(path, row, 0, os.str());
      }
    } else if (values.size() != dim) {
      std::ostringstream os;
      os << "ragged row with " << values.size() << " columns, expected " << dim;
      parse_fail(path, row, 0, os.str());
    }
    coords.insert(coords.end(), values.begin(), values.end());
  }
  if (coords.empty()) parse_fail(path, row, 0, "no data rows");
  return Dataset(dim, std::move(coords));
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  char buf[32];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto p = dataset.point(i);
    for (std::size_t d = 0; d < p.size(); ++d) {
      std::snprintf(buf, sizeof buf, "%.9g", p[d]);
      if (d > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::kInvalidInput, "cannot write " + path.string());
  write_csv(out, dataset);
  if (!out) throw Error(Errc::kInvalidInput, "write failed: " + path.string());
}

}  // namespace gtclust
