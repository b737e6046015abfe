#include "gtclust/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <span>
#include <sstream>
#include <string_view>
#include <system_error>

#include "CLI11.hpp"
#include "json.hpp"
#include "gtclust/fairness.h"

namespace gtclust::cli {

namespace {

using nlohmann::json;

template <typename T>
T parse_number(const std::string& flag, const std::string& text) {
  T value{};
  const char* last = text.data() + text.size();
  const auto r = std::from_chars(text.data(), last, value);
  if (text.empty() || r.ec != std::errc() || r.ptr != last) {
    throw UsageError(flag, flag + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

// First "--name" or "-x" token in a CLI11 message, if any.
std::string flag_in(const std::string& message) {
  std::istringstream is(message);
  std::string tok;
  while (is >> tok) {
    if (tok.size() > 1 && tok[0] == '-') {
      while (!tok.empty() && (tok.back() == ',' || tok.back() == ':' ||
                              tok.back() == '.' || tok.back() == '\'')) {
        tok.pop_back();
      }
      return tok;
    }
  }
  return {};
}

struct RawFlags {
  std::string k = "";
  std::string algo = "gtkmeans";
  std::string ns = "0";
  std::string seed = "0";
  std::string data_seed;
  std::string reps;
  std::string max_iter = "100";
  std::string format = "json";
  std::string jobs = "1";
  std::string dim;
  std::string data;
  std::string out;
  std::string n = "150";
  std::string blobs = "8";
  std::string std_dev = "2.0";
  bool ds1 = false;
  bool timed_serial = false;
};

void add_experiment_flags(CLI::App* sub, RawFlags& f) {
  sub->add_flag("--ds1", f.ds1, "Use generated DS1 data");
  sub->add_option("--data", f.data, "CSV dataset path");
  sub->add_option("--dim", f.dim, "Expected CSV dimension");
  sub->add_option("--k", f.k, "Cluster count N or range A..B")->required();
  sub->add_option("--algo", f.algo, "gtkmeans, pkgame or a comma list");
  sub->add_option("--ns", f.ns, "Strategy selection step list, 0 = off");
  sub->add_option("--seed", f.seed, "Base seed; repetition r uses seed + r");
  sub->add_option("--data-seed", f.data_seed, "DS1 seed (default: --seed)");
  sub->add_option("--reps", f.reps, "Repetitions per configuration");
  sub->add_option("--max-iter", f.max_iter, "Outer iteration cap");
  sub->add_option("--out", f.out, "Output file");
  sub->add_option("--format", f.format, "json or csv");
  sub->add_flag("--timed-serial", f.timed_serial,
                "Run repetitions serially for clean timings");
  sub->add_option("--jobs", f.jobs, "Worker threads");
}

void add_gen_flags(CLI::App* sub, RawFlags& f) {
  sub->add_option("--n", f.n, "Point count");
  sub->add_option("--dim", f.dim, "Dimension");
  sub->add_option("--blobs", f.blobs, "Blob count");
  sub->add_option("--std", f.std_dev, "Per-dimension standard deviation");
  sub->add_option("--seed", f.seed, "Seed");
  sub->add_option("--out", f.out, "Output CSV file");
}

void parse_k(const std::string& text, CliInvocation& inv) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    inv.k_lo = inv.k_hi = parse_number<std::size_t>("--k", text);
  } else {
    inv.k_lo = parse_number<std::size_t>("--k", text.substr(0, dots));
    inv.k_hi = parse_number<std::size_t>("--k", text.substr(dots + 2));
  }
  if (inv.k_lo < 2) throw UsageError("--k", "--k: must be at least 2");
  if (inv.k_hi < inv.k_lo) {
    throw UsageError("--k", "--k: empty range '" + text + "'");
  }
}

void parse_experiment(const RawFlags& f, CliInvocation& inv) {
  if (f.ds1 == !f.data.empty()) {
    throw UsageError(f.ds1 ? "--data" : "--ds1",
                     "exactly one of --ds1 and --data is required");
  }
  inv.use_ds1 = f.ds1;
  if (!f.data.empty()) inv.data_path = f.data;
  if (!f.dim.empty()) {
    if (f.ds1) throw UsageError("--dim", "--dim: only valid with --data");
    inv.expected_dim = parse_number<std::size_t>("--dim", f.dim);
    if (*inv.expected_dim < 1) {
      throw UsageError("--dim", "--dim: must be at least 1");
    }
  }
  parse_k(f.k, inv);

  for (const std::string& name : split(f.algo, ',')) {
    const auto a = parse_algorithm(name);
    if (!a) throw UsageError("--algo", "--algo: unknown algorithm '" + name + "'");
    inv.algorithms.push_back(*a);
  }
  std::sort(inv.algorithms.begin(), inv.algorithms.end());
  inv.algorithms.erase(std::unique(inv.algorithms.begin(), inv.algorithms.end()),
                       inv.algorithms.end());

  std::vector<std::int64_t> ns;
  for (const std::string& v : split(f.ns, ',')) {
    const auto value = parse_number<std::int64_t>("--ns", v);
    if (value < 0) throw UsageError("--ns", "--ns: values must be >= 0");
    ns.push_back(value);
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (const std::int64_t v : ns) {
    inv.ns_values.push_back(v == 0 ? std::nullopt : std::optional(v));
  }

  inv.seed = parse_number<std::uint64_t>("--seed", f.seed);
  inv.ds1.seed = f.data_seed.empty()
                     ? inv.seed
                     : parse_number<std::uint64_t>("--data-seed", f.data_seed);
  if (!f.reps.empty()) {
    inv.reps = parse_number<std::size_t>("--reps", f.reps);
  } else {
    inv.reps = inv.subcommand == Subcommand::kBench ? 50 : 1;
  }
  if (inv.reps < 1) throw UsageError("--reps", "--reps: must be at least 1");
  inv.max_iterations = parse_number<std::size_t>("--max-iter", f.max_iter);
  if (inv.max_iterations < 1) {
    throw UsageError("--max-iter", "--max-iter: must be at least 1");
  }
  if (f.format == "json") {
    inv.format = OutputFormat::kJson;
  } else if (f.format == "csv") {
    inv.format = OutputFormat::kCsv;
  } else {
    throw UsageError("--format", "--format: expected json or csv, got '" +
                                     f.format + "'");
  }
  inv.timed_serial = f.timed_serial;
  inv.jobs = parse_number<std::size_t>("--jobs", f.jobs);
  if (inv.jobs < 1) throw UsageError("--jobs", "--jobs: must be at least 1");
  if (inv.timed_serial) inv.jobs = 1;

  if (inv.subcommand == Subcommand::kRun) {
    if (inv.k_lo != inv.k_hi) {
      throw UsageError("--k", "--k: run takes a single value");
    }
    if (inv.algorithms.size() != 1) {
      throw UsageError("--algo", "--algo: run takes a single algorithm");
    }
    if (inv.ns_values.size() != 1) {
      throw UsageError("--ns", "--ns: run takes a single value");
    }
  }
}

void parse_gen(const RawFlags& f, CliInvocation& inv) {
  inv.use_ds1 = true;
  inv.ds1.n_points = parse_number<std::size_t>("--n", f.n);
  inv.ds1.dim = f.dim.empty() ? 2 : parse_number<std::size_t>("--dim", f.dim);
  inv.ds1.blob_count = parse_number<std::size_t>("--blobs", f.blobs);
  inv.ds1.std_dev = parse_number<double>("--std", f.std_dev);
  inv.ds1.seed = parse_number<std::uint64_t>("--seed", f.seed);
  inv.seed = inv.ds1.seed;
  if (inv.ds1.n_points < 1) throw UsageError("--n", "--n: must be at least 1");
  if (inv.ds1.dim < 1) throw UsageError("--dim", "--dim: must be at least 1");
  if (inv.ds1.blob_count < 1 || inv.ds1.blob_count > inv.ds1.n_points) {
    throw UsageError("--blobs", "--blobs: must be in [1, --n]");
  }
  if (!(inv.ds1.std_dev > 0.0) || !std::isfinite(inv.ds1.std_dev)) {
    throw UsageError("--std", "--std: must be a positive number");
  }
}

double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::int64_t ns_cell(const std::optional<std::int64_t>& ns) {
  return ns.value_or(0);
}

// Per-run fairness; undefined when both clamped improvements are zero.
std::pair<std::optional<double>, std::optional<double>> run_fairness(
    const RunReport& r) {
  const double raw[2] = {r.improvement.sse_improvement_pct,
                         r.improvement.l_improvement_pct};
  const auto clamped = clamp_improvements(raw);
  if (clamped[0] <= 0.0 && clamped[1] <= 0.0) return {};
  return {jain_index(clamped), geometric_mean_index(clamped)};
}

struct Results {
  std::vector<ComparisonRow> rows;
  std::vector<RunReport> raw;  // row-major, repetitions in order
};

json config_json(const CliInvocation& inv, const Dataset& dataset) {
  json data;
  if (inv.use_ds1) {
    data = {{"source", "ds1"},
            {"n_points", inv.ds1.n_points},
            {"dim", inv.ds1.dim},
            {"blob_count", inv.ds1.blob_count},
            {"std_dev", inv.ds1.std_dev},
            {"data_seed", inv.ds1.seed}};
  } else {
    data = {{"source", "csv"},
            {"path", inv.data_path->string()},
            {"n_points", dataset.size()},
            {"dim", dataset.dim()}};
  }
  json algos = json::array();
  for (const Algorithm a : inv.algorithms) algos.push_back(to_string(a));
  json ns = json::array();
  for (const auto& v : inv.ns_values) ns.push_back(ns_cell(v));
  return {{"subcommand", inv.subcommand == Subcommand::kRun ? "run" : "bench"},
          {"data", data},
          {"k_min", inv.k_lo},
          {"k_max", inv.k_hi},
          {"algorithms", algos},
          {"ns", ns},
          {"seed", inv.seed},
          {"reps", inv.reps},
          {"max_iterations", inv.max_iterations}};
}

json row_json(const ComparisonRow& row) {
  return {{"algorithm", to_string(row.algorithm)},
          {"ns", ns_cell(row.ns)},
          {"k", row.k},
          {"runs", row.runs},
          {"mean_wall_time_s", row.mean_wall_time_s},
          {"mean_strategies_per_player", row.mean_strategies_per_player},
          {"mean_payoff_entries", row.mean_payoff_entries},
          {"mean_games_played", row.mean_games_played},
          {"mean_outer_iterations", row.mean_outer_iterations},
          {"mean_sse_improvement_pct", row.mean_sse_improvement_pct},
          {"mean_l_improvement_pct", row.mean_l_improvement_pct},
          {"jain_index", optional_number(row.jain_index)},
          {"geometric_mean_index", optional_number(row.geometric_mean_index)},
          {"mean_run_jain_index", optional_number(row.mean_run_jain_index)},
          {"mean_run_geometric_mean_index",
           optional_number(row.mean_run_geometric_mean_index)}};
}

json raw_json(const RunReport& r, std::size_t rep) {
  const auto [jain, gmi] = run_fairness(r);
  return {{"algorithm", to_string(r.algorithm)},
          {"ns", ns_cell(r.ns)},
          {"k", r.k},
          {"rep", rep},
          {"seed", r.seed},
          {"wall_time_s", r.wall_time_s},
          {"initial", {{"sse", r.initial.sse}, {"l", r.initial.load_metric}}},
          {"final", {{"sse", r.final_state.sse},
                     {"l", r.final_state.load_metric}}},
          {"sse_improvement_pct", r.improvement.sse_improvement_pct},
          {"l_improvement_pct", r.improvement.l_improvement_pct},
          {"strategies_per_player", r.avg_strategies_per_player},
          {"payoff_entries", r.total_payoff_entries()},
          {"games_played", r.games_played},
          {"outer_iterations", r.outer_iterations},
          {"lloyd_full_calls", r.lloyd_full_calls},
          {"game_phases", r.game_phases},
          {"jain_index", optional_number(jain)},
          {"geometric_mean_index", optional_number(gmi)}};
}

std::string format_json(const CliInvocation& inv, const Dataset& dataset,
                        const Results& results) {
  json rows = json::array();
  for (const ComparisonRow& row : results.rows) rows.push_back(row_json(row));
  json raw = json::array();
  for (std::size_t i = 0; i < results.raw.size(); ++i) {
    raw.push_back(raw_json(results.raw[i], i % inv.reps));
  }
  const json doc = {{"schema_version", kSchemaVersion},
                    {"config", config_json(inv, dataset)},
                    {"rows", rows},
                    {"raw", raw}};
  return doc.dump(2) + "\n";
}

std::string csv_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_optional(const std::optional<double>& v) {
  return v ? csv_number(*v) : std::string();
}

std::string format_csv(const Results& results) {
  std::ostringstream os;
  os << "algorithm,ns,k,runs,mean_wall_time_s,mean_strategies_per_player,"
        "mean_payoff_entries,mean_games_played,mean_outer_iterations,"
        "mean_sse_improvement_pct,mean_l_improvement_pct,jain_index,"
        "geometric_mean_index,mean_run_jain_index,"
        "mean_run_geometric_mean_index\n";
  for (const ComparisonRow& r : results.rows) {
    os << to_string(r.algorithm) << ',' << ns_cell(r.ns) << ',' << r.k << ','
       << r.runs << ',' << csv_number(r.mean_wall_time_s) << ','
       << csv_number(r.mean_strategies_per_player) << ','
       << csv_number(r.mean_payoff_entries) << ','
       << csv_number(r.mean_games_played) << ','
       << csv_number(r.mean_outer_iterations) << ','
       << csv_number(r.mean_sse_improvement_pct) << ','
       << csv_number(r.mean_l_improvement_pct) << ','
       << csv_optional(r.jain_index) << ','
       << csv_optional(r.geometric_mean_index) << ','
       << csv_optional(r.mean_run_jain_index) << ','
       << csv_optional(r.mean_run_geometric_mean_index) << '\n';
  }
  return os.str();
}

std::optional<std::filesystem::path> output_path(const CliInvocation& inv) {
  if (inv.out) return inv.out;
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  std::string name;
  switch (inv.subcommand) {
    case Subcommand::kRun: name = "run"; break;
    case Subcommand::kBench: name = "bench"; break;
    case Subcommand::kGen: name = "ds1"; break;
  }
  const bool csv =
      inv.subcommand == Subcommand::kGen || inv.format == OutputFormat::kCsv;
  return std::filesystem::path(dir) / (name + (csv ? ".csv" : ".json"));
}

// Writes through a temporary sibling so a failed write leaves no partial
// file behind.
void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << text;
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("cannot write " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

int emit(const CliInvocation& inv, const std::string& text, std::ostream& out,
         std::ostream& err) {
  const auto path = output_path(inv);
  if (!path) {
    out << text;
    out.flush();
    return kExitOk;
  }
  try {
    write_file(*path, text);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  err << "wrote " << path->string() << '\n';
  return kExitOk;
}

Results compute(const CliInvocation& inv, const Dataset& dataset) {
  std::vector<std::uint64_t> seeds(inv.reps);
  for (std::size_t r = 0; r < inv.reps; ++r) seeds[r] = inv.seed + r;
  std::vector<Variant> variants;
  for (const Algorithm a : inv.algorithms) {
    for (const auto& ns : inv.ns_values) variants.push_back({a, ns});
  }
  const CompareOptions options{inv.max_iterations, inv.jobs};

  Results results;
  for (std::size_t k = inv.k_lo; k <= inv.k_hi; ++k) {
    Comparison cmp = paired_compare(dataset, k, seeds, variants, options);
    for (RunReport& r : cmp.raw) r.wall_time_s = round_ms(r.wall_time_s);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const std::span<const RunReport> slice(cmp.raw.data() + v * inv.reps,
                                             inv.reps);
      ComparisonRow row = summarize(slice);
      if (row.algorithm != variants[v].algorithm || row.ns != variants[v].ns ||
          row.k != k || row.runs != inv.reps) {
        throw Error(Errc::kInconsistentState,
                    "result rows do not match the configured matrix");
      }
      results.rows.push_back(std::move(row));
    }
    for (RunReport& r : cmp.raw) results.raw.push_back(std::move(r));
  }
  return results;
}

}  // namespace

CliInvocation parse_invocation(const std::vector<std::string>& args) {
  CLI::App app{"Game-theoretic balanced k-means", "gtclust"};
  app.require_subcommand(1, 1);
  RawFlags run_flags;
  RawFlags bench_flags;
  RawFlags gen_flags;
  CLI::App* run = app.add_subcommand("run", "Run one configuration");
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark matrix");
  CLI::App* gen = app.add_subcommand("gen", "Write a DS1 dataset as CSV");
  add_experiment_flags(run, run_flags);
  add_experiment_flags(bench, bench_flags);
  add_gen_flags(gen, gen_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError("--help", app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(flag_in(e.what()), e.what());
  }

  CliInvocation inv;
  if (run->parsed()) {
    inv.subcommand = Subcommand::kRun;
    parse_experiment(run_flags, inv);
  } else if (bench->parsed()) {
    inv.subcommand = Subcommand::kBench;
    parse_experiment(bench_flags, inv);
  } else {
    inv.subcommand = Subcommand::kGen;
    parse_gen(gen_flags, inv);
  }
  const std::string& out = run->parsed()     ? run_flags.out
                           : bench->parsed() ? bench_flags.out
                                             : gen_flags.out;
  if (!out.empty()) inv.out = out;
  return inv;
}

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.subcommand == Subcommand::kGen) {
    std::ostringstream csv;
    try {
      write_csv(csv, generate_ds1(inv.ds1));
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    return emit(inv, csv.str(), out, err);
  }

  std::optional<Dataset> dataset;
  try {
    dataset = inv.use_ds1 ? generate_ds1(inv.ds1)
                          : load_csv(*inv.data_path, inv.expected_dim);
  } catch (const Error& e) {
    err << "error: cannot load dataset: " << e.what() << '\n';
    return kExitDatasetLoad;
  }
  if (inv.k_hi > dataset->size()) {
    err << "usage error: --k: " << inv.k_hi << " exceeds the "
        << dataset->size() << " points of the dataset\n";
    return kExitUsage;
  }

  std::string text;
  try {
    const Results results = compute(inv, *dataset);
    text = inv.format == OutputFormat::kJson
               ? format_json(inv, *dataset, results)
               : format_csv(results);
  } catch (const std::exception& e) {
    err << "error: internal inconsistency: " << e.what() << '\n';
    return kExitInternal;
  }
  return emit(inv, text, out, err);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_invocation(args);
  } catch (const UsageError& e) {
    if (e.flag() == "--help") {
      out << e.what();
      return kExitOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return execute(inv, out, err);
}

}  // namespace gtclust::cli
