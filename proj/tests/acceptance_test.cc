// Standalone acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gtclust/core.h"
#include "gtclust/datagen.h"
#include "gtclust/drivers.h"
#include "gtclust/fairness.h"
#include "gtclust/game.h"
#include "gtclust/kmeans.h"
#include "oracle.h"

namespace {

using namespace gtclust;
using Clock = std::chrono::steady_clock;
using Values = std::vector<std::int64_t>;

constexpr std::uint64_t kDataSeed = 7;
constexpr std::size_t kReps = 50;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const Dataset& ds1() {
  static const Dataset ds = [] {
    Ds1Config c;
    c.seed = kDataSeed;
    return generate_ds1(c);
  }();
  return ds;
}

std::vector<std::uint64_t> rep_seeds() {
  std::vector<std::uint64_t> seeds(kReps);
  for (std::size_t i = 0; i < kReps; ++i) seeds[i] = 1000 + i;
  return seeds;
}

Verdict worked_example() {
  const auto start = Clock::now();
  const auto a = select_strategies(generate_strategy_set(3), 2);
  const auto b = select_strategies(generate_strategy_set(6), 2);
  const double elapsed = seconds_since(start);
  const bool exact = a.values() == Values{0, 2} && b.values() == Values{0, 2, 4, 5};
  return {exact && elapsed < 1e-3,
          fmt("exact=%.0f elapsed=%.6fs", exact ? 1.0 : 0.0, elapsed)};
}

Verdict roles() {
  const Dataset ds({{0}, {1}, {2}, {3}, {10}, {20}, {21}, {22}, {23}, {24},
                    {25}, {26}, {27}});
  const Clustering cl(ds, 3, {0, 0, 0, 0, 1, 2, 2, 2, 2, 2, 2, 2, 2});
  const RoleAssignment r = classify_roles(cl, Rational{7, 1});
  const bool players = r.players == std::vector<PlayerRole>{{0, 3}, {1, 6}};
  const bool resources = r.resources == std::vector<ResourceRole>{{2, 1}};
  const Values requests{3, 6};
  const bool conflict = detect_conflict(1, requests);
  std::ostringstream os;
  os << "players=" << players << " resources=" << resources
     << " conflict=" << conflict;
  return {players && resources && conflict, os.str()};
}

Verdict nash_oracle() {
  oracle::Gen gen(2024);
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  std::size_t fallbacks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t np = static_cast<std::size_t>(gen.integer(2, 3));
    std::vector<std::size_t> shape(np);
    std::size_t joints = 1;
    for (auto& s : shape) {
      s = static_cast<std::size_t>(gen.integer(1, 5));
      joints *= s;
    }
    const bool ties = trial % 2 == 0;
    std::vector<double> costs(joints * np);
    for (double& c : costs) {
      c = ties ? static_cast<double>(gen.integer(0, 4)) : gen.real(0, 10);
    }
    const PayoffTensor t(shape, costs, std::vector<bool>(joints, true));
    const auto equilibria = oracle::brute_force_equilibria(t);
    const EquilibriumResult r = find_pure_nash(t);
    if (equilibria.empty()) {
      ++fallbacks;
      if (r.kind != EquilibriumKind::kFallbackMinSocialCost) ++mismatches;
    } else if (r.kind != EquilibriumKind::kPureNash ||
               equilibria.count(r.joint) == 0) {
      ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 5.0,
          fmt("mismatches=%.0f fallbacks=%.0f elapsed=%.3fs",
              static_cast<double>(mismatches), static_cast<double>(fallbacks),
              elapsed)};
}

Verdict pruning_law() {
  std::size_t bad = 0;
  for (std::int64_t request = 1; request <= 200; ++request) {
    const auto full = generate_strategy_set(request);
    for (std::int64_t ns = 1; ns <= 10; ++ns) {
      const std::int64_t top = request - 1;
      const std::size_t want =
          static_cast<std::size_t>(top / ns + 1 + (top % ns != 0 ? 1 : 0));
      if (select_strategies(full, ns).size() != want) ++bad;
    }
  }
  return {bad == 0, fmt("violations=%.0f of 2000", static_cast<double>(bad))};
}

Verdict complexity() {
  const auto seeds = rep_seeds();
  const std::vector<Variant> variants{{Algorithm::kGtkMeans, std::nullopt},
                                      {Algorithm::kGtkMeans, 3}};
  const Comparison cmp = paired_compare(ds1(), 8, seeds, variants);
  const ComparisonRow& off = cmp.rows[0];
  const ComparisonRow& on = cmp.rows[1];
  const double spp = on.mean_strategies_per_player / off.mean_strategies_per_player;
  const double entries = on.mean_payoff_entries / off.mean_payoff_entries;
  return {spp <= 0.6 && entries <= 0.6,
          fmt("strategies ratio=%.3f entries ratio=%.3f (limit 0.6)", spp,
              entries)};
}

Verdict wall_time() {
  const auto seeds = rep_seeds();
  const std::vector<Variant> off{{Algorithm::kGtkMeans, std::nullopt}};
  const std::vector<Variant> on{{Algorithm::kGtkMeans, 3}};
  const CompareOptions serial{100, 1};
  double best_off = INFINITY;
  double best_on = INFINITY;
  for (int trial = 0; trial < 5; ++trial) {
    best_off = std::min(
        best_off, paired_compare(ds1(), 8, seeds, off, serial).rows[0].mean_wall_time_s);
    best_on = std::min(
        best_on, paired_compare(ds1(), 8, seeds, on, serial).rows[0].mean_wall_time_s);
  }
  const double ratio = best_off / best_on;
  return {ratio >= 2.0, fmt("off=%.6fs on=%.6fs speedup=%.2fx (need 2x)",
                            best_off, best_on, ratio)};
}

Verdict quality() {
  const auto seeds = rep_seeds();
  const std::vector<Variant> variants{{Algorithm::kGtkMeans, std::nullopt},
                                      {Algorithm::kGtkMeans, 2},
                                      {Algorithm::kGtkMeans, 3},
                                      {Algorithm::kGtkMeans, 4}};
  double worst_jain = 0.0;
  double worst_gmi = 0.0;
  bool defined = true;
  for (std::size_t k = 4; k <= 8; ++k) {
    const Comparison cmp = paired_compare(ds1(), k, seeds, variants);
    const ComparisonRow& base = cmp.rows[0];
    for (std::size_t v = 1; v < cmp.rows.size(); ++v) {
      const ComparisonRow& row = cmp.rows[v];
      if (!base.jain_index || !row.jain_index) {
        defined = false;
        continue;
      }
      worst_jain = std::max(worst_jain, std::abs(*row.jain_index - *base.jain_index));
      worst_gmi = std::max(worst_gmi, std::abs(*row.geometric_mean_index -
                                               *base.geometric_mean_index));
    }
  }
  return {defined && worst_jain <= 0.02 && worst_gmi <= 3.0,
          fmt("max |dJain|=%.4f max |dGMI|=%.3f defined=%.0f", worst_jain,
              worst_gmi, defined ? 1.0 : 0.0)};
}

Verdict objective_improvement() {
  const auto seeds = rep_seeds();
  std::size_t better = 0;
  std::size_t score_violations = 0;
  for (const std::uint64_t seed : seeds) {
    const auto centers = init_centers(ds1(), KMeansConfig{8, seed, 1});
    RunConfig cfg;
    cfg.k = 8;
    cfg.seed = seed;
    const RunReport r = run_gtkmeans(ds1(), cfg, centers);
    const LloydResult plain = lloyd_full(ds1(), centers, 100);
    if (r.final_state.load_metric < evaluate(ds1(), plain.clustering).load_metric) {
      ++better;
    }
    for (const IterationTrace& t : r.trace) {
      if (!t.accepted) continue;
      const double score = t.end.sse / t.pre_game.sse +
                           t.end.load_metric / t.pre_game.load_metric;
      if (!(score < 2.0)) ++score_violations;
    }
  }
  const double share = static_cast<double>(better) / static_cast<double>(kReps);
  return {share >= 0.9 && score_violations == 0,
          fmt("L below plain k-means on %.0f%% of seeds, score violations=%.0f",
              100.0 * share, static_cast<double>(score_violations))};
}

Verdict fairness_units() {
  const std::vector<double> a{1, 1}, b{1, 0}, c{100, 100};
  const double ja = jain_index(a);
  const double jb = jain_index(b);
  const double g = geometric_mean_index(c);
  const bool ok = std::abs(ja - 1.0) <= 1e-12 && std::abs(jb - 0.5) <= 1e-12 &&
                  std::abs(g - 100.0) <= 1e-12;
  return {ok, fmt("jain(1,1)=%.15g jain(1,0)=%.15g gmi(100,100)=%.15g", ja, jb, g)};
}

std::string without_wall_time(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::string line;
  std::string kept;
  while (std::getline(f, line)) {
    if (line.find("wall_time_s") == std::string::npos) kept += line + "\n";
  }
  return kept;
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "gtclust_acceptance";
  std::filesystem::create_directories(dir);
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = dir / ("run" + std::to_string(i) + ".json");
    std::filesystem::remove(path);
    const std::string cmd = std::string(GTCLUST_CLI_PATH) +
                            " bench --ds1 --k 6..8 --algo gtkmeans,pkgame"
                            " --ns 0,3 --reps 5 --seed 17 --out " +
                            path.string() + " 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "cli invocation failed"};
    outputs[i] = without_wall_time(path);
  }
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
  return {same, fmt("compared %.0f bytes", static_cast<double>(outputs[0].size()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"AC1", worked_example}, {"AC2", roles},
      {"AC3", nash_oracle},    {"AC4", pruning_law},
      {"AC5", complexity},     {"AC6", wall_time},
      {"AC7", quality},        {"AC8", objective_improvement},
      {"AC9", fairness_units}, {"AC10", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << name << (v.pass ? " PASS: " : " FAIL: ") << v.detail << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
