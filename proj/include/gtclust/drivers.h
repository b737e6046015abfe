#ifndef GTCLUST_DRIVERS_H_
#define GTCLUST_DRIVERS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gtclust/core.h"
#include "gtclust/game.h"

namespace gtclust {

enum class Algorithm { kGtkMeans, kPkGame };

const char* to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct RunConfig {
  std::size_t k = 2;
  std::optional<std::int64_t> ns;  // nullopt: strategy selection disabled
  std::uint64_t seed = 0;
  std::size_t max_outer_iterations = 100;
  Algorithm algorithm = Algorithm::kGtkMeans;
};

// One conflicted resource resolved by a payoff tensor.
struct GameRecord {
  std::size_t iteration = 0;
  ClusterId resource = 0;
  std::vector<std::size_t> strategy_set_sizes;
  std::size_t payoff_entries = 0;  // joint strategies in the tensor
  std::size_t feasible_entries = 0;
  EquilibriumKind kind = EquilibriumKind::kPureNash;
};

struct IterationTrace {
  std::size_t iteration = 0;
  bool balanced = false;  // the Lloyd step alone was equi-partitioned
  std::size_t games = 0;
  bool reallocation_attempted = false;
  bool accepted = false;
  bool rolled_back = false;
  std::int64_t points_moved = 0;
  ObjectiveState pre_game;
  ObjectiveState end;
  // SSE_new/SSE_old + L_new/L_old of the attempted reallocation.
  double combined_score = 2.0;
};

struct RunReport {
  Algorithm algorithm = Algorithm::kGtkMeans;
  std::optional<std::int64_t> ns;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  ObjectiveState initial;
  ObjectiveState final_state;
  ImprovementReport improvement;

  // Mean strategy-set size over every (game, player) pair; 0 without games.
  double avg_strategies_per_player = 0.0;
  std::vector<std::size_t> payoff_entry_counts;
  std::size_t games_played = 0;
  double wall_time_s = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t lloyd_full_calls = 0;
  std::size_t game_phases = 0;

  std::vector<IterationTrace> trace;
  std::vector<GameRecord> games;
  std::vector<ClusterId> final_assignment;

  std::size_t total_payoff_entries() const;
};

// Objectives of the partition induced by the initialization itself: every
// point assigned to its nearest center (lowest index on ties), SSE measured
// against those centers before any mean update.
ObjectiveState starting_state(const Dataset& dataset,
                              std::span<const Point> centers);

// Equi-partitioned iff every load is within one point of the ideal.
bool is_equipartitioned(const Clustering& clustering, Rational ideal);

struct GamePhase {
  ApplyOutcome outcome;
  std::vector<GameRecord> games;
  std::size_t strategy_count = 0;   // sum of set sizes over game players
  std::size_t strategy_samples = 0; // number of (game, player) pairs
};

// Roles, routing, one tensor game per conflicted resource (requests to a
// resource with enough overhead are granted in full), then one combined
// apply_and_evaluate.
GamePhase play_game_phase(const Dataset& dataset, const Clustering& clustering,
                          std::optional<std::int64_t> ns,
                          std::size_t iteration);

// Both drivers start from `centers` and report starting_state(centers) as
// the initial ObjectiveState, so paired variants share it.
RunReport run_gtkmeans(const Dataset& dataset, const RunConfig& config);
RunReport run_gtkmeans(const Dataset& dataset, const RunConfig& config,
                       std::span<const Point> centers);
RunReport run_pkgame(const Dataset& dataset, const RunConfig& config);
RunReport run_pkgame(const Dataset& dataset, const RunConfig& config,
                     std::span<const Point> centers);
RunReport run(const Dataset& dataset, const RunConfig& config,
              std::span<const Point> centers);

struct Variant {
  Algorithm algorithm = Algorithm::kGtkMeans;
  std::optional<std::int64_t> ns;
  friend bool operator==(const Variant&, const Variant&) = default;
};

struct ComparisonRow {
  Algorithm algorithm = Algorithm::kGtkMeans;
  std::optional<std::int64_t> ns;
  std::size_t k = 0;
  std::size_t runs = 0;
  double mean_wall_time_s = 0.0;
  double mean_strategies_per_player = 0.0;
  double mean_payoff_entries = 0.0;
  double mean_games_played = 0.0;
  double mean_outer_iterations = 0.0;
  double mean_sse_improvement_pct = 0.0;
  double mean_l_improvement_pct = 0.0;
  // On the run-averaged improvements, clamped at zero. Empty when both
  // clamped values are zero.
  std::optional<double> jain_index;
  std::optional<double> geometric_mean_index;
  // Mean of per-run indices, over runs where the index is defined.
  std::optional<double> mean_run_jain_index;
  std::optional<double> mean_run_geometric_mean_index;
};

// Aggregates runs of one (algorithm, ns, k) cell.
ComparisonRow summarize(std::span<const RunReport> runs);

struct CompareOptions {
  std::size_t max_outer_iterations = 100;
  std::size_t jobs = 1;  // worker threads; 1 runs everything serially
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // one per variant, in the given order
  std::vector<RunReport> raw;       // variant-major, then seed order
};

// Every variant of a seed starts from the same init_centers output.
Comparison paired_compare(const Dataset& dataset, std::size_t k,
                          std::span<const std::uint64_t> seeds,
                          std::span<const Variant> variants,
                          const CompareOptions& options = {});

}  // namespace gtclust

#endif  // GTCLUST_DRIVERS_H_
