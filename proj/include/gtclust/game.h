#ifndef GTCLUST_GAME_H_
#define GTCLUST_GAME_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gtclust/core.h"

namespace gtclust {

// A cluster below the ideal load, asking for `request` whole points.
struct PlayerRole {
  ClusterId cluster = 0;
  std::int64_t request = 0;
  friend bool operator==(const PlayerRole&, const PlayerRole&) = default;
};

// A cluster above the ideal load, able to give away `overhead` points.
struct ResourceRole {
  ClusterId cluster = 0;
  std::int64_t overhead = 0;
  friend bool operator==(const ResourceRole&, const ResourceRole&) = default;
};

struct RoleAssignment {
  std::vector<PlayerRole> players;      // ascending cluster id
  std::vector<ResourceRole> resources;  // ascending cluster id
};

// resource cluster id -> players routed to it, ascending player id.
using RequestRoutes = std::map<ClusterId, std::vector<PlayerRole>>;

// Sorted, duplicate-free numbers of requested points a player forgoes.
class StrategySet {
 public:
  StrategySet() = default;
  explicit StrategySet(std::vector<std::int64_t> values);

  const std::vector<std::int64_t>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::int64_t operator[](std::size_t i) const { return values_[i]; }
  std::int64_t max() const { return values_.back(); }
  friend bool operator==(const StrategySet&, const StrategySet&) = default;

 private:
  std::vector<std::int64_t> values_;
};

struct Participant {
  ClusterId player = 0;
  std::int64_t request = 0;
  StrategySet strategies;
};

// One conflicted resource and the players competing for it. Participants are
// kept in ascending player id, which is also the order transfers are applied.
struct LocalGame {
  ClusterId resource = 0;
  std::int64_t resource_load = 0;
  std::vector<Participant> participants;
  std::optional<std::int64_t> selection_granularity;
};

// Per-participant costs for every joint strategy, flattened row-major with
// the last participant varying fastest.
class PayoffTensor {
 public:
  PayoffTensor(std::vector<std::size_t> shape, std::vector<double> costs,
               std::vector<bool> feasible);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t participants() const noexcept { return shape_.size(); }
  std::size_t joint_count() const noexcept { return joint_count_; }
  const std::vector<double>& entries() const noexcept { return costs_; }

  double cost(std::size_t flat, std::size_t participant) const {
    return costs_[flat * shape_.size() + participant];
  }
  bool feasible(std::size_t flat) const { return feasible_[flat]; }
  std::size_t feasible_count() const;

  std::size_t flat_index(std::span<const std::size_t> joint) const;
  std::vector<std::size_t> joint_of(std::size_t flat) const;
  // Distance in flat index between neighbouring strategies of `participant`.
  std::size_t stride(std::size_t participant) const {
    return strides_[participant];
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::size_t joint_count_ = 0;
  std::vector<double> costs_;
  std::vector<bool> feasible_;
};

enum class EquilibriumKind { kPureNash, kFallbackMinSocialCost };

struct EquilibriumResult {
  std::vector<std::size_t> joint;  // one strategy index per participant
  EquilibriumKind kind = EquilibriumKind::kPureNash;
};

struct SolvedGame {
  LocalGame game;
  EquilibriumResult equilibrium;
};

struct PayoffEvaluation {
  bool feasible = true;
  std::vector<double> costs;  // empty when infeasible
};

struct ApplyOutcome {
  explicit ApplyOutcome(Clustering c) : clustering(std::move(c)) {}

  Clustering clustering;
  bool accepted = false;
  bool rolled_back_infeasible = false;
  std::int64_t points_moved = 0;
  ObjectiveState before;
  ObjectiveState after;  // of the candidate, also when it was rejected
  // SSE_new/SSE_old + L_new/L_old; 2 means no change.
  double combined_score = 2.0;
};

// Player iff load < ideal (request = ceil(ideal - load)); resource iff
// load > ideal (overhead = floor(load - ideal)).
RoleAssignment classify_roles(const Clustering& clustering, Rational ideal);

// Each player goes to the resource whose center is nearest its own center,
// ties to the lowest resource id.
RequestRoutes route_requests(const RoleAssignment& roles,
                             const Clustering& clustering);

bool detect_conflict(std::int64_t overhead,
                     std::span<const std::int64_t> requests);

// {0, 1, ..., request - 1}.
StrategySet generate_strategy_set(std::int64_t request);

// Multiples of ns plus the largest element. ns = 1 is the identity.
StrategySet select_strategies(const StrategySet& full, std::int64_t ns);

// The `count` members of `resource` nearest to the center of `player`, ties
// to the lowest point index. The resource must keep at least one point.
std::vector<std::size_t> plan_transfer(const Dataset& dataset,
                                       const Clustering& clustering,
                                       ClusterId resource, ClusterId player,
                                       std::int64_t count);

// Builds the game for `resource` from its routed players, pruning each
// strategy set with select_strategies when `ns` is set.
LocalGame make_local_game(const Clustering& clustering, ClusterId resource,
                          std::span<const PlayerRole> players,
                          std::optional<std::int64_t> ns);

// Costs of one joint strategy. All transfers are simulated in participant
// order. For participant i
//
//   cost_i = sqrt(dSSE_i * (|load_i_after - ideal| + |load_r_after - ideal|))
//
// where r is the resource and dSSE_i = |sum of (SSE_after - SSE_before)| over
// the clusters touched by everyone else in the game: the resource (whenever
// any point moves) and each rival that receives points. SSE_after uses
// recomputed means. Joints that would leave the resource empty come back
// infeasible.
PayoffEvaluation payoff(const Dataset& dataset, const Clustering& clustering,
                        const LocalGame& game,
                        std::span<const std::size_t> joint);

// Every joint strategy of the game. Infeasible joints cost
// 1 + (largest feasible cost) for each participant.
PayoffTensor build_payoff_tensor(const Dataset& dataset,
                                 const Clustering& clustering,
                                 const LocalGame& game);

// The pure equilibrium with the lowest social cost (lowest flat index on
// ties). Without any pure equilibrium, the lowest-social-cost joint is
// returned with kind kFallbackMinSocialCost.
EquilibriumResult find_pure_nash(const PayoffTensor& tensor);

// True iff no participant can strictly lower its own cost by deviating alone.
bool is_pure_nash(const PayoffTensor& tensor, std::size_t flat);

// Performs all transfers on a copy and keeps them iff
// SSE_new/SSE_old + L_new/L_old < 2. With L_old = 0 the candidate is kept iff
// L_new = 0 and SSE_new <= SSE_old. Rejected and infeasible candidates return
// the input clustering.
ApplyOutcome apply_and_evaluate(const Dataset& dataset,
                                const Clustering& clustering,
                                std::span<const SolvedGame> games);

}  // namespace gtclust

#endif  // GTCLUST_GAME_H_
