#include "gtclust/game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gtclust {

namespace {

// Guards against tensors that would not fit in memory.
constexpr std::size_t kMaxTensorEntries = std::size_t{1} << 27;

void check_cluster(const Clustering& clustering, ClusterId c,
                   const char* what) {
  if (c >= clustering.k()) {
    std::ostringstream os;
    os << what << " cluster " << c << " out of range [0, " << clustering.k()
       << ")";
    throw Error(Errc::kInvalidInput, os.str());
  }
}

// The `limit` members nearest to `target`, nearest first, ties by point
// index.
std::vector<std::size_t> nearest_order(const Dataset& dataset,
                                       std::span<const std::size_t> members,
                                       std::span<const double> target,
                                       std::size_t limit) {
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(members.size());
  for (const std::size_t i : members) {
    keyed.emplace_back(squared_distance(dataset.point(i), target), i);
  }
  limit = std::min(limit, keyed.size());
  std::partial_sort(keyed.begin(), keyed.begin() + limit, keyed.end());
  std::vector<std::size_t> out;
  out.reserve(limit);
  for (std::size_t j = 0; j < limit; ++j) out.push_back(keyed[j].second);
  return out;
}

void check_game(const Clustering& clustering, const LocalGame& game) {
  check_cluster(clustering, game.resource, "resource");
  if (game.participants.empty()) {
    throw Error(Errc::kInvalidInput, "local game has no participants");
  }
  if (game.resource_load != clustering.load(game.resource)) {
    throw Error(Errc::kInconsistentState,
                "game resource load differs from clustering");
  }
  for (std::size_t i = 0; i < game.participants.size(); ++i) {
    const Participant& p = game.participants[i];
    check_cluster(clustering, p.player, "player");
    if (p.player == game.resource) {
      throw Error(Errc::kInvalidInput, "player cannot be its own resource");
    }
    if (i > 0 && game.participants[i - 1].player >= p.player) {
      throw Error(Errc::kInvalidInput,
                  "participants must be in ascending player order");
    }
    if (p.strategies.size() == 0 || p.strategies[0] != 0 ||
        p.strategies.max() >= p.request) {
      std::ostringstream os;
      os << "strategy set of player " << p.player
         << " must start at 0 and stay below its request " << p.request;
      throw Error(Errc::kInvalidInput, os.str());
    }
  }
}

// Running sums of a point set in coordinates shifted by `origin`, so the
// SSE comes out as sumsq - |sum|^2 / n without large cancellation.
struct ShiftedSums {
  std::vector<double> sum;
  double sumsq = 0.0;
  std::int64_t count = 0;

  double sse() const {
    if (count == 0) return 0.0;
    double s2 = 0.0;
    for (const double s : sum) s2 += s * s;
    return std::max(0.0, sumsq - s2 / static_cast<double>(count));
  }
};

// Evaluates joint strategies of one game without touching the clustering.
// Taking the first t unclaimed points of a per-player distance order is the
// same as calling plan_transfer on the progressively shrinking resource.
class JointSimulator {
 public:
  JointSimulator(const Dataset& dataset, const Clustering& clustering,
                 const LocalGame& game)
      : dataset_(dataset), game_(game), dim_(dataset.dim()) {
    check_game(clustering, game);
    ideal_ = ideal_load(static_cast<std::int64_t>(dataset.size()),
                        static_cast<std::int64_t>(clustering.k()));
    resource_members_ = clustering.members(game.resource);
    resource_origin_ = clustering.center(game.resource);

    std::vector<std::size_t> slot_of(dataset.size(), 0);
    for (std::size_t s = 0; s < resource_members_.size(); ++s) {
      slot_of[resource_members_[s]] = s;
    }
    resource_sums_ = sums_of(resource_members_, resource_origin_);
    resource_sse_before_ = resource_sums_.sse();

    const std::size_t np = game.participants.size();
    // No joint can claim more than every request combined.
    std::size_t claim_bound = 0;
    for (const Participant& p : game.participants) {
      claim_bound += static_cast<std::size_t>(p.request);
    }
    order_.resize(np);
    player_sums_.resize(np);
    player_sse_before_.resize(np);
    player_origin_.resize(np);
    player_load_.resize(np);
    for (std::size_t i = 0; i < np; ++i) {
      const ClusterId p = game.participants[i].player;
      player_origin_[i] = clustering.center(p);
      player_load_[i] = clustering.load(p);
      for (const std::size_t idx :
           nearest_order(dataset, resource_members_, clustering.center(p),
                         claim_bound)) {
        order_[i].push_back(slot_of[idx]);
      }
      player_sums_[i] = sums_of(clustering.members(p), player_origin_[i]);
      player_sse_before_[i] = player_sums_[i].sse();
    }
    claimed_.assign(resource_members_.size(), 0);
    claimed_slots_.reserve(resource_members_.size());
    removed_.sum.assign(dim_, 0.0);
    recv_.sum.assign(dim_, 0.0);
    transfer_.resize(np);
    delta_.resize(np);
  }

  // Writes one cost per participant; returns false for infeasible joints.
  bool evaluate(std::span<const std::size_t> joint, std::span<double> costs) {
    const std::size_t np = game_.participants.size();
    std::fill(removed_.sum.begin(), removed_.sum.end(), 0.0);
    removed_.sumsq = 0.0;
    removed_.count = 0;
    std::int64_t remaining = game_.resource_load;
    claimed_slots_.clear();
    bool feasible = true;

    for (std::size_t i = 0; i < np && feasible; ++i) {
      const Participant& p = game_.participants[i];
      const std::int64_t t = p.request - p.strategies[joint[i]];
      transfer_[i] = t;
      if (t > remaining - 1) {
        feasible = false;
        break;
      }
      if (t == 0) {
        delta_[i] = 0.0;
        continue;
      }
      const ShiftedSums& base = player_sums_[i];
      std::copy(base.sum.begin(), base.sum.end(), recv_.sum.begin());
      recv_.sumsq = base.sumsq;
      recv_.count = base.count + t;
      std::int64_t taken = 0;
      for (std::size_t k = 0; k < order_[i].size() && taken < t; ++k) {
        const std::size_t slot = order_[i][k];
        if (claimed_[slot]) continue;
        claimed_[slot] = 1;
        claimed_slots_.push_back(slot);
        ++taken;
        const auto x = dataset_.point(resource_members_[slot]);
        double rsq = 0.0;
        double psq = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) {
          const double rd = x[d] - resource_origin_[d];
          const double pd = x[d] - player_origin_[i][d];
          removed_.sum[d] += rd;
          rsq += rd * rd;
          recv_.sum[d] += pd;
          psq += pd * pd;
        }
        removed_.sumsq += rsq;
        recv_.sumsq += psq;
      }
      removed_.count += t;
      remaining -= t;
      delta_[i] = recv_.sse() - player_sse_before_[i];
    }
    for (const std::size_t slot : claimed_slots_) claimed_[slot] = 0;
    if (!feasible) return false;

    double resource_delta = 0.0;
    if (removed_.count > 0) {
      for (std::size_t d = 0; d < dim_; ++d) {
        recv_.sum[d] = resource_sums_.sum[d] - removed_.sum[d];
      }
      recv_.sumsq = resource_sums_.sumsq - removed_.sumsq;
      recv_.count = resource_sums_.count - removed_.count;
      resource_delta = recv_.sse() - resource_sse_before_;
    }
    double total_delta = resource_delta;
    for (std::size_t i = 0; i < np; ++i) total_delta += delta_[i];

    const double resource_gap = abs_gap(ideal_, remaining);
    for (std::size_t i = 0; i < np; ++i) {
      const double rival_delta = std::abs(total_delta - delta_[i]);
      const double balance =
          abs_gap(ideal_, player_load_[i] + transfer_[i]) + resource_gap;
      costs[i] = std::sqrt(rival_delta * balance);
    }
    return true;
  }

 private:
  ShiftedSums sums_of(std::span<const std::size_t> members,
                      const Point& origin) const {
    ShiftedSums s{std::vector<double>(dim_, 0.0), 0.0,
                  static_cast<std::int64_t>(members.size())};
    for (const std::size_t idx : members) {
      const auto x = dataset_.point(idx);
      for (std::size_t d = 0; d < dim_; ++d) {
        const double v = x[d] - origin[d];
        s.sum[d] += v;
        s.sumsq += v * v;
      }
    }
    return s;
  }

  const Dataset& dataset_;
  const LocalGame& game_;
  std::size_t dim_;
  Rational ideal_;
  std::vector<std::size_t> resource_members_;
  Point resource_origin_;
  ShiftedSums resource_sums_;
  double resource_sse_before_ = 0.0;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<ShiftedSums> player_sums_;
  std::vector<double> player_sse_before_;
  std::vector<Point> player_origin_;
  std::vector<std::int64_t> player_load_;
  std::vector<char> claimed_;
  std::vector<std::int64_t> transfer_;
  std::vector<double> delta_;
  // Scratch reused across joints.
  ShiftedSums removed_;
  ShiftedSums recv_;
  std::vector<std::size_t> claimed_slots_;
};

double social_cost(const PayoffTensor& tensor, std::size_t flat) {
  double s = 0.0;
  for (std::size_t i = 0; i < tensor.participants(); ++i) {
    s += tensor.cost(flat, i);
  }
  return s;
}

}  // namespace

StrategySet::StrategySet(std::vector<std::int64_t> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw Error(Errc::kInvalidInput, "empty strategy set");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0 || (i > 0 && values_[i] <= values_[i - 1])) {
      throw Error(Errc::kInvalidInput,
                  "strategy values must be non-negative and strictly "
                  "increasing");
    }
  }
}

PayoffTensor::PayoffTensor(std::vector<std::size_t> shape,
                           std::vector<double> costs,
                           std::vector<bool> feasible)
    : shape_(std::move(shape)),
      costs_(std::move(costs)),
      feasible_(std::move(feasible)) {
  if (shape_.empty()) throw Error(Errc::kInvalidInput, "tensor has no axes");
  strides_.assign(shape_.size(), 1);
  joint_count_ = 1;
  for (std::size_t i = shape_.size(); i-- > 0;) {
    if (shape_[i] == 0) throw Error(Errc::kInvalidInput, "empty tensor axis");
    strides_[i] = joint_count_;
    joint_count_ *= shape_[i];
  }
  if (costs_.size() != joint_count_ * shape_.size() ||
      feasible_.size() != joint_count_) {
    throw Error(Errc::kStructural, "tensor entry count does not match shape");
  }
  for (const double c : costs_) {
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(Errc::kInvalidInput, "tensor costs must be finite and >= 0");
    }
  }
}

std::size_t PayoffTensor::feasible_count() const {
  return static_cast<std::size_t>(
      std::count(feasible_.begin(), feasible_.end(), true));
}

std::size_t PayoffTensor::flat_index(std::span<const std::size_t> joint) const {
  if (joint.size() != shape_.size()) {
    throw Error(Errc::kStructural, "joint strategy has wrong arity");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (joint[i] >= shape_[i]) {
      throw Error(Errc::kInvalidInput, "joint strategy index out of bounds");
    }
    flat += joint[i] * strides_[i];
  }
  return flat;
}

std::vector<std::size_t> PayoffTensor::joint_of(std::size_t flat) const {
  std::vector<std::size_t> joint(shape_.size());
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    joint[i] = (flat / strides_[i]) % shape_[i];
  }
  return joint;
}

RoleAssignment classify_roles(const Clustering& clustering, Rational ideal) {
  RoleAssignment roles;
  for (ClusterId c = 0; c < clustering.k(); ++c) {
    const std::int64_t load = clustering.load(c);
    const std::int64_t scaled = load * ideal.den;
    if (scaled < ideal.num) {
      roles.players.push_back({c, ceil_gap_below(ideal, load)});
    } else if (scaled > ideal.num) {
      roles.resources.push_back({c, floor_gap_above(ideal, load)});
    }
  }
  return roles;
}

RequestRoutes route_requests(const RoleAssignment& roles,
                             const Clustering& clustering) {
  RequestRoutes routes;
  if (roles.players.empty()) return routes;
  if (roles.resources.empty()) {
    throw Error(Errc::kInconsistentState,
                "players exist but there is no resource to serve them");
  }
  for (const PlayerRole& player : roles.players) {
    check_cluster(clustering, player.cluster, "player");
    const ResourceRole* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const ResourceRole& r : roles.resources) {
      check_cluster(clustering, r.cluster, "resource");
      const double d = squared_distance(clustering.center(player.cluster),
                                        clustering.center(r.cluster));
      // Resources are ascending, so strict < keeps the lowest id on ties.
      if (best == nullptr || d < best_d) {
        best_d = d;
        best = &r;
      }
    }
    routes[best->cluster].push_back(player);
  }
  for (auto& [resource, players] : routes) {
    std::sort(players.begin(), players.end(),
              [](const PlayerRole& a, const PlayerRole& b) {
                return a.cluster < b.cluster;
              });
  }
  return routes;
}

bool detect_conflict(std::int64_t overhead,
                     std::span<const std::int64_t> requests) {
  const std::int64_t total =
      std::accumulate(requests.begin(), requests.end(), std::int64_t{0});
  return total > overhead;
}

StrategySet generate_strategy_set(std::int64_t request) {
  if (request < 1) {
    throw Error(Errc::kInvalidInput, "request must be >= 1 for a player");
  }
  std::vector<std::int64_t> values(static_cast<std::size_t>(request));
  std::iota(values.begin(), values.end(), std::int64_t{0});
  return StrategySet(std::move(values));
}

StrategySet select_strategies(const StrategySet& full, std::int64_t ns) {
  if (ns < 1) throw Error(Errc::kInvalidInput, "ns must be >= 1");
  std::vector<std::int64_t> kept;
  for (const std::int64_t v : full.values()) {
    if (v % ns == 0) kept.push_back(v);
  }
  if (kept.empty() || kept.back() != full.max()) kept.push_back(full.max());
  return StrategySet(std::move(kept));
}

std::vector<std::size_t> plan_transfer(const Dataset& dataset,
                                       const Clustering& clustering,
                                       ClusterId resource, ClusterId player,
                                       std::int64_t count) {
  check_cluster(clustering, resource, "resource");
  check_cluster(clustering, player, "player");
  if (count < 0) throw Error(Errc::kInvalidInput, "negative transfer count");
  if (count > clustering.load(resource) - 1) {
    std::ostringstream os;
    os << "cannot move " << count << " of " << clustering.load(resource)
       << " points out of cluster " << resource;
    throw Error(Errc::kInfeasibleTransfer, os.str());
  }
  if (count == 0) return {};
  return nearest_order(dataset, clustering.members(resource),
                       clustering.center(player),
                       static_cast<std::size_t>(count));
}

LocalGame make_local_game(const Clustering& clustering, ClusterId resource,
                          std::span<const PlayerRole> players,
                          std::optional<std::int64_t> ns) {
  check_cluster(clustering, resource, "resource");
  LocalGame game;
  game.resource = resource;
  game.resource_load = clustering.load(resource);
  game.selection_granularity = ns;
  for (const PlayerRole& p : players) {
    StrategySet s = generate_strategy_set(p.request);
    if (ns) s = select_strategies(s, *ns);
    game.participants.push_back({p.cluster, p.request, std::move(s)});
  }
  std::sort(game.participants.begin(), game.participants.end(),
            [](const Participant& a, const Participant& b) {
              return a.player < b.player;
            });
  return game;
}

PayoffEvaluation payoff(const Dataset& dataset, const Clustering& clustering,
                        const LocalGame& game,
                        std::span<const std::size_t> joint) {
  if (joint.size() != game.participants.size()) {
    throw Error(Errc::kStructural, "joint strategy has wrong arity");
  }
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint[i] >= game.participants[i].strategies.size()) {
      throw Error(Errc::kInvalidInput, "joint strategy index out of bounds");
    }
  }
  JointSimulator sim(dataset, clustering, game);
  PayoffEvaluation out;
  out.costs.assign(joint.size(), 0.0);
  out.feasible = sim.evaluate(joint, out.costs);
  if (!out.feasible) out.costs.clear();
  return out;
}

PayoffTensor build_payoff_tensor(const Dataset& dataset,
                                 const Clustering& clustering,
                                 const LocalGame& game) {
  JointSimulator sim(dataset, clustering, game);
  const std::size_t np = game.participants.size();
  std::vector<std::size_t> shape;
  std::size_t joints = 1;
  for (const Participant& p : game.participants) {
    shape.push_back(p.strategies.size());
    joints *= p.strategies.size();
    if (joints * np > kMaxTensorEntries) {
      throw Error(Errc::kInvalidInput, "payoff tensor too large");
    }
  }

  std::vector<double> costs(joints * np, 0.0);
  std::vector<bool> feasible(joints, false);
  std::vector<std::size_t> joint(np, 0);
  double max_feasible = 0.0;
  for (std::size_t flat = 0; flat < joints; ++flat) {
    std::span<double> out(costs.data() + flat * np, np);
    if (sim.evaluate(joint, out)) {
      feasible[flat] = true;
      for (const double c : out) max_feasible = std::max(max_feasible, c);
    }
    for (std::size_t i = np; i-- > 0;) {
      if (++joint[i] < shape[i]) break;
      joint[i] = 0;
    }
  }
  const double sentinel = 1.0 + max_feasible;
  for (std::size_t flat = 0; flat < joints; ++flat) {
    if (feasible[flat]) continue;
    std::fill_n(costs.begin() + static_cast<std::ptrdiff_t>(flat * np), np,
                sentinel);
  }
  return PayoffTensor(std::move(shape), std::move(costs), std::move(feasible));
}

bool is_pure_nash(const PayoffTensor& tensor, std::size_t flat) {
  for (std::size_t i = 0; i < tensor.participants(); ++i) {
    const std::size_t stride = tensor.stride(i);
    const std::size_t own = (flat / stride) % tensor.shape()[i];
    const std::size_t base = flat - own * stride;
    const double current = tensor.cost(flat, i);
    for (std::size_t s = 0; s < tensor.shape()[i]; ++s) {
      if (tensor.cost(base + s * stride, i) < current) return false;
    }
  }
  return true;
}

EquilibriumResult find_pure_nash(const PayoffTensor& tensor) {
  const std::size_t joints = tensor.joint_count();
  const std::size_t np = tensor.participants();

  // Best response value along every axis line, stored at the line's base.
  std::vector<char> stable(joints, 1);
  std::vector<double> line_min(joints);
  for (std::size_t i = 0; i < np; ++i) {
    const std::size_t stride = tensor.stride(i);
    const std::size_t extent = tensor.shape()[i];
    std::fill(line_min.begin(), line_min.end(),
              std::numeric_limits<double>::infinity());
    for (std::size_t flat = 0; flat < joints; ++flat) {
      const std::size_t base = flat - ((flat / stride) % extent) * stride;
      line_min[base] = std::min(line_min[base], tensor.cost(flat, i));
    }
    for (std::size_t flat = 0; flat < joints; ++flat) {
      const std::size_t base = flat - ((flat / stride) % extent) * stride;
      if (tensor.cost(flat, i) > line_min[base]) stable[flat] = 0;
    }
  }

  std::size_t best_ne = joints;
  double best_ne_cost = std::numeric_limits<double>::infinity();
  std::size_t best_any = 0;
  double best_any_cost = std::numeric_limits<double>::infinity();
  for (std::size_t flat = 0; flat < joints; ++flat) {
    const double sc = social_cost(tensor, flat);
    if (sc < best_any_cost) {
      best_any_cost = sc;
      best_any = flat;
    }
    if (stable[flat] && sc < best_ne_cost) {
      best_ne_cost = sc;
      best_ne = flat;
    }
  }
  if (best_ne < joints) {
    return {tensor.joint_of(best_ne), EquilibriumKind::kPureNash};
  }
  return {tensor.joint_of(best_any), EquilibriumKind::kFallbackMinSocialCost};
}

ApplyOutcome apply_and_evaluate(const Dataset& dataset,
                                const Clustering& clustering,
                                std::span<const SolvedGame> games) {
  ApplyOutcome out(clustering);
  out.before = evaluate(dataset, clustering);
  out.after = out.before;

  std::vector<ClusterId> assignment = clustering.assignment();
  std::vector<std::int64_t> loads = clustering.loads();
  for (const SolvedGame& sg : games) {
    const LocalGame& game = sg.game;
    check_game(clustering, game);
    if (sg.equilibrium.joint.size() != game.participants.size()) {
      throw Error(Errc::kStructural, "equilibrium arity differs from game");
    }
    for (std::size_t i = 0; i < game.participants.size(); ++i) {
      const Participant& p = game.participants[i];
      const std::size_t s = sg.equilibrium.joint[i];
      if (s >= p.strategies.size()) {
        throw Error(Errc::kInvalidInput, "equilibrium index out of bounds");
      }
      const std::int64_t count = p.request - p.strategies[s];
      if (count > loads[game.resource] - 1) {
        out.rolled_back_infeasible = true;
        return out;
      }
      if (count == 0) continue;
      std::vector<std::size_t> members;
      for (std::size_t idx = 0; idx < assignment.size(); ++idx) {
        if (assignment[idx] == game.resource) members.push_back(idx);
      }
      const auto order =
          nearest_order(dataset, members, clustering.center(p.player),
                        static_cast<std::size_t>(count));
      for (std::int64_t m = 0; m < count; ++m) {
        assignment[order[static_cast<std::size_t>(m)]] = p.player;
      }
      loads[game.resource] -= count;
      loads[p.player] += count;
      out.points_moved += count;
    }
  }
  if (out.points_moved == 0) return out;

  Clustering candidate(dataset, clustering.k(), std::move(assignment),
                       clustering.centers());
  out.after = evaluate(dataset, candidate);
  const double inf = std::numeric_limits<double>::infinity();
  const double sse_term =
      out.before.sse > 0.0 ? out.after.sse / out.before.sse
                           : (out.after.sse == 0.0 ? 1.0 : inf);
  bool accept = false;
  if (out.before.load_metric == 0.0) {
    out.combined_score = sse_term + (out.after.load_metric == 0.0 ? 1.0 : inf);
    accept = out.after.load_metric == 0.0 && out.after.sse <= out.before.sse;
  } else {
    out.combined_score =
        sse_term + out.after.load_metric / out.before.load_metric;
    accept = out.combined_score < 2.0;
  }
  if (accept) {
    out.accepted = true;
    out.clustering = std::move(candidate);
  }
  return out;
}

}  // namespace gtclust
