#include "gtclust/drivers.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gtclust/fairness.h"
#include "gtclust/kmeans.h"

namespace gtclust {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Rational ideal_for(const Dataset& dataset, std::size_t k) {
  return ideal_load(static_cast<std::int64_t>(dataset.size()),
                    static_cast<std::int64_t>(k));
}

void check_config(const Dataset& dataset, const RunConfig& config,
                  std::span<const Point> centers) {
  if (config.k < 1 || config.k > dataset.size()) {
    throw Error(Errc::kInvalidConfiguration, "k must be in [1, n]");
  }
  if (centers.size() != config.k) {
    throw Error(Errc::kInvalidConfiguration, "center count differs from k");
  }
  if (config.ns && *config.ns < 1) {
    throw Error(Errc::kInvalidConfiguration, "ns must be >= 1 when set");
  }
  if (config.max_outer_iterations < 1) {
    throw Error(Errc::kInvalidConfiguration,
                "max_outer_iterations must be >= 1");
  }
}

RunReport start_report(const RunConfig& config) {
  RunReport r;
  r.algorithm = config.algorithm;
  r.ns = config.ns;
  r.k = config.k;
  r.seed = config.seed;
  return r;
}

struct StrategyTally {
  std::size_t count = 0;
  std::size_t samples = 0;
};

void absorb(RunReport& report, StrategyTally& tally, GamePhase& phase) {
  for (GameRecord& g : phase.games) {
    report.payoff_entry_counts.push_back(g.payoff_entries);
    report.games.push_back(std::move(g));
  }
  report.games_played += phase.games.size();
  tally.count += phase.strategy_count;
  tally.samples += phase.strategy_samples;
}

void finish_report(const Dataset& dataset, RunReport& report,
                   const StrategyTally& tally, const Clustering& final_cl) {
  report.final_state = evaluate(dataset, final_cl);
  report.improvement = improvement(report.initial, report.final_state);
  report.avg_strategies_per_player =
      tally.samples == 0 ? 0.0
                         : static_cast<double>(tally.count) /
                               static_cast<double>(tally.samples);
  report.final_assignment = final_cl.assignment();
}

IterationTrace trace_of(std::size_t iteration, const GamePhase& phase) {
  const ObjectiveState& pre = phase.outcome.before;
  IterationTrace t;
  t.iteration = iteration;
  t.games = phase.games.size();
  t.reallocation_attempted = true;
  t.accepted = phase.outcome.accepted;
  t.rolled_back = phase.outcome.rolled_back_infeasible;
  t.points_moved = phase.outcome.points_moved;
  t.pre_game = pre;
  t.end = phase.outcome.accepted ? phase.outcome.after : pre;
  t.combined_score = phase.outcome.combined_score;
  return t;
}

}  // namespace

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGtkMeans: return "gtkmeans";
    case Algorithm::kPkGame: return "pkgame";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "gtkmeans") return Algorithm::kGtkMeans;
  if (name == "pkgame") return Algorithm::kPkGame;
  return std::nullopt;
}

std::size_t RunReport::total_payoff_entries() const {
  std::size_t total = 0;
  for (const std::size_t c : payoff_entry_counts) total += c;
  return total;
}

ObjectiveState starting_state(const Dataset& dataset,
                              std::span<const Point> centers) {
  if (centers.empty()) throw Error(Errc::kInvalidInput, "no centers given");
  std::vector<std::int64_t> loads(centers.size(), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto p = dataset.point(i);
    if (p.size() != centers[0].size()) {
      throw Error(Errc::kStructural, "center dimension does not match dataset");
    }
    std::size_t best = 0;
    double best_d = squared_distance(p, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double d = squared_distance(p, centers[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    ++loads[best];
    total += best_d;
  }
  const Rational ideal = ideal_for(dataset, centers.size());
  return ObjectiveState{total, load_metric(loads, ideal), ideal};
}

bool is_equipartitioned(const Clustering& clustering, Rational ideal) {
  for (const std::int64_t load : clustering.loads()) {
    // |load - num/den| < 1  <=>  |load*den - num| < den
    const std::int64_t gap = load * ideal.den - ideal.num;
    if ((gap < 0 ? -gap : gap) >= ideal.den) return false;
  }
  return true;
}

GamePhase play_game_phase(const Dataset& dataset, const Clustering& clustering,
                          std::optional<std::int64_t> ns,
                          std::size_t iteration) {
  const Rational ideal = ideal_for(dataset, clustering.k());
  const RoleAssignment roles = classify_roles(clustering, ideal);
  const RequestRoutes routes = route_requests(roles, clustering);

  std::vector<GameRecord> records;
  std::size_t strategy_count = 0;
  std::size_t strategy_samples = 0;
  std::vector<SolvedGame> solved;
  for (const auto& [resource, players] : routes) {
    std::int64_t overhead = 0;
    for (const ResourceRole& r : roles.resources) {
      if (r.cluster == resource) overhead = r.overhead;
    }
    std::vector<std::int64_t> requests;
    for (const PlayerRole& p : players) requests.push_back(p.request);

    if (!detect_conflict(overhead, requests)) {
      // Enough overhead: every request is granted in full.
      SolvedGame grant;
      grant.game.resource = resource;
      grant.game.resource_load = clustering.load(resource);
      for (const PlayerRole& p : players) {
        grant.game.participants.push_back(
            {p.cluster, p.request, StrategySet({0})});
      }
      grant.equilibrium.joint.assign(players.size(), 0);
      solved.push_back(std::move(grant));
      continue;
    }

    LocalGame game = make_local_game(clustering, resource, players, ns);
    const PayoffTensor tensor = build_payoff_tensor(dataset, clustering, game);
    EquilibriumResult eq = find_pure_nash(tensor);

    GameRecord rec;
    rec.iteration = iteration;
    rec.resource = resource;
    rec.payoff_entries = tensor.joint_count();
    rec.feasible_entries = tensor.feasible_count();
    rec.kind = eq.kind;
    for (const Participant& p : game.participants) {
      rec.strategy_set_sizes.push_back(p.strategies.size());
      strategy_count += p.strategies.size();
      ++strategy_samples;
    }
    records.push_back(std::move(rec));
    solved.push_back({std::move(game), std::move(eq)});
  }
  return GamePhase{apply_and_evaluate(dataset, clustering, solved),
                   std::move(records), strategy_count, strategy_samples};
}

RunReport run_gtkmeans(const Dataset& dataset, const RunConfig& config) {
  const auto centers =
      init_centers(dataset, KMeansConfig{config.k, config.seed, 1});
  return run_gtkmeans(dataset, config, centers);
}

RunReport run_gtkmeans(const Dataset& dataset, const RunConfig& config,
                       std::span<const Point> centers) {
  check_config(dataset, config, centers);
  const auto start = Clock::now();
  RunReport report = start_report(config);
  report.algorithm = Algorithm::kGtkMeans;
  const Rational ideal = ideal_for(dataset, config.k);
  StrategyTally tally;
  report.initial = starting_state(dataset, centers);

  std::vector<Point> current_centers(centers.begin(), centers.end());
  std::optional<Clustering> end_state;
  for (std::size_t it = 1; it <= config.max_outer_iterations; ++it) {
    Clustering step = lloyd_iteration(dataset, current_centers);

    IterationTrace trace;
    Clustering end = std::move(step);
    if (is_equipartitioned(end, ideal)) {
      trace.iteration = it;
      trace.balanced = true;
      trace.pre_game = evaluate(dataset, end);
      trace.end = trace.pre_game;
    } else {
      GamePhase phase = play_game_phase(dataset, end, config.ns, it);
      trace = trace_of(it, phase);
      ++report.game_phases;
      end = std::move(phase.outcome.clustering);
      absorb(report, tally, phase);
    }
    report.trace.push_back(trace);
    report.outer_iterations = it;

    // An unchanged end-of-iteration assignment means the next iteration
    // would start from the same centers and repeat this one exactly.
    const bool stable = end_state && end.assignment() == end_state->assignment();
    current_centers = end.centers();
    end_state = std::move(end);
    if (stable) break;
  }
  finish_report(dataset, report, tally, *end_state);
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run_pkgame(const Dataset& dataset, const RunConfig& config) {
  const auto centers =
      init_centers(dataset, KMeansConfig{config.k, config.seed, 1});
  return run_pkgame(dataset, config, centers);
}

RunReport run_pkgame(const Dataset& dataset, const RunConfig& config,
                     std::span<const Point> centers) {
  check_config(dataset, config, centers);
  const auto start = Clock::now();
  RunReport report = start_report(config);
  report.algorithm = Algorithm::kPkGame;
  const Rational ideal = ideal_for(dataset, config.k);
  StrategyTally tally;

  report.initial = starting_state(dataset, centers);
  LloydResult converged =
      lloyd_full(dataset, centers, config.max_outer_iterations);
  report.lloyd_full_calls = 1;

  Clustering end = converged.clustering;
  IterationTrace trace;
  if (is_equipartitioned(converged.clustering, ideal)) {
    trace.iteration = 1;
    trace.balanced = true;
    trace.pre_game = evaluate(dataset, converged.clustering);
    trace.end = trace.pre_game;
  } else {
    GamePhase phase =
        play_game_phase(dataset, converged.clustering, config.ns, 1);
    trace = trace_of(1, phase);
    report.game_phases = 1;
    end = phase.outcome.clustering;
    absorb(report, tally, phase);
  }
  report.trace.push_back(trace);
  report.outer_iterations = 1;
  finish_report(dataset, report, tally, end);
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run(const Dataset& dataset, const RunConfig& config,
              std::span<const Point> centers) {
  return config.algorithm == Algorithm::kGtkMeans
             ? run_gtkmeans(dataset, config, centers)
             : run_pkgame(dataset, config, centers);
}

ComparisonRow summarize(std::span<const RunReport> runs) {
  ComparisonRow row;
  if (runs.empty()) return row;
  row.algorithm = runs.front().algorithm;
  row.ns = runs.front().ns;
  row.k = runs.front().k;
  row.runs = runs.size();

  double jain_sum = 0.0;
  double gmi_sum = 0.0;
  std::size_t defined = 0;
  for (const RunReport& r : runs) {
    row.mean_wall_time_s += r.wall_time_s;
    row.mean_strategies_per_player += r.avg_strategies_per_player;
    row.mean_payoff_entries += static_cast<double>(r.total_payoff_entries());
    row.mean_games_played += static_cast<double>(r.games_played);
    row.mean_outer_iterations += static_cast<double>(r.outer_iterations);
    row.mean_sse_improvement_pct += r.improvement.sse_improvement_pct;
    row.mean_l_improvement_pct += r.improvement.l_improvement_pct;

    const double raw[2] = {r.improvement.sse_improvement_pct,
                           r.improvement.l_improvement_pct};
    const auto clamped = clamp_improvements(raw);
    if (clamped[0] > 0.0 || clamped[1] > 0.0) {
      jain_sum += jain_index(clamped);
      gmi_sum += geometric_mean_index(clamped);
      ++defined;
    }
  }
  const double n = static_cast<double>(runs.size());
  row.mean_wall_time_s /= n;
  row.mean_strategies_per_player /= n;
  row.mean_payoff_entries /= n;
  row.mean_games_played /= n;
  row.mean_outer_iterations /= n;
  row.mean_sse_improvement_pct /= n;
  row.mean_l_improvement_pct /= n;

  const double means[2] = {row.mean_sse_improvement_pct,
                           row.mean_l_improvement_pct};
  const auto clamped = clamp_improvements(means);
  if (clamped[0] > 0.0 || clamped[1] > 0.0) {
    row.jain_index = jain_index(clamped);
    row.geometric_mean_index = geometric_mean_index(clamped);
  }
  if (defined > 0) {
    row.mean_run_jain_index = jain_sum / static_cast<double>(defined);
    row.mean_run_geometric_mean_index = gmi_sum / static_cast<double>(defined);
  }
  return row;
}

Comparison paired_compare(const Dataset& dataset, std::size_t k,
                          std::span<const std::uint64_t> seeds,
                          std::span<const Variant> variants,
                          const CompareOptions& options) {
  if (seeds.empty()) throw Error(Errc::kInvalidConfiguration, "no seeds");
  if (variants.empty()) throw Error(Errc::kInvalidConfiguration, "no variants");

  std::vector<std::vector<Point>> starts;
  starts.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    starts.push_back(init_centers(dataset, KMeansConfig{k, seed, 1}));
  }

  const std::size_t tasks = seeds.size() * variants.size();
  std::vector<std::optional<RunReport>> slots(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const std::size_t v = t / seeds.size();
      const std::size_t s = t % seeds.size();
      try {
        RunConfig cfg{k, variants[v].ns, seeds[s], options.max_outer_iterations,
                      variants[v].algorithm};
        slots[t] = run(dataset, cfg, starts[s]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, tasks);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  Comparison out;
  out.raw.reserve(tasks);
  for (auto& slot : slots) out.raw.push_back(std::move(*slot));
  for (std::size_t v = 0; v < variants.size(); ++v) {
    out.rows.push_back(summarize(std::span<const RunReport>(
        out.raw.data() + v * seeds.size(), seeds.size())));
  }
  return out;
}

}  // namespace gtclust
