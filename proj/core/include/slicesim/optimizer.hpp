#pragma once

// Monte-Carlo scoring of strategies, random sweeps, local search and the
// greedy single-queue baseline.
//
// Every evaluation with the same MonteCarloSettings uses the same round
// seeds, so different strategies (and the baseline) see identical arrival,
// patience and lifetime streams.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "slicesim/sim_engine.hpp"
#include "slicesim/slice_model.hpp"
#include "slicesim/strategy.hpp"

namespace slicesim {

struct MonteCarloSettings {
    std::size_t rounds = 20;
    double horizon = 40.0;
    double warmup = 0.0;
    std::uint64_t seed = 1;
    InitialPolicy initial = InitialPolicy::fully_utilized;
    bool balking = false;
    bool reneging = false;
    std::size_t threads = 1;  ///< per evaluation; sweeps parallelize over strategies instead
};

enum class Metric { utility, mean_wait, admission };

[[nodiscard]] std::string_view to_string(Metric metric) noexcept;

struct MetricSummary {
    double mean = 0.0;
    double half_width = 0.0;  ///< 1.96 s / sqrt(rounds); 0 for one round
};

[[nodiscard]] MetricSummary summarize(std::span<const double> values);

struct StrategyScore {
    std::size_t index = 0;            ///< position in a sweep
    std::uint64_t strategy_seed = 0;  ///< random_strategy seed, 0 if not random
    std::string label;                ///< scenario or strategy tag
    std::size_t rounds = 0;
    MetricSummary utility;    ///< mean utility rate
    MetricSummary mean_wait;  ///< mean queueing time of joining requests
    MetricSummary admission;  ///< accepted / arrived
    std::vector<double> acceptance_rate;       ///< per type, mean over rounds
    std::vector<double> queue_empty_fraction;  ///< per type, mean over rounds

    /// Larger is better for every metric (mean_wait is negated).
    [[nodiscard]] double objective(Metric metric) const noexcept;
};

/// The model, its state space and the Monte-Carlo settings shared by a
/// series of evaluations.
struct Evaluator {
    std::shared_ptr<const ResourceModel> model;
    std::shared_ptr<const StateSpace> space;
    MonteCarloSettings settings;

    [[nodiscard]] SimConfig sim_config(ControllerKind kind) const;
};

[[nodiscard]] StrategyScore evaluate_strategy(const Evaluator& ev, const PreferenceMatrix& strategy);

/// Greedy single FCFS queue for all types with head-of-line blocking.
[[nodiscard]] StrategyScore greedy_single_queue_baseline(const Evaluator& ev);

/// Seed of strategy `index` in a sweep under `master_seed`.
[[nodiscard]] std::uint64_t sweep_strategy_seed(std::uint64_t master_seed, std::size_t index) noexcept;

/// `count` random strategies with seeds sweep_strategy_seed(master_seed, i),
/// evaluated on up to `threads` workers. Results are in index order.
[[nodiscard]] std::vector<StrategyScore> random_sweep(const Evaluator& ev, std::size_t count,
                                                      std::uint64_t master_seed, std::size_t threads = 1);

/// Indices of `scores` sorted best first on `metric` (ties by index).
[[nodiscard]] std::vector<std::size_t> rank_by(std::span<const StrategyScore> scores, Metric metric);

struct SearchStep {
    std::size_t evaluation = 0;  ///< evaluations spent so far (0 = start)
    StrategyScore best;          ///< best so far
};

struct SearchResult {
    PreferenceMatrix best_strategy;
    std::vector<SearchStep> trajectory;  ///< best-so-far, non-decreasing objective
    std::size_t evaluations = 0;
};

/// First-improvement hill climbing over neighbors that swap two entries of
/// one column, restarting from a random strategy at local optima until
/// `budget` distinct strategies have been evaluated. Identical strategies are
/// never evaluated twice.
[[nodiscard]] SearchResult local_search(const Evaluator& ev, const PreferenceMatrix& start, std::size_t budget,
                                        Metric metric = Metric::utility, std::uint64_t search_seed = 1);

/// One row per strategy:
/// index,seed,u_mean,u_ci,Wq_mean,Wq_ci,PA_mean,PA_ci
void write_scores_csv(std::ostream& os, std::span<const StrategyScore> scores);

}  // namespace slicesim
