#include "slicesim/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "slicesim/csv.hpp"
#include "slicesim/error.hpp"
#include "slicesim/parallel.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

namespace {

StrategyScore score_runs(const MonteCarloResult& mc, std::size_t num_types) {
    const std::size_t rounds = mc.reports.size();
    std::vector<double> u(rounds), w(rounds), a(rounds);
    StrategyScore score;
    score.rounds = rounds;
    score.acceptance_rate.assign(num_types, 0.0);
    score.queue_empty_fraction.assign(num_types, 0.0);
    for (std::size_t i = 0; i < rounds; ++i) {
        const auto& r = mc.reports[i];
        u[i] = r.mean_utility;
        w[i] = r.mean_wait;
        a[i] = r.admission_rate;
        for (std::size_t n = 0; n < num_types; ++n) {
            score.acceptance_rate[n] += r.acceptance_rate[n] / static_cast<double>(rounds);
            score.queue_empty_fraction[n] += r.queue_empty_fraction[n] / static_cast<double>(rounds);
        }
    }
    score.utility = summarize(u);
    score.mean_wait = summarize(w);
    score.admission = summarize(a);
    return score;
}

std::vector<int> flatten(const PreferenceMatrix& m) {
    std::vector<int> out;
    out.reserve(m.num_columns() * (m.num_types() + 1));
    for (const auto& c : m.columns()) out.insert(out.end(), c.entries().begin(), c.entries().end());
    return out;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
    switch (metric) {
        case Metric::utility: return "utility";
        case Metric::mean_wait: return "mean_wait";
        case Metric::admission: return "admission";
    }
    return "unknown";
}

MetricSummary summarize(std::span<const double> values) {
    if (values.empty()) throw ContractViolation("cannot summarize an empty sample");
    const double n = static_cast<double>(values.size());
    MetricSummary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
}

double StrategyScore::objective(Metric metric) const noexcept {
    switch (metric) {
        case Metric::utility: return utility.mean;
        case Metric::mean_wait: return -mean_wait.mean;
        case Metric::admission: return admission.mean;
    }
    return 0.0;
}

SimConfig Evaluator::sim_config(ControllerKind kind) const {
    if (!model || !space) throw ValidationError("evaluator needs a model and a state space");
    if (settings.rounds == 0) throw ValidationError("Monte-Carlo rounds must be >= 1");
    SimConfig cfg;
    cfg.model = model;
    cfg.space = space;
    cfg.controller = kind;
    cfg.horizon = settings.horizon;
    cfg.warmup = settings.warmup;
    cfg.seed = settings.seed;
    cfg.initial = settings.initial;
    cfg.balking = settings.balking;
    cfg.reneging = settings.reneging;
    return cfg;
}

StrategyScore evaluate_strategy(const Evaluator& ev, const PreferenceMatrix& strategy) {
    SimConfig cfg = ev.sim_config(ControllerKind::multi_queue);
    cfg.strategy = std::make_shared<const PreferenceMatrix>(strategy);
    return score_runs(monte_carlo(cfg, ev.settings.rounds, ev.settings.threads), ev.model->num_types());
}

StrategyScore greedy_single_queue_baseline(const Evaluator& ev) {
    const SimConfig cfg = ev.sim_config(ControllerKind::single_queue);
    StrategyScore s = score_runs(monte_carlo(cfg, ev.settings.rounds, ev.settings.threads), ev.model->num_types());
    s.label = "greedy-single-queue";
    return s;
}

std::uint64_t sweep_strategy_seed(std::uint64_t master_seed, std::size_t index) noexcept {
    // Offset keeps strategy seeds apart from the Monte-Carlo round seeds.
    return derive_seed(derive_seed(master_seed, 0x5eed), index);
}

std::vector<StrategyScore> random_sweep(const Evaluator& ev, std::size_t count, std::uint64_t master_seed,
                                        std::size_t threads) {
    if (count == 0) throw ValidationError("sweep count must be >= 1");
    std::vector<StrategyScore> scores(count);
    Evaluator inner = ev;
    inner.settings.threads = 1;
    parallel_for(count, threads, [&](std::size_t i) {
        const std::uint64_t seed = sweep_strategy_seed(master_seed, i);
        StrategyScore s = evaluate_strategy(inner, random_strategy(*ev.space, seed));
        s.index = i;
        s.strategy_seed = seed;
        scores[i] = std::move(s);
    });
    return scores;
}

std::vector<std::size_t> rank_by(std::span<const StrategyScore> scores, Metric metric) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a].objective(metric) > scores[b].objective(metric);
    });
    return order;
}

SearchResult local_search(const Evaluator& ev, const PreferenceMatrix& start, std::size_t budget, Metric metric,
                          std::uint64_t search_seed) {
    if (auto err = validate(start, *ev.space)) throw ValidationError("start strategy: " + *err);
    Rng rng(search_seed);
    std::map<std::vector<int>, StrategyScore> seen;
    SearchResult result;

    auto score_of = [&](const PreferenceMatrix& m, bool& fresh) -> const StrategyScore& {
        auto key = flatten(m);
        auto it = seen.find(key);
        fresh = it == seen.end();
        if (fresh) it = seen.emplace(std::move(key), evaluate_strategy(ev, m)).first;
        return it->second;
    };

    // Summation order differs between strategies, so ties in the objective
    // are only equal up to rounding.
    auto better = [metric](const StrategyScore& a, const StrategyScore& b) {
        const double x = a.objective(metric);
        const double y = b.objective(metric);
        return x > y + 1e-12 * std::max(1.0, std::abs(y));
    };

    bool fresh = false;
    PreferenceMatrix current = start;
    StrategyScore current_score = score_of(current, fresh);
    result.best_strategy = current;
    result.trajectory.push_back({0, current_score});

    const std::size_t columns = start.num_columns();
    const std::size_t width = start.num_types() + 1;
    std::vector<std::array<std::size_t, 3>> moves;
    for (std::size_t c = 0; c < columns; ++c) {
        for (std::size_t i = 0; i < width; ++i) {
            for (std::size_t j = i + 1; j < width; ++j) moves.push_back({c, i, j});
        }
    }
    // A tiny strategy space can be exhausted before the budget; stop after
    // this many restarts that find nothing new.
    std::size_t stale_restarts = 0;
    while (result.evaluations < budget && !moves.empty() && stale_restarts < 100) {
        for (std::size_t k = moves.size(); k > 1; --k) std::swap(moves[k - 1], moves[rng.below(k)]);
        bool improved = false;
        bool any_fresh = false;
        for (const auto& [c, i, j] : moves) {
            if (result.evaluations >= budget) break;
            std::vector<int> entries = current.column(c).entries();
            std::swap(entries[i], entries[j]);
            PreferenceMatrix neighbor = current;
            neighbor.set_column(c, PreferenceVector(std::move(entries)));
            const StrategyScore& s = score_of(neighbor, fresh);
            if (!fresh) continue;
            any_fresh = true;
            ++result.evaluations;
            if (better(s, current_score)) {
                current = std::move(neighbor);
                current_score = s;
                improved = true;
                break;
            }
        }
        if (better(current_score, result.trajectory.back().best)) {
            result.best_strategy = current;
            result.trajectory.push_back({result.evaluations, current_score});
        }
        if (improved) continue;
        // Local optimum: restart from a random strategy.
        stale_restarts = any_fresh ? 0 : stale_restarts + 1;
        if (result.evaluations >= budget) break;
        current = random_strategy(*ev.space, rng.next_u64());
        current_score = score_of(current, fresh);
        if (fresh) {
            ++result.evaluations;
            stale_restarts = 0;
            if (better(current_score, result.trajectory.back().best)) {
                result.best_strategy = current;
                result.trajectory.push_back({result.evaluations, current_score});
            }
        }
    }
    return result;
}

void write_scores_csv(std::ostream& os, std::span<const StrategyScore> scores) {
    CsvWriter csv(os);
    csv.row({"index", "seed", "u_mean", "u_ci", "Wq_mean", "Wq_ci", "PA_mean", "PA_ci"});
    for (const auto& s : scores) {
        csv.field(s.index)
            .field(static_cast<unsigned long long>(s.strategy_seed))
            .field(s.utility.mean)
            .field(s.utility.half_width)
            .field(s.mean_wait.mean)
            .field(s.mean_wait.half_width)
            .field(s.admission.mean)
            .field(s.admission.half_width);
        csv.end_row();
    }
}

}  // namespace slicesim
