#include <benchmark/benchmark.h>

#include <memory>

#include "slicesim/markov_steady_state.hpp"
#include "slicesim/optimizer.hpp"
#include "slicesim/queue_analytics.hpp"
#include "slicesim/sim_engine.hpp"
#include "slicesim/stat_fit.hpp"

using namespace slicesim;

namespace {

std::shared_ptr<const ResourceModel> scenario(double scale) {
    std::vector<SliceType> types(2);
    types[0] = {2.0 * scale, 0.2, 1.0, 1.0, 0.02};
    types[1] = {0.5 * scale, 0.5, 10.0, 1.0, 0.02};
    return std::make_shared<const ResourceModel>(
        ResourceModel({1.0, 1.0}, {{0.01, 0.2}, {0.05, 0.04}}, types));
}

SimConfig config(double scale, double horizon) {
    SimConfig c;
    c.model = scenario(scale);
    c.space = std::make_shared<const StateSpace>(enumerate_state_space(*c.model));
    c.strategy = std::make_shared<const PreferenceMatrix>(random_strategy(*c.space, 7));
    c.horizon = horizon;
    c.initial = InitialPolicy::fully_utilized;
    c.balking = c.reneging = true;
    return c;
}

void BM_enumerate(benchmark::State& state) {
    const auto model = scenario(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_state_space(*model));
}
BENCHMARK(BM_enumerate);

void BM_simulate(benchmark::State& state) {
    SimConfig c = config(double(state.range(0)), 1000.0);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        c.seed = seed++;
        benchmark::DoNotOptimize(run(c));
    }
}
BENCHMARK(BM_simulate)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_transition_matrix(benchmark::State& state) {
    const SimConfig c = config(1.0, 1.0);
    const std::vector<double> p_empty{0.6, 0.8};
    for (auto _ : state) benchmark::DoNotOptimize(build_transition_matrix(*c.model, *c.strategy, *c.space, p_empty));
}
BENCHMARK(BM_transition_matrix)->Unit(benchmark::kMicrosecond);

void BM_long_term(benchmark::State& state) {
    const SimConfig c = config(1.0, 1.0);
    const auto psi = build_transition_matrix(*c.model, *c.strategy, *c.space, std::vector<double>{0.6, 0.8});
    const auto init = point_mass(c.space->size(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(long_term_distribution(psi, init));
}
BENCHMARK(BM_long_term)->Unit(benchmark::kMillisecond);

void BM_impatient_pmf(benchmark::State& state) {
    const QueueParams p{2.0, 1.0, 0.5, 0.8};
    for (auto _ : state) benchmark::DoNotOptimize(impatient_queue_pmf_table(p));
}
BENCHMARK(BM_impatient_pmf);

void BM_wait_means(benchmark::State& state) {
    const QueueParams p{1.0, 1.0, 1.0, 0.8};
    for (auto _ : state) benchmark::DoNotOptimize(wait_means(p));
}
BENCHMARK(BM_wait_means)->Unit(benchmark::kMillisecond);

void BM_geometric_fit(benchmark::State& state) {
    SimConfig c = config(1.0, 4000.0);
    const auto mc = monte_carlo(c, 1);
    for (auto _ : state) {
        const EmpiricalPmf pmf(mc.pooled_iat[0], 1.0);
        benchmark::DoNotOptimize(kld_vs_geometric(pmf, fit_geometric(pmf)));
    }
}
BENCHMARK(BM_geometric_fit);

}  // namespace

BENCHMARK_MAIN();
