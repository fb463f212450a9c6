#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "slicesim/error.hpp"
#include "slicesim/sim_engine.hpp"

using namespace slicesim;

namespace {

struct Setup {
    std::shared_ptr<const ResourceModel> model;
    std::shared_ptr<const StateSpace> space;
    std::shared_ptr<const PreferenceMatrix> strategy;

    explicit Setup(ResourceModel m)
        : model(std::make_shared<const ResourceModel>(std::move(m))),
          space(std::make_shared<const StateSpace>(enumerate_state_space(*model))),
          strategy(std::make_shared<const PreferenceMatrix>(naive_strategy(NaiveKind::greedy_order, *space))) {}

    [[nodiscard]] SimConfig config(double horizon, std::uint64_t seed = 1) const {
        SimConfig c;
        c.model = model;
        c.space = space;
        c.strategy = strategy;
        c.horizon = horizon;
        c.seed = seed;
        return c;
    }
};

ResourceModel single_type(double lambda, double eta, double cost, double alpha = 0.0,
                          std::optional<double> beta = std::nullopt) {
    return ResourceModel({1.0}, {{cost}}, {SliceType{lambda, eta, 1.0, alpha, beta}});
}

ResourceModel two_type_model() {
    std::vector<SliceType> types(2);
    types[0] = {2.0, 0.2, 1.0, 1.0, 0.02};
    types[1] = {0.5, 0.5, 10.0, 1.0, 0.02};
    return ResourceModel({1.0, 1.0}, {{0.01, 0.2}, {0.05, 0.04}}, types);
}

}  // namespace

TEST_CASE("no arrivals") {
    const Setup s(ResourceModel({1.0}, {{0.5, 0.2}}, {SliceType{0.0, 1.0, 1.0, 0.0, {}}, SliceType{0.0, 1.0, 2.0, 0.0, {}}}));
    auto cfg = s.config(40.0);
    cfg.record_events = true;
    const SimResult r = run(cfg);
    CHECK(r.trace.events.empty());
    CHECK(r.trace.requests.empty());
    CHECK(r.metrics.mean_utility == 0.0);
    CHECK(r.metrics.admission_rate == 1.0);
    CHECK(r.metrics.admission_undefined);
    CHECK(r.metrics.mean_wait == 0.0);
}

TEST_CASE("no contention: every request accepted on arrival") {
    const Setup s(single_type(1.0, 1.0, 0.001));
    auto cfg = s.config(200.0, 5);
    const SimResult r = run(cfg);
    CHECK(r.trace.requests.size() > 100);
    CHECK(r.metrics.mean_wait == 0.0);
    CHECK(r.metrics.admission_rate == 1.0);
    CHECK_FALSE(r.metrics.admission_undefined);
    CHECK(r.metrics.mean_queue_length[0] == 0.0);
    CHECK(r.metrics.queue_empty_fraction[0] == 1.0);
}

TEST_CASE("instantaneous utility") {
    const auto m = two_type_model();
    CHECK(instantaneous_utility(SystemState{0, 0}, m) == 0.0);
    CHECK(instantaneous_utility(SystemState{2, 1}, m) == 12.0);
    const ResourceModel zero({1.0}, {{0.1, 0.1}}, {SliceType{1, 1, 0, 0, {}}, SliceType{1, 1, 0, 0, {}}});
    CHECK(instantaneous_utility(SystemState{3, 4}, zero) == 0.0);
}

TEST_CASE("weighted mean wait") {
    CHECK(weighted_mean_wait({1.0, 3.0}, {2.0, 2.0}) == 2.0);
    CHECK(weighted_mean_wait({1.0, 3.0}, {1.0, 3.0}) == 2.5);
    CHECK(weighted_mean_wait({1.0}, {0.0}) == 0.0);
    CHECK_THROWS_AS((void)weighted_mean_wait({1.0}, {1.0, 2.0}), ContractViolation);
}

TEST_CASE("metrics of a synthetic trace") {
    SimTrace t;
    t.window_begin = 0.0;
    t.window_end = 10.0;
    t.acceptance_times = {{}};
    t.active_integral = {5.0};
    t.queue_integral = {2.0};
    t.queue_empty_time = {8.0};
    t.utility_integral = 5.0;
    for (std::uint64_t i = 1; i <= 10; ++i) {
        RequestRecord r;
        r.id = i;
        r.arrival_time = static_cast<double>(i) - 0.5;
        r.join_time = r.arrival_time;
        r.outcome = i <= 7 ? Outcome::accepted : Outcome::reneged;
        r.outcome_time = r.arrival_time + (i <= 7 ? 0.0 : 1.0);
        t.requests.push_back(r);
        if (i <= 7) t.acceptance_times[0].push_back(r.outcome_time);
    }
    const MetricsReport m = overall_metrics(t);
    CHECK(m.admission_rate == doctest::Approx(0.7));
    CHECK(m.mean_wait == doctest::Approx(0.3));
    CHECK(m.mean_utility == 0.5);
    CHECK(m.acceptance_rate[0] == doctest::Approx(0.7));
    CHECK(m.mean_queue_length[0] == doctest::Approx(0.2));
    CHECK(m.queue_empty_fraction[0] == doctest::Approx(0.8));
    CHECK(m.window_counts[0].reneged == 3);

    // Requests that arrived before the window do not count.
    t.window_begin = 5.0;
    const MetricsReport w = overall_metrics(t);
    CHECK(w.window_counts[0].arrivals == 5);
    CHECK(w.total_counts[0].arrivals == 10);
    CHECK(w.admission_rate == doctest::Approx(0.4));
}

TEST_CASE("config validation") {
    const Setup s(single_type(1.0, 1.0, 0.5));
    auto cfg = s.config(10.0);
    cfg.warmup = 10.0;
    CHECK_THROWS_AS((void)run(cfg), ValidationError);
    cfg = s.config(10.0);
    cfg.initial = InitialPolicy::explicit_state;
    cfg.initial_state = SystemState{3};
    CHECK_THROWS_AS((void)run(cfg), ValidationError);
    cfg.initial_state = SystemState{2};
    CHECK_NOTHROW((void)run(cfg));
    cfg = s.config(10.0);
    cfg.strategy = nullptr;
    CHECK_THROWS_AS((void)run(cfg), ValidationError);
    cfg.controller = ControllerKind::single_queue;
    CHECK_NOTHROW((void)run(cfg));
}

TEST_CASE("fully utilized start lies on the boundary") {
    const Setup s(two_type_model());
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto cfg = s.config(1e-9, seed);
        cfg.initial = InitialPolicy::fully_utilized;
        const SimResult r = run(cfg);
        std::size_t occupied = 0;
        for (std::size_t i = 0; i < r.trace.state_time.size(); ++i) {
            if (r.trace.state_time[i] > 0) {
                ++occupied;
                CHECK_FALSE(s.space->is_admissible_index(i));
            }
        }
        CHECK(occupied == 1);
    }
}

TEST_CASE("determinism and thread independence") {
    const Setup s(two_type_model());
    auto cfg = s.config(40.0, 11);
    cfg.initial = InitialPolicy::fully_utilized;
    cfg.balking = true;
    cfg.reneging = true;
    const SimResult a = run(cfg);
    const SimResult b = run(cfg);
    CHECK(a.metrics.mean_utility == b.metrics.mean_utility);
    CHECK(a.trace.requests.size() == b.trace.requests.size());

    const MonteCarloResult one = monte_carlo(cfg, 1);
    auto single = cfg;
    single.seed = round_seed(cfg.seed, 0);
    const SimResult direct = run(single);
    CHECK(one.reports[0].mean_utility == direct.metrics.mean_utility);
    CHECK(one.reports[0].admission_rate == direct.metrics.admission_rate);

    const MonteCarloResult serial = monte_carlo(cfg, 6, 1);
    const MonteCarloResult threaded = monte_carlo(cfg, 6, 3);
    CHECK(serial.seeds == threaded.seeds);
    CHECK(serial.pooled_iat == threaded.pooled_iat);
    for (std::size_t i = 0; i < 6; ++i) CHECK(serial.reports[i].mean_utility == threaded.reports[i].mean_utility);
}

TEST_CASE("common random numbers across controllers") {
    const Setup s(two_type_model());
    auto cfg = s.config(40.0, 3);
    cfg.initial = InitialPolicy::fully_utilized;
    const SimResult multi = run(cfg);
    cfg.controller = ControllerKind::single_queue;
    const SimResult single = run(cfg);
    REQUIRE(multi.trace.requests.size() == single.trace.requests.size());
    for (std::size_t i = 0; i < multi.trace.requests.size(); ++i) {
        CHECK(multi.trace.requests[i].arrival_time == single.trace.requests[i].arrival_time);
        CHECK(multi.trace.requests[i].type == single.trace.requests[i].type);
    }
}

TEST_CASE("trace invariants on random models") {
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        const std::size_t n_types = 1 + seed % 3;
        const auto model = testing::random_model(seed, 1 + (seed / 3) % 3, n_types);
        Setup s(model);
        s.strategy = std::make_shared<const PreferenceMatrix>(random_strategy(*s.space, seed));
        auto cfg = s.config(30.0, seed);
        cfg.record_events = true;
        cfg.balking = seed % 2 == 0;
        cfg.reneging = seed % 4 < 2;
        cfg.initial = seed % 3 == 0 ? InitialPolicy::empty : InitialPolicy::fully_utilized;
        cfg.controller = seed % 5 == 0 ? ControllerKind::single_queue : ControllerKind::multi_queue;
        const SimResult r = run(cfg);
        const SimTrace& t = r.trace;

        std::map<std::uint64_t, bool> joined;
        double last = 0.0;
        for (const auto& e : t.events) {
            CHECK(e.time >= last);
            last = e.time;
            CHECK(s.space->contains(e.s));
            if (e.kind == EventKind::join) joined[e.request_id] = true;
            if (e.kind == EventKind::accept) CHECK(joined.count(e.request_id) == 1);
        }

        std::vector<std::vector<std::pair<double, double>>> accepted(n_types);
        for (const auto& q : t.requests) {
            CHECK(q.outcome_time >= q.arrival_time);
            if (q.outcome == Outcome::reneged) {
                REQUIRE(q.reneging_deadline.has_value());
                CHECK(q.outcome_time == *q.reneging_deadline);
            }
            if (q.outcome == Outcome::accepted) accepted[q.type].emplace_back(*q.join_time, q.outcome_time);
        }
        // FCFS within each type (multi-queue only; mixed queues are FCFS per queue).
        if (cfg.controller == ControllerKind::multi_queue) {
            for (const auto& v : accepted) {
                for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i].second >= v[i - 1].second);
            }
        }
        for (const auto& c : r.metrics.total_counts) {
            CHECK(c.arrivals == c.balked + c.reneged + c.accepted + c.waiting);
        }

        double expected = 0.0;
        for (std::size_t n = 0; n < n_types; ++n) expected += model.type(n).utility_rate * r.metrics.mean_active[n];
        CHECK(r.metrics.mean_utility == doctest::Approx(expected).epsilon(1e-12));
        const double total_time = std::accumulate(t.state_time.begin(), t.state_time.end(), 0.0);
        CHECK(total_time == doctest::Approx(cfg.horizon - cfg.warmup).epsilon(1e-12));
        CHECK(r.metrics.admission_rate >= 0.0);
        CHECK(r.metrics.admission_rate <= 1.0);
    }
}

TEST_CASE("utility rate agrees with acceptance rates over a long run") {
    const Setup s(two_type_model());
    auto cfg = s.config(3000.0, 2);
    cfg.warmup = 100.0;
    const SimResult r = run(cfg);
    double from_rates = 0.0;
    for (std::size_t n = 0; n < 2; ++n) {
        const auto& type = s.model->type(n);
        from_rates += r.metrics.acceptance_rate[n] * type.utility_rate / type.release_rate;
    }
    CHECK(std::abs(r.metrics.mean_utility - from_rates) / from_rates < 0.05);
}

TEST_CASE("Little's law on a single contended queue") {
    const Setup s(single_type(0.8, 1.0, 1.0));
    auto cfg = s.config(20000.0, 9);
    cfg.warmup = 100.0;
    const SimResult r = run(cfg);
    const double lambda_hat = static_cast<double>(r.metrics.window_counts[0].arrivals) / r.metrics.window;
    CHECK(r.metrics.mean_queue_length[0] ==
          doctest::Approx(lambda_hat * r.metrics.mean_wait).epsilon(0.03));
    // M/M/1 with rho = 0.8: Lq = rho^2 / (1 - rho) = 3.2.
    CHECK(r.metrics.mean_queue_length[0] == doctest::Approx(3.2).epsilon(0.2));
}

TEST_CASE("inter-acceptance times") {
    CHECK(inter_acceptance_times({1.0, 3.0, 6.0}) == std::vector<double>{2.0, 3.0});
    CHECK(inter_acceptance_times({1.0}).empty());
    CHECK(inter_acceptance_times({}).empty());
}

TEST_CASE("csv exports") {
    const Setup s(single_type(1.0, 1.0, 0.5));
    auto cfg = s.config(5.0, 4);
    cfg.record_events = true;
    const auto mc = monte_carlo(cfg, 3);
    std::ostringstream metrics;
    write_metrics_csv(metrics, mc.reports);
    const std::string text = metrics.str();
    CHECK(text.rfind("round,mean_utility,mean_wait,admission_rate,admission_undefined,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(text.find("\naggregate,") != std::string::npos);

    const SimResult r = run(cfg);
    std::ostringstream trace;
    write_trace_csv(trace, r.trace);
    const std::string tt = trace.str();
    CHECK(tt.rfind("time,event,type,request_id,s_vector,queue_lengths\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(tt.begin(), tt.end(), '\n')) == r.trace.events.size() + 1);
}
