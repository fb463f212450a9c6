#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slicesim/error.hpp"
#include "slicesim/markov_steady_state.hpp"

using namespace slicesim;

namespace {

struct CaseStudy {
    ResourceModel model{{1.0}, {{0.6, 0.2}}, {SliceType{1.0, 1.0, 1.0, 0, {}}, SliceType{1.0, 1.0, 1.0, 0, {}}}};
    StateSpace space = enumerate_state_space(model);
};

PreferenceMatrix constant(const StateSpace& space, PreferenceVector v) {
    return PreferenceMatrix(space.num_types(), std::vector<PreferenceVector>(space.num_admissible(), v));
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("transition probabilities from the preference product") {
    CaseStudy cs;
    const std::size_t zero = *cs.space.index_of(SystemState{0, 0});
    const std::vector<double> p{0.3, 0.6};

    const auto reserve = constant(cs.space, PreferenceVector{0, 1, 2});
    CHECK(transition_probability(reserve, cs.space, p, zero, 0) == 1.0);
    CHECK(transition_probability(reserve, cs.space, p, zero, 1) == 0.0);

    const auto m = constant(cs.space, PreferenceVector{1, 2, 0});
    CHECK(transition_probability(m, cs.space, p, zero, 1) == doctest::Approx(0.7));
    CHECK(transition_probability(m, cs.space, p, zero, 2) == doctest::Approx(0.3 * 0.4));
    CHECK(transition_probability(m, cs.space, p, zero, 0) == doctest::Approx(0.3 * 0.6));

    const std::vector<double> busy{0.0, 0.0};
    CHECK(transition_probability(m, cs.space, busy, zero, 1) == 1.0);
    CHECK(transition_probability(m, cs.space, busy, zero, 2) == 0.0);

    // From [1,1] type 1 does not fit: its mass stays on the self-loop.
    const std::size_t s11 = *cs.space.index_of(SystemState{1, 1});
    CHECK(transition_probability(m, cs.space, busy, s11, 1) == 0.0);
    CHECK(transition_probability(m, cs.space, busy, s11, 0) == 1.0);

    // Boundary states are absorbing for acceptance transitions.
    const std::size_t s12 = *cs.space.index_of(SystemState{1, 2});
    CHECK(transition_probability(m, cs.space, p, s12, 0) == 1.0);
}

TEST_CASE("transition probabilities sum to one") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto model = testing::random_model(seed, 1 + seed % 3, 1 + (seed / 3) % 3);
        const StateSpace space = enumerate_state_space(model);
        if (space.num_admissible() == 0) continue;
        const auto strategy = random_strategy(space, seed);
        std::mt19937_64 gen(seed);
        std::vector<double> p(model.num_types());
        for (auto& x : p) x = std::uniform_real_distribution<double>(0, 1)(gen);
        for (std::size_t i = 0; i < space.size(); ++i) {
            double total = 0.0;
            for (std::size_t n = 0; n <= model.num_types(); ++n) {
                const double v = transition_probability(strategy, space, p, i, n);
                CHECK(v >= 0.0);
                total += v;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("single-state space") {
    const ResourceModel model({0.0}, {{0.5}}, {SliceType{}});
    const StateSpace space = enumerate_state_space(model);
    const PreferenceMatrix none(1, {});
    for (auto mode : {TransitionMode::paper_literal, TransitionMode::with_releases}) {
        TransitionOptions o;
        o.mode = mode;
        const auto psi = build_transition_matrix(model, none, space, std::vector<double>{0.5}, o);
        REQUIRE(psi.size() == 1);
        CHECK(psi.at(0, 0) == 1.0);
    }
}

TEST_CASE("paper-literal mode") {
    CaseStudy cs;
    TransitionOptions o;
    o.mode = TransitionMode::paper_literal;
    const auto m = constant(cs.space, PreferenceVector{1, 2, 0});
    const auto psi = build_transition_matrix(cs.model, m, cs.space, std::vector<double>{0.0, 0.0}, o);
    const std::size_t zero = *cs.space.index_of(SystemState{0, 0});
    CHECK(psi.at(zero, *cs.space.index_of(SystemState{1, 0})) == 1.0);
    CHECK(psi.row(zero).size() == 1);
    psi.check_stochastic();
    // Only acceptance edges and self-loops.
    for (std::size_t i = 0; i < psi.size(); ++i) {
        for (const auto& [j, v] : psi.row(i)) {
            if (j == i) continue;
            const SystemState& a = cs.space.state(i);
            const SystemState& b = cs.space.state(j);
            CHECK(b.total() == a.total() + 1);
        }
    }
}

TEST_CASE("two-state chain by hand") {
    // One slice fits. From [0] an arrival (rate lambda) is admitted; from [1]
    // a release (rate eta) frees the slot, which a waiting request refills
    // with probability 1 - p0. Uniformized at lambda + eta.
    const double lambda = 0.5, eta = 1.0, p0 = 0.6;
    const ResourceModel model({1.0}, {{1.0}}, {SliceType{lambda, eta, 1.0, 0.0, {}}});
    const StateSpace space = enumerate_state_space(model);
    REQUIRE(space.size() == 2);
    const auto m = naive_strategy(NaiveKind::greedy_order, space);
    const double r = lambda + eta;

    const auto psi = build_transition_matrix(model, m, space, std::vector<double>{p0});
    CHECK(psi.at(0, 1) == doctest::Approx(lambda / r).epsilon(1e-14));
    CHECK(psi.at(0, 0) == doctest::Approx(1 - lambda / r).epsilon(1e-14));
    CHECK(psi.at(1, 0) == doctest::Approx(eta * p0 / r).epsilon(1e-14));
    CHECK(psi.at(1, 1) == doctest::Approx(1 - eta * p0 / r).epsilon(1e-14));

    TransitionOptions o;
    o.serve_after_release = false;
    const auto plain = build_transition_matrix(model, m, space, std::vector<double>{p0}, o);
    CHECK(plain.at(1, 0) == doctest::Approx(eta / r).epsilon(1e-14));

    const auto dist = long_term_distribution(psi, point_mass(2, 0));
    CHECK(dist.converged);
    CHECK(dist.probabilities[1] == doctest::Approx(lambda / (lambda + eta * p0)).epsilon(1e-9));
}

TEST_CASE("every construction is row-stochastic") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto model = testing::random_model(seed, 1 + seed % 3, 1 + (seed / 3) % 3);
        const StateSpace space = enumerate_state_space(model);
        if (space.num_admissible() == 0) continue;
        const auto strategy = random_strategy(space, seed);
        std::mt19937_64 gen(seed);
        std::vector<double> p(model.num_types());
        for (auto& x : p) x = std::uniform_real_distribution<double>(0, 1)(gen);
        for (auto mode : {TransitionMode::paper_literal, TransitionMode::with_releases}) {
            for (auto opp : {OpportunityModel::pooled, OpportunityModel::arrival_conditioned}) {
                for (bool after : {false, true}) {
                    for (bool cascade : {false, true}) {
                        TransitionOptions o{mode, opp, std::nullopt, after, cascade};
                        const auto psi = build_transition_matrix(model, strategy, space, p, o);
                        CHECK_NOTHROW(psi.check_stochastic(1e-12));
                    }
                }
            }
        }
    }
}

TEST_CASE("input validation") {
    CaseStudy cs;
    const auto m = constant(cs.space, PreferenceVector{1, 2, 0});
    CHECK_THROWS_AS((void)build_transition_matrix(cs.model, m, cs.space, std::vector<double>{0.5}), ValidationError);
    CHECK_THROWS_AS((void)build_transition_matrix(cs.model, m, cs.space, std::vector<double>{0.5, 1.5}),
                    ValidationError);
    TransitionMatrix bad(std::vector<std::vector<double>>{{0.5, 0.4}, {0.0, 1.0}});
    CHECK_THROWS_AS(bad.check_stochastic(), NumericError);
}

TEST_CASE("long-term distribution") {
    const TransitionMatrix flip(std::vector<std::vector<double>>{{0, 1}, {1, 0}});
    for (auto method : {LongTermMethod::cesaro, LongTermMethod::lazy_power}) {
        LongTermOptions o;
        o.method = method;
        // Cesaro averages converge like 1/k, so their change test is looser.
        const bool cesaro = method == LongTermMethod::cesaro;
        o.tolerance = cesaro ? 1e-6 : 1e-10;
        const double accuracy = cesaro ? 1e-3 : 1e-6;
        const auto d = long_term_distribution(flip, std::vector<double>{1, 0}, o);
        CHECK(d.converged);
        CHECK(d.probabilities[0] == doctest::Approx(0.5).epsilon(1e-6));

        const TransitionMatrix id(std::vector<std::vector<double>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
        const std::vector<double> init{0.2, 0.3, 0.5};
        const auto same = long_term_distribution(id, init, o);
        for (std::size_t i = 0; i < 3; ++i) CHECK(same.probabilities[i] == doctest::Approx(init[i]));

        const std::vector<std::vector<double>> p{{0.5, 0.3, 0.2}, {0.1, 0.6, 0.3}, {0.4, 0.1, 0.5}};
        const auto oracle = testing::stationary_by_solve(p);
        const auto d3 = long_term_distribution(TransitionMatrix(p), std::vector<double>{1, 0, 0}, o);
        CHECK(d3.converged);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(d3.probabilities[i] - oracle[i]) < accuracy);
    }

    LongTermOptions capped;
    capped.method = LongTermMethod::cesaro;
    capped.max_iterations = 3;
    const auto d = long_term_distribution(flip, std::vector<double>{1, 0}, capped);
    CHECK_FALSE(d.converged);
    CHECK(d.iterations == 3);
    CHECK(sum(d.probabilities) == doctest::Approx(1.0));

    CHECK_THROWS_AS((void)long_term_distribution(flip, std::vector<double>{0.5, 0.4}), ValidationError);
}

TEST_CASE("stationary vector of the default chain on random models") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto model = testing::random_model(seed, 1 + seed % 2, 1 + seed % 3);
        const StateSpace space = enumerate_state_space(model);
        if (space.size() > 200 || space.num_admissible() == 0) continue;
        const auto strategy = naive_strategy(NaiveKind::greedy_order, space);
        std::vector<double> p(model.num_types(), 0.5);
        const auto psi = build_transition_matrix(model, strategy, space, p);
        const auto d = long_term_distribution(psi, point_mass(space.size(), 0));
        CHECK(d.converged);
        CHECK(sum(d.probabilities) == doctest::Approx(1.0).epsilon(1e-9));
        for (double x : d.probabilities) CHECK(x >= 0.0);
        const auto oracle = testing::stationary_by_solve(psi.dense());
        for (std::size_t i = 0; i < space.size(); ++i) CHECK(std::abs(d.probabilities[i] - oracle[i]) < 1e-7);
    }
}

TEST_CASE("estimators") {
    std::vector<SliceType> types(2);
    types[0] = {2.0, 0.2, 1.0, 1.0, 0.02};
    types[1] = {0.5, 0.5, 10.0, 1.0, 0.02};
    const ResourceModel model({1.0, 1.0}, {{0.01, 0.2}, {0.05, 0.04}}, types);
    const StateSpace space = enumerate_state_space(model);
    const std::vector<double> eta{0.2, 0.5}, u{1.0, 10.0};

    const auto zero = point_mass(space.size(), *space.index_of(SystemState{0, 0}));
    const auto mu0 = estimate_acceptance_rates(zero, space, eta);
    CHECK(mu0 == std::vector<double>{0.0, 0.0});
    CHECK(estimate_mean_utility(mu0, eta, u) == 0.0);

    const auto at21 = point_mass(space.size(), *space.index_of(SystemState{2, 1}));
    const auto mu = estimate_acceptance_rates(at21, space, eta);
    CHECK(mu[0] == doctest::Approx(0.4));
    CHECK(mu[1] == doctest::Approx(0.5));
    CHECK(estimate_mean_utility(mu, eta, u) == doctest::Approx(12.0));
    const auto sbar = expected_slice_counts(at21, space);
    CHECK(mu[0] / eta[0] == doctest::Approx(sbar[0]));
    CHECK(mu[1] / eta[1] == doctest::Approx(sbar[1]));
}
