#pragma once

// Strategy evaluation through a Markov chain over the feasibility space.
//
// Queue-empty probabilities p_n(0) are inputs (closed forms, or measured in
// simulation); nothing here computes them.
//
// Two constructions:
//  - paper_literal: one service opportunity per step resolved by the
//    preference-product formula; no releases, so the chain is absorbing at
//    the boundary of the admissibility region.
//  - with_releases (default): a uniformized chain of the continuous-time
//    process. Each step is a release of type n (weight eta_n s_n), a service
//    opportunity, or nothing, with a common total rate so that the
//    stationary vector is the time-average state distribution.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slicesim/slice_model.hpp"
#include "slicesim/strategy.hpp"

namespace slicesim {

/// Row-stochastic matrix with sparse rows.
class TransitionMatrix {
public:
    using Entry = std::pair<std::size_t, double>;

    TransitionMatrix() = default;
    explicit TransitionMatrix(std::size_t size) : rows_(size) {}
    /// From a dense square matrix; zeros are dropped.
    explicit TransitionMatrix(const std::vector<std::vector<double>>& dense);

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<Entry>& row(std::size_t i) const { return rows_.at(i); }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const;
    [[nodiscard]] std::vector<std::vector<double>> dense() const;

    /// Adds `p` to entry (i, j), merging with an existing entry.
    void add(std::size_t i, std::size_t j, double p);

    /// x * Psi for a row vector x.
    [[nodiscard]] std::vector<double> left_multiply(std::span<const double> x) const;

    /// Throws NumericError unless entries are >= 0 and each row sums to 1
    /// within `tol`.
    void check_stochastic(double tol = 1e-12) const;

private:
    std::vector<std::vector<Entry>> rows_;
};

/// Probability that the opportunity at `state_index` accepts a request of
/// type `type_number` (1-based; 0 = nothing accepted, a self-loop):
/// prod_{k < pos(n)} p_{phi_k}(0) * (1 - p_n(0)) over the extended column,
/// with p_0(0) = 0. A type whose increment leaves the feasibility space gets 0
/// and its mass is added to the self-loop. Sums to 1 over n = 0..N.
[[nodiscard]] double transition_probability(const PreferenceMatrix& strategy, const StateSpace& space,
                                            std::span<const double> p_empty, std::size_t state_index,
                                            std::size_t type_number);

enum class TransitionMode { paper_literal, with_releases };

enum class OpportunityModel {
    /// Opportunities at one pooled rate, each resolved by
    /// transition_probability with the measured p_n(0).
    pooled,
    /// An opportunity is an arrival: a type-m arrival is accepted iff type m
    /// is served (listed before 0) and fits in the current state. Between
    /// events no waiting request can be served, so the other queues do not
    /// take part.
    arrival_conditioned,
};

struct TransitionOptions {
    TransitionMode mode = TransitionMode::with_releases;
    OpportunityModel opportunities = OpportunityModel::arrival_conditioned;
    /// Pooled opportunity rate; defaults to sum_n lambda_n.
    std::optional<double> opportunity_rate;
    /// After a release, the freed resources are offered to the queues:
    /// queue n is taken as nonempty with probability 1 - p_n(0) and the
    /// preference product picks the accepted type, skipping types that do
    /// not fit.
    bool serve_after_release = true;
    /// Keep serving after an acceptance until nothing more is accepted.
    bool cascade = false;
};

/// Throws ValidationError for malformed inputs, NumericError if a row fails
/// to normalize.
[[nodiscard]] TransitionMatrix build_transition_matrix(const ResourceModel& model, const PreferenceMatrix& strategy,
                                                       const StateSpace& space, std::span<const double> p_empty,
                                                       const TransitionOptions& options = {});

enum class LongTermMethod {
    /// (1/(K+1)) sum_{k=0}^{K} P_init Psi^k, stopped when successive
    /// averages differ by less than the tolerance in L1.
    cesaro,
    /// Powers of the lazy chain (I + Psi)/2. Same limit as the Cesaro
    /// average (also for periodic and reducible chains) with geometric
    /// instead of 1/K convergence.
    lazy_power,
};

struct LongTermOptions {
    LongTermMethod method = LongTermMethod::lazy_power;
    double tolerance = 1e-10;
    std::size_t max_iterations = 1'000'000;
};

struct StateDistribution {
    std::vector<double> probabilities;  ///< over the feasibility space
    bool converged = false;
    std::size_t iterations = 0;
    double last_change = 0.0;  ///< L1 change in the last iteration
};

/// Never fails silently: a run hitting max_iterations returns the current
/// estimate with converged = false.
[[nodiscard]] StateDistribution long_term_distribution(const TransitionMatrix& psi, std::span<const double> p_init,
                                                       const LongTermOptions& options = {});

/// Point mass on one state.
[[nodiscard]] std::vector<double> point_mass(std::size_t size, std::size_t index);

/// s_bar_n = sum_s Prob(s) s_n.
[[nodiscard]] std::vector<double> expected_slice_counts(std::span<const double> distribution,
                                                        const StateSpace& space);

/// mu_n = eta_n s_bar_n.
[[nodiscard]] std::vector<double> estimate_acceptance_rates(std::span<const double> distribution,
                                                            const StateSpace& space,
                                                            std::span<const double> release_rates);

/// sum_n mu_n u_n / eta_n.
[[nodiscard]] double estimate_mean_utility(std::span<const double> acceptance_rates,
                                           std::span<const double> release_rates,
                                           std::span<const double> utility_rates);

}  // namespace slicesim
