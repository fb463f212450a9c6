#pragma once

// Continuous-time discrete-event simulation of slice requests, balking,
// reneging, admission and release.
//
// Time is continuous; one time unit is one "operations period" and every
// rate is per time unit. Metrics are measured over the window
// (warmup, horizon].
//
// Random streams: each round seed is split into independent substreams, one
// per (purpose, type): arrivals (inter-arrival time, balking draw and patience
// are drawn for every arrival whether or not they are used), lifetimes (one
// draw per admitted slice of that type, in admission order) and the initial
// state. Two runs with the same seed therefore see the same arrivals,
// patience values and per-type lifetime sequences whatever the controller
// does (common random numbers).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "slicesim/admission_controller.hpp"
#include "slicesim/slice_model.hpp"
#include "slicesim/strategy.hpp"

namespace slicesim {

enum class InitialPolicy {
    empty,           ///< s = 0
    fully_utilized,  ///< uniform over feasible states with no feasible increment
    explicit_state,  ///< SimConfig::initial_state
};

enum class ControllerKind {
    multi_queue,   ///< one queue per type, preference-matrix service
    single_queue,  ///< one FCFS queue for all types, head-of-line greedy
};

struct SimConfig {
    std::shared_ptr<const ResourceModel> model;
    std::shared_ptr<const StateSpace> space;
    std::shared_ptr<const PreferenceMatrix> strategy;  ///< required for multi_queue
    ControllerKind controller = ControllerKind::multi_queue;

    double horizon = 40.0;
    double warmup = 0.0;
    std::uint64_t seed = 1;

    InitialPolicy initial = InitialPolicy::empty;
    std::optional<SystemState> initial_state;

    bool balking = false;   ///< hyperbolic balking for types with a willingness value
    bool reneging = false;  ///< exponential patience for types with alpha > 0

    bool record_events = false;  ///< keep the full event log in the trace
};

/// Throws ValidationError describing the first problem.
void validate(const SimConfig& config);

enum class EventKind { arrival, balk, join, accept, renege, release };

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;

struct TraceEvent {
    double time = 0.0;
    EventKind kind = EventKind::arrival;
    std::size_t type = 0;
    std::uint64_t request_id = 0;  ///< 0 for releases
    SystemState s;                 ///< after the event
    std::vector<std::size_t> queue_lengths;
};

enum class Outcome { waiting, accepted, balked, reneged };

struct RequestRecord {
    std::uint64_t id = 0;
    std::size_t type = 0;
    double arrival_time = 0.0;
    std::optional<double> join_time;  ///< empty if the request balked
    std::optional<double> reneging_deadline;
    Outcome outcome = Outcome::waiting;
    double outcome_time = 0.0;  ///< horizon for requests still waiting
};

struct SimTrace {
    double window_begin = 0.0;
    double window_end = 0.0;

    std::vector<TraceEvent> events;     ///< only with record_events
    std::vector<RequestRecord> requests;  ///< every request, indexed by id - 1
    std::vector<std::vector<double>> acceptance_times;  ///< per type, inside the window

    // Time integrals over the window.
    double utility_integral = 0.0;              ///< of sum_n s_n u_n
    std::vector<double> active_integral;        ///< of s_n
    std::vector<double> queue_integral;         ///< of l_n
    std::vector<double> queue_empty_time;       ///< time with l_n = 0
    std::vector<double> state_time;             ///< per state index
    std::vector<std::vector<double>> queue_length_time;  ///< [n][l]
    std::vector<std::vector<double>> in_system_time;     ///< [n][s_n + l_n]

    std::size_t blocked_passes = 0;
};

struct OutcomeCounts {
    std::size_t arrivals = 0;
    std::size_t balked = 0;
    std::size_t reneged = 0;
    std::size_t accepted = 0;
    std::size_t waiting = 0;
};

struct MetricsReport {
    double window = 0.0;
    double mean_utility = 0.0;    ///< time average of the instantaneous utility rate
    double mean_wait = 0.0;       ///< over requests that joined in the window
    double admission_rate = 1.0;  ///< accepted / arrivals in the window
    bool admission_undefined = false;  ///< no arrivals; admission_rate reported as 1

    std::vector<double> acceptance_rate;       ///< per type, acceptances per time unit
    std::vector<double> mean_queue_length;     ///< per type
    std::vector<double> mean_active;           ///< per type, time-average s_n
    std::vector<double> queue_empty_fraction;  ///< per type, time share with l_n = 0
    std::vector<double> mean_wait_per_type;
    std::vector<OutcomeCounts> window_counts;  ///< requests arriving in the window
    std::vector<OutcomeCounts> total_counts;   ///< every request of the run
};

struct SimResult {
    SimTrace trace;
    MetricsReport metrics;
};

[[nodiscard]] SimResult run(const SimConfig& config);

/// sum_n s_n u_n.
[[nodiscard]] double instantaneous_utility(const SystemState& s, const ResourceModel& model);

/// Window metrics from a finished trace. Waits of requests still queued at
/// the horizon are censored at the horizon.
[[nodiscard]] MetricsReport overall_metrics(const SimTrace& trace);

/// Weighted average of per-queue mean waits with weights L_n.
[[nodiscard]] double weighted_mean_wait(const std::vector<double>& mean_waits,
                                        const std::vector<double>& mean_lengths);

struct MonteCarloResult {
    std::vector<std::uint64_t> seeds;     ///< per round
    std::vector<MetricsReport> reports;   ///< per round, in round order
    std::vector<std::vector<double>> pooled_iat;  ///< per type, all rounds
};

/// Seed of round `round` under `master_seed`.
[[nodiscard]] std::uint64_t round_seed(std::uint64_t master_seed, std::size_t round) noexcept;

/// Independent rounds with seeds round_seed(config.seed, i). `threads` = 0
/// uses the hardware concurrency. Results do not depend on `threads`.
[[nodiscard]] MonteCarloResult monte_carlo(const SimConfig& config, std::size_t rounds, std::size_t threads = 1);

/// Differences between consecutive times.
[[nodiscard]] std::vector<double> inter_acceptance_times(const std::vector<double>& times);

/// time,event,type,request_id,s_vector,queue_lengths
void write_trace_csv(std::ostream& os, const SimTrace& trace);

/// One row per round plus an "aggregate" row of means.
void write_metrics_csv(std::ostream& os, const std::vector<MetricsReport>& reports);

}  // namespace slicesim
