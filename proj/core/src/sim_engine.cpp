#include "slicesim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "slicesim/csv.hpp"
#include "slicesim/error.hpp"
#include "slicesim/parallel.hpp"
#include "slicesim/queue_analytics.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

namespace {

enum class Pending : std::uint8_t { arrival, release, renege };

struct ScheduledEvent {
    double time;
    std::uint64_t seq;  // insertion order breaks exact time ties
    Pending kind;
    std::size_t type;
    std::uint64_t request;
};

struct Later {
    bool operator()(const ScheduledEvent& a, const ScheduledEvent& b) const noexcept {
        return a.time > b.time || (a.time == b.time && a.seq > b.seq);
    }
};

enum StreamPurpose : std::uint64_t { kArrivals = 1, kLifetimes = 2, kInitial = 3 };

std::string join_counts(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(v[i]);
    }
    return out;
}

void add_at(std::vector<double>& hist, std::size_t bin, double dt) {
    if (hist.size() <= bin) hist.resize(bin + 1, 0.0);
    hist[bin] += dt;
}

class Simulation {
public:
    explicit Simulation(const SimConfig& cfg)
        : cfg_(cfg), model_(*cfg.model), space_(*cfg.space), num_types_(model_.num_types()) {
        for (std::size_t n = 0; n < num_types_; ++n) {
            arrival_rng_.emplace_back(derive_seed(derive_seed(cfg.seed, kArrivals), n));
            lifetime_rng_.emplace_back(derive_seed(derive_seed(cfg.seed, kLifetimes), n));
        }
        trace_.window_begin = cfg.warmup;
        trace_.window_end = cfg.horizon;
        trace_.acceptance_times.resize(num_types_);
        trace_.active_integral.assign(num_types_, 0.0);
        trace_.queue_integral.assign(num_types_, 0.0);
        trace_.queue_empty_time.assign(num_types_, 0.0);
        trace_.state_time.assign(space_.size(), 0.0);
        trace_.queue_length_time.resize(num_types_);
        trace_.in_system_time.resize(num_types_);
    }

    SimTrace run() {
        SystemState initial = initial_state();
        if (cfg_.controller == ControllerKind::multi_queue) {
            controller_ = std::make_unique<MultiQueueController>(space_, *cfg_.strategy, initial);
        } else {
            controller_ = std::make_unique<MixedFifoController>(space_, initial, 1);
        }
        for (std::size_t n = 0; n < num_types_; ++n) {
            for (int k = 0; k < initial[n]; ++k) schedule_release(0.0, n);
            if (model_.type(n).arrival_rate > 0.0) {
                push(arrival_rng_[n].exponential(model_.type(n).arrival_rate), Pending::arrival, n, 0);
            }
        }

        while (!pending_.empty() && pending_.top().time <= cfg_.horizon) {
            const ScheduledEvent ev = pending_.top();
            pending_.pop();
            advance(ev.time);
            switch (ev.kind) {
                case Pending::arrival: on_arrival(ev.time, ev.type); break;
                case Pending::release: on_release(ev.time, ev.type); break;
                case Pending::renege: on_renege(ev.time, ev.type, ev.request); break;
            }
        }
        advance(cfg_.horizon);
        for (auto& r : trace_.requests) {
            if (r.outcome == Outcome::waiting) r.outcome_time = cfg_.horizon;
        }
        return std::move(trace_);
    }

private:
    SystemState initial_state() {
        switch (cfg_.initial) {
            case InitialPolicy::empty: return SystemState(num_types_);
            case InitialPolicy::explicit_state: return *cfg_.initial_state;
            case InitialPolicy::fully_utilized: {
                auto boundary = space_.boundary();
                if (boundary.empty()) return SystemState(num_types_);
                Rng rng(derive_seed(cfg_.seed, kInitial));
                return boundary[rng.below(boundary.size())];
            }
        }
        return SystemState(num_types_);
    }

    void push(double time, Pending kind, std::size_t type, std::uint64_t request) {
        if (time > cfg_.horizon) return;
        pending_.push({time, seq_++, kind, type, request});
    }

    void schedule_release(double now, std::size_t type) {
        // Drawn even when the release falls beyond the horizon so that the
        // per-type lifetime sequence depends only on the admission order.
        const double life = lifetime_rng_[type].exponential(model_.type(type).release_rate);
        push(now + life, Pending::release, type, 0);
    }

    void advance(double t) {
        const double a = std::max(last_time_, trace_.window_begin);
        const double b = std::min(t, trace_.window_end);
        if (b > a) {
            const double dt = b - a;
            const SystemState& s = controller_->state();
            trace_.utility_integral += dt * instantaneous_utility(s, model_);
            for (std::size_t n = 0; n < num_types_; ++n) {
                const std::size_t l = controller_->waiting(n);
                trace_.active_integral[n] += dt * s[n];
                trace_.queue_integral[n] += dt * static_cast<double>(l);
                if (l == 0) trace_.queue_empty_time[n] += dt;
                add_at(trace_.queue_length_time[n], l, dt);
                add_at(trace_.in_system_time[n], l + static_cast<std::size_t>(s[n]), dt);
            }
            trace_.state_time[*space_.index_of(s)] += dt;
        }
        last_time_ = std::max(last_time_, t);
    }

    bool in_window(double t) const { return t >= trace_.window_begin && t <= trace_.window_end; }

    std::vector<std::size_t> queue_lengths() const {
        std::vector<std::size_t> q(num_types_);
        for (std::size_t n = 0; n < num_types_; ++n) q[n] = controller_->waiting(n);
        return q;
    }

    void log(double t, EventKind kind, std::size_t type, std::uint64_t id, const SystemState& s,
             const std::vector<std::size_t>& q) {
        if (cfg_.record_events) trace_.events.push_back({t, kind, type, id, s, q});
    }

    // Logs each acceptance with the state right after it; s and q hold the
    // state before the service pass and are updated in place.
    void on_accepted(const ServeResult& res, double t, SystemState s, std::vector<std::size_t> q) {
        if (res.blocked) ++trace_.blocked_passes;
        for (const auto& acc : res.accepted) {
            auto& rec = trace_.requests[acc.request_id - 1];
            rec.outcome = Outcome::accepted;
            rec.outcome_time = t;
            if (in_window(t)) trace_.acceptance_times[acc.type].push_back(t);
            ++s[acc.type];
            --q[acc.type];
            log(t, EventKind::accept, acc.type, acc.request_id, s, q);
            schedule_release(t, acc.type);
        }
    }

    void on_arrival(double t, std::size_t n) {
        const SliceType& type = model_.type(n);
        Rng& rng = arrival_rng_[n];
        const double balk_draw = rng.uniform();
        const double unit_patience = rng.exponential(1.0);
        push(t + rng.exponential(type.arrival_rate), Pending::arrival, n, 0);

        RequestRecord rec;
        rec.id = trace_.requests.size() + 1;
        rec.type = n;
        rec.arrival_time = t;
        trace_.requests.push_back(rec);

        SystemState s = controller_->state();
        std::vector<std::size_t> q = queue_lengths();
        log(t, EventKind::arrival, n, rec.id, s, q);

        if (cfg_.balking && type.balking) {
            const double join_p = balk_join_probability(*type.balking, controller_->balking_length(n));
            if (balk_draw >= join_p) {
                auto& r = trace_.requests.back();
                r.outcome = Outcome::balked;
                r.outcome_time = t;
                log(t, EventKind::balk, n, rec.id, s, q);
                return;
            }
        }

        Request req{rec.id, n, t, t, std::nullopt};
        if (cfg_.reneging && type.reneging_rate > 0.0) req.reneging_deadline = t + unit_patience / type.reneging_rate;
        auto& r = trace_.requests.back();
        r.join_time = t;
        r.reneging_deadline = req.reneging_deadline;
        ++q[n];
        log(t, EventKind::join, n, rec.id, s, q);

        const ServeResult res = controller_->handle_request(req, t);
        on_accepted(res, t, std::move(s), std::move(q));
        if (trace_.requests[rec.id - 1].outcome == Outcome::waiting && req.reneging_deadline) {
            push(*req.reneging_deadline, Pending::renege, n, rec.id);
        }
    }

    void on_release(double t, std::size_t n) {
        SystemState s = controller_->state();
        --s[n];
        std::vector<std::size_t> q = queue_lengths();
        const ServeResult res = controller_->handle_release(n, t);
        log(t, EventKind::release, n, 0, s, q);
        on_accepted(res, t, std::move(s), std::move(q));
    }

    void on_renege(double t, std::size_t n, std::uint64_t id) {
        if (!controller_->remove_request(id, n)) return;
        auto& r = trace_.requests[id - 1];
        r.outcome = Outcome::reneged;
        r.outcome_time = t;
        log(t, EventKind::renege, n, id, controller_->state(), queue_lengths());
    }

    const SimConfig& cfg_;
    const ResourceModel& model_;
    const StateSpace& space_;
    std::size_t num_types_;
    std::vector<Rng> arrival_rng_;
    std::vector<Rng> lifetime_rng_;
    std::unique_ptr<Controller> controller_;
    std::priority_queue<ScheduledEvent, std::vector<ScheduledEvent>, Later> pending_;
    std::uint64_t seq_ = 0;
    double last_time_ = 0.0;
    SimTrace trace_;
};

}  // namespace

void validate(const SimConfig& config) {
    if (!config.model) throw ValidationError("simulation config has no model");
    if (!config.space) throw ValidationError("simulation config has no state space");
    if (config.space->num_types() != config.model->num_types()) {
        throw ValidationError("state space does not match the model");
    }
    if (config.controller == ControllerKind::multi_queue) {
        if (!config.strategy) throw ValidationError("multi-queue controller needs a strategy");
        if (auto err = validate(*config.strategy, *config.space)) throw ValidationError("strategy: " + *err);
    }
    if (!(std::isfinite(config.horizon) && config.warmup >= 0.0 && config.horizon > config.warmup)) {
        throw ValidationError("need horizon > warmup >= 0");
    }
    if (config.initial == InitialPolicy::explicit_state) {
        if (!config.initial_state) throw ValidationError("explicit initial state missing");
        if (config.initial_state->size() != config.model->num_types() ||
            !config.space->contains(*config.initial_state)) {
            throw ValidationError("explicit initial state [" + config.initial_state->to_string(',') +
                                  "] is not feasible");
        }
    }
}

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::arrival: return "arrival";
        case EventKind::balk: return "balk";
        case EventKind::join: return "join";
        case EventKind::accept: return "accept";
        case EventKind::renege: return "renege";
        case EventKind::release: return "release";
    }
    return "unknown";
}

double instantaneous_utility(const SystemState& s, const ResourceModel& model) {
    double u = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) u += s[n] * model.type(n).utility_rate;
    return u;
}

SimResult run(const SimConfig& config) {
    validate(config);
    SimResult result{Simulation(config).run(), {}};
    result.metrics = overall_metrics(result.trace);
    return result;
}

MetricsReport overall_metrics(const SimTrace& trace) {
    const std::size_t num_types = trace.active_integral.size();
    MetricsReport r;
    r.window = trace.window_end - trace.window_begin;
    if (!(r.window > 0.0)) throw ContractViolation("trace has an empty measurement window");
    r.mean_utility = trace.utility_integral / r.window;

    r.acceptance_rate.resize(num_types);
    r.mean_queue_length.resize(num_types);
    r.mean_active.resize(num_types);
    r.queue_empty_fraction.resize(num_types);
    r.mean_wait_per_type.assign(num_types, 0.0);
    r.window_counts.resize(num_types);
    r.total_counts.resize(num_types);
    for (std::size_t n = 0; n < num_types; ++n) {
        r.acceptance_rate[n] = static_cast<double>(trace.acceptance_times[n].size()) / r.window;
        r.mean_queue_length[n] = trace.queue_integral[n] / r.window;
        r.mean_active[n] = trace.active_integral[n] / r.window;
        r.queue_empty_fraction[n] = trace.queue_empty_time[n] / r.window;
    }

    std::vector<std::size_t> joined(num_types, 0);
    double wait_sum = 0.0;
    std::size_t wait_count = 0;
    std::size_t arrivals = 0;
    std::size_t accepted = 0;
    for (const auto& req : trace.requests) {
        auto bump = [&](OutcomeCounts& c) {
            ++c.arrivals;
            switch (req.outcome) {
                case Outcome::accepted: ++c.accepted; break;
                case Outcome::balked: ++c.balked; break;
                case Outcome::reneged: ++c.reneged; break;
                case Outcome::waiting: ++c.waiting; break;
            }
        };
        bump(r.total_counts[req.type]);
        if (req.arrival_time < trace.window_begin) continue;
        bump(r.window_counts[req.type]);
        ++arrivals;
        if (req.outcome == Outcome::accepted) ++accepted;
        if (req.join_time) {
            const double w = req.outcome_time - *req.join_time;
            wait_sum += w;
            ++wait_count;
            r.mean_wait_per_type[req.type] += w;
            ++joined[req.type];
        }
    }
    for (std::size_t n = 0; n < num_types; ++n) {
        if (joined[n]) r.mean_wait_per_type[n] /= static_cast<double>(joined[n]);
    }
    r.mean_wait = wait_count ? wait_sum / static_cast<double>(wait_count) : 0.0;
    if (arrivals == 0) {
        r.admission_rate = 1.0;
        r.admission_undefined = true;
    } else {
        r.admission_rate = static_cast<double>(accepted) / static_cast<double>(arrivals);
    }
    return r;
}

double weighted_mean_wait(const std::vector<double>& mean_waits, const std::vector<double>& mean_lengths) {
    if (mean_waits.size() != mean_lengths.size()) throw ContractViolation("dimension mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < mean_waits.size(); ++n) {
        num += mean_waits[n] * mean_lengths[n];
        den += mean_lengths[n];
    }
    return den > 0.0 ? num / den : 0.0;
}

std::uint64_t round_seed(std::uint64_t master_seed, std::size_t round) noexcept {
    return derive_seed(master_seed, round);
}

std::vector<double> inter_acceptance_times(const std::vector<double>& times) {
    std::vector<double> out;
    if (times.size() < 2) return out;
    out.reserve(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) out.push_back(times[i] - times[i - 1]);
    return out;
}

MonteCarloResult monte_carlo(const SimConfig& config, std::size_t rounds, std::size_t threads) {
    if (rounds == 0) throw ValidationError("monte_carlo needs at least one round");
    validate(config);
    const std::size_t num_types = config.model->num_types();
    MonteCarloResult mc;
    mc.seeds.resize(rounds);
    mc.reports.resize(rounds);
    std::vector<std::vector<std::vector<double>>> iat(rounds);
    parallel_for(rounds, threads, [&](std::size_t i) {
        SimConfig cfg = config;
        cfg.seed = round_seed(config.seed, i);
        cfg.record_events = false;
        SimResult res = run(cfg);
        mc.seeds[i] = cfg.seed;
        mc.reports[i] = std::move(res.metrics);
        iat[i].resize(num_types);
        for (std::size_t n = 0; n < num_types; ++n) {
            iat[i][n] = inter_acceptance_times(res.trace.acceptance_times[n]);
        }
    });
    mc.pooled_iat.resize(num_types);
    for (std::size_t i = 0; i < rounds; ++i) {
        for (std::size_t n = 0; n < num_types; ++n) {
            mc.pooled_iat[n].insert(mc.pooled_iat[n].end(), iat[i][n].begin(), iat[i][n].end());
        }
    }
    return mc;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
    CsvWriter csv(os);
    csv.row({"time", "event", "type", "request_id", "s_vector", "queue_lengths"});
    for (const auto& ev : trace.events) {
        csv.field(ev.time)
            .field(to_string(ev.kind))
            .field(ev.type + 1)
            .field(static_cast<unsigned long long>(ev.request_id))
            .field(ev.s.to_string(';'))
            .field(join_counts(ev.queue_lengths));
        csv.end_row();
    }
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw ContractViolation("no metrics to write");
    const std::size_t num_types = reports.front().acceptance_rate.size();
    CsvWriter csv(os);
    std::vector<std::string> header{"round", "mean_utility", "mean_wait", "admission_rate", "admission_undefined"};
    for (std::size_t n = 1; n <= num_types; ++n) header.push_back("acceptance_rate_" + std::to_string(n));
    for (std::size_t n = 1; n <= num_types; ++n) header.push_back("mean_queue_length_" + std::to_string(n));
    for (std::size_t n = 1; n <= num_types; ++n) header.push_back("queue_empty_fraction_" + std::to_string(n));
    csv.row(header);

    MetricsReport mean;
    mean.acceptance_rate.assign(num_types, 0.0);
    mean.mean_queue_length.assign(num_types, 0.0);
    mean.queue_empty_fraction.assign(num_types, 0.0);
    mean.admission_rate = 0.0;
    std::size_t undefined = 0;
    auto write = [&](const std::string& label, const MetricsReport& r, bool flag) {
        csv.field(label).field(r.mean_utility).field(r.mean_wait).field(r.admission_rate).field(flag ? 1 : 0);
        for (double v : r.acceptance_rate) csv.field(v);
        for (double v : r.mean_queue_length) csv.field(v);
        for (double v : r.queue_empty_fraction) csv.field(v);
        csv.end_row();
    };
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        write(std::to_string(i), r, r.admission_undefined);
        mean.mean_utility += r.mean_utility;
        mean.mean_wait += r.mean_wait;
        mean.admission_rate += r.admission_rate;
        if (r.admission_undefined) ++undefined;
        for (std::size_t n = 0; n < num_types; ++n) {
            mean.acceptance_rate[n] += r.acceptance_rate[n];
            mean.mean_queue_length[n] += r.mean_queue_length[n];
            mean.queue_empty_fraction[n] += r.queue_empty_fraction[n];
        }
    }
    const double k = static_cast<double>(reports.size());
    mean.mean_utility /= k;
    mean.mean_wait /= k;
    mean.admission_rate /= k;
    for (std::size_t n = 0; n < num_types; ++n) {
        mean.acceptance_rate[n] /= k;
        mean.mean_queue_length[n] /= k;
        mean.queue_empty_fraction[n] /= k;
    }
    write("aggregate", mean, undefined == reports.size());
}

}  // namespace slicesim
