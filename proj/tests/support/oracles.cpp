#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace slicesim::testing {

namespace {

bool fits(const ResourceModel& model, const std::vector<int>& s) {
    for (std::size_t m = 0; m < model.num_resources(); ++m) {
        double a = 0.0;
        for (std::size_t n = 0; n < model.num_types(); ++n) a += model.cost(m, n) * s[n];
        const double r = model.pool()[m];
        if (a > r + 1e-9 * std::max(1.0, r)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::vector<int>> brute_force_feasible(const ResourceModel& model) {
    const std::size_t n_types = model.num_types();
    std::vector<int> bound(n_types, 0);
    for (std::size_t n = 0; n < n_types; ++n) {
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < model.num_resources(); ++m) {
            if (model.cost(m, n) > 0) b = std::min(b, model.pool()[m] / model.cost(m, n));
        }
        bound[n] = static_cast<int>(std::floor(b + 1e-9));
    }
    std::vector<std::vector<int>> out;
    std::vector<int> s(n_types, 0);
    while (true) {
        if (fits(model, s)) out.push_back(s);
        std::size_t k = n_types;
        while (k > 0) {
            --k;
            if (s[k] < bound[k]) {
                ++s[k];
                break;
            }
            s[k] = 0;
            if (k == 0) return out;
        }
        if (n_types == 0) return out;
    }
}

bool brute_force_admissible(const ResourceModel& model, const std::vector<int>& s) {
    for (std::size_t n = 0; n < model.num_types(); ++n) {
        auto t = s;
        ++t[n];
        if (fits(model, t)) return true;
    }
    return false;
}

std::vector<double> stationary_by_solve(const std::vector<std::vector<double>>& p) {
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(j, i) = p[i][j] - (i == j ? 1.0 : 0.0);
    }
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = a.fullPivLu().solve(b);
    return {x.data(), x.data() + n};
}

ImpatientQueueSample simulate_impatient_queue(const QueueParams& p, std::uint64_t arrivals, std::uint64_t seed,
                                              std::uint64_t warmup_arrivals) {
    std::mt19937_64 gen(seed);
    std::exponential_distribution<double> inter(p.lambda), service(p.mu), patience(p.alpha);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double inf = std::numeric_limits<double>::infinity();

    struct Waiting {
        double join;
        double deadline;
    };
    std::deque<Waiting> queue;
    bool busy = false;
    double t = 0.0, next_arrival = inter(gen), service_end = inf;
    double t0 = 0.0;
    std::uint64_t seen = 0;
    bool measuring = warmup_arrivals == 0;

    ImpatientQueueSample out;
    std::vector<double> occupancy;
    double sum_a = 0.0, sum_r = 0.0;

    auto advance = [&](double to) {
        if (measuring) {
            const std::size_t l = queue.size() + (busy ? 1 : 0);
            if (occupancy.size() <= l) occupancy.resize(l + 1, 0.0);
            occupancy[l] += to - t;
        }
        t = to;
    };

    while (true) {
        double deadline = inf;
        std::size_t who = 0;
        for (std::size_t i = 0; i < queue.size(); ++i) {
            if (queue[i].deadline < deadline) {
                deadline = queue[i].deadline;
                who = i;
            }
        }
        const double next = std::min({next_arrival, service_end, deadline});
        advance(next);
        if (next == next_arrival) {
            ++seen;
            if (!measuring && seen > warmup_arrivals) {
                measuring = true;
                t0 = t;
            }
            if (measuring && out.arrivals == arrivals) break;
            const std::size_t l = queue.size() + (busy ? 1 : 0);
            if (measuring) ++out.arrivals;
            if (l == 0) {
                busy = true;
                service_end = t + service(gen);
                if (measuring) ++out.immediate;
            } else if (unif(gen) < std::min(1.0, p.beta / static_cast<double>(l))) {
                queue.push_back({measuring ? t : -1.0, t + patience(gen)});
                if (measuring) ++out.joined;
            }
            next_arrival = t + inter(gen);
        } else if (next == service_end) {
            if (queue.empty()) {
                busy = false;
                service_end = inf;
            } else {
                const Waiting w = queue.front();
                queue.pop_front();
                if (w.join >= 0) {
                    ++out.served_after_wait;
                    sum_a += t - w.join;
                }
                service_end = t + service(gen);
            }
        } else {
            const Waiting w = queue[who];
            queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(who));
            if (w.join >= 0) {
                ++out.reneged;
                sum_r += t - w.join;
            }
        }
    }
    const double span = t - t0;
    out.pmf.resize(occupancy.size());
    for (std::size_t l = 0; l < occupancy.size(); ++l) out.pmf[l] = occupancy[l] / span;
    // Requests still waiting at the end are dropped from the wait averages
    // and from `joined`; with many arrivals the bias is negligible.
    std::uint64_t unfinished = 0;
    for (const auto& w : queue) unfinished += w.join >= 0 ? 1 : 0;
    out.joined -= unfinished;
    out.wait_accepted = out.served_after_wait ? sum_a / double(out.served_after_wait) : 0.0;
    out.wait_reneged = out.reneged ? sum_r / double(out.reneged) : 0.0;
    out.wait_joined = (sum_a + sum_r) / double(out.served_after_wait + out.reneged);
    return out;
}

ResourceModel random_model(std::uint64_t seed, std::size_t num_resources, std::size_t num_types) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> pool_d(0.5, 1.5), cost_d(0.05, 0.6), rate_d(0.2, 3.0);
    std::bernoulli_distribution zero(0.25);
    std::vector<double> pool(num_resources);
    for (auto& r : pool) r = pool_d(gen);
    std::vector<std::vector<double>> cost(num_resources, std::vector<double>(num_types));
    for (std::size_t n = 0; n < num_types; ++n) {
        bool any = false;
        for (std::size_t m = 0; m < num_resources; ++m) {
            cost[m][n] = zero(gen) ? 0.0 : cost_d(gen);
            any = any || cost[m][n] > 0;
        }
        if (!any) cost[0][n] = cost_d(gen);
    }
    std::vector<SliceType> types(num_types);
    for (auto& t : types) {
        t.arrival_rate = rate_d(gen);
        t.release_rate = rate_d(gen) / 2.0;
        t.utility_rate = rate_d(gen);
        t.reneging_rate = rate_d(gen) / 2.0;
        t.balking = std::uniform_real_distribution<double>(0.1, 1.0)(gen);
    }
    return ResourceModel(std::move(pool), std::move(cost), std::move(types));
}

}  // namespace slicesim::testing
