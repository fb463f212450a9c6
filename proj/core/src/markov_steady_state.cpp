#include "slicesim/markov_steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slicesim/error.hpp"

namespace slicesim {

namespace {

using Sparse = std::vector<TransitionMatrix::Entry>;

void compact(Sparse& v) {
    std::sort(v.begin(), v.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (out > 0 && v[out - 1].first == v[i].first) {
            v[out - 1].second += v[i].second;
        } else {
            v[out++] = v[i];
        }
    }
    v.resize(out);
}

void check_inputs(const PreferenceMatrix& strategy, const StateSpace& space, std::span<const double> p_empty) {
    if (p_empty.size() != space.num_types()) {
        throw ValidationError("need one queue-empty probability per slice type");
    }
    for (double p : p_empty) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("queue-empty probabilities must be in [0, 1]");
    }
    if (auto err = validate(strategy, space)) throw ValidationError("strategy: " + *err);
}

// Probabilities of accepting each type number 0..N at one opportunity.
std::vector<double> opportunity_outcomes(const PreferenceMatrix& strategy, const StateSpace& space,
                                         std::span<const double> p_empty, std::size_t state_index) {
    const std::size_t num_types = space.num_types();
    std::vector<double> out(num_types + 1, 0.0);
    if (!space.is_admissible_index(state_index)) {
        out[0] = 1.0;
        return out;
    }
    double reach = 1.0;
    double infeasible = 0.0;
    for (int v : strategy.column(state_index).served()) {
        const auto type = static_cast<std::size_t>(v - 1);
        const double take = reach * (1.0 - p_empty[type]);
        if (space.successor(state_index, type)) {
            out[static_cast<std::size_t>(v)] = take;
        } else {
            infeasible += take;
        }
        reach *= p_empty[type];
    }
    out[0] = reach + infeasible;
    return out;
}

class Builder {
public:
    Builder(const ResourceModel& model, const PreferenceMatrix& strategy, const StateSpace& space,
            std::span<const double> p_empty, const TransitionOptions& options)
        : model_(model), strategy_(strategy), space_(space), p_empty_(p_empty), options_(options),
          memo_(space.size() * (space.num_types() + 1)) {}

    TransitionMatrix build() {
        const std::size_t size = space_.size();
        TransitionMatrix psi(size);
        if (options_.mode == TransitionMode::paper_literal) {
            for (std::size_t i = 0; i < size; ++i) add_opportunity(psi, i, 1.0);
            return psi;
        }

        double opportunity_rate = 0.0;
        if (options_.opportunities == OpportunityModel::pooled) {
            opportunity_rate = options_.opportunity_rate.value_or(model_.total_arrival_rate());
            if (!(opportunity_rate >= 0.0)) throw ValidationError("opportunity rate must be >= 0");
        } else {
            opportunity_rate = model_.total_arrival_rate();
        }
        double max_release = 0.0;
        for (std::size_t i = 0; i < size; ++i) max_release = std::max(max_release, release_rate(space_.state(i)));
        const double uniform_rate = opportunity_rate + max_release;

        for (std::size_t i = 0; i < size; ++i) {
            if (uniform_rate <= 0.0) {
                psi.add(i, i, 1.0);
                continue;
            }
            const SystemState& s = space_.state(i);
            double used = 0.0;
            for (std::size_t n = 0; n < s.size(); ++n) {
                if (s[n] == 0) continue;
                const double w = model_.type(n).release_rate * s[n] / uniform_rate;
                const std::size_t j = *space_.index_of(apply_increment(s, n + 1, Direction::release));
                if (options_.serve_after_release) {
                    add_scaled(psi, i, serve(j, 0), w);
                } else {
                    psi.add(i, j, w);
                }
                used += w;
            }
            if (options_.opportunities == OpportunityModel::pooled) {
                const double w = opportunity_rate / uniform_rate;
                add_opportunity(psi, i, w);
                used += w;
            } else {
                for (std::size_t m = 0; m < s.size(); ++m) {
                    const double lambda = model_.type(m).arrival_rate;
                    if (lambda <= 0.0) continue;
                    const double w = lambda / uniform_rate;
                    used += w;
                    auto target = served_target(i, m);
                    if (!target) {
                        psi.add(i, i, w);
                    } else if (options_.cascade) {
                        add_scaled(psi, i, serve(*target, m + 1), w);
                    } else {
                        psi.add(i, *target, w);
                    }
                }
            }
            const double rest = 1.0 - used;
            if (rest > 0.0) psi.add(i, i, rest);
        }
        return psi;
    }

private:
    double release_rate(const SystemState& s) const {
        double r = 0.0;
        for (std::size_t n = 0; n < s.size(); ++n) r += model_.type(n).release_rate * s[n];
        return r;
    }

    void add_opportunity(TransitionMatrix& psi, std::size_t i, double w) const {
        const auto probs = opportunity_outcomes(strategy_, space_, p_empty_, i);
        if (probs[0] > 0.0) psi.add(i, i, w * probs[0]);
        for (std::size_t n = 1; n < probs.size(); ++n) {
            if (probs[n] > 0.0) psi.add(i, *space_.successor(i, n - 1), w * probs[n]);
        }
    }

    static void add_scaled(TransitionMatrix& psi, std::size_t i, const Sparse& dist, double w) {
        for (const auto& [j, p] : dist) psi.add(i, j, w * p);
    }

    // State reached when a type-m request arrives at state i, if it is served.
    std::optional<std::size_t> served_target(std::size_t i, std::size_t m) const {
        if (!space_.is_admissible_index(i)) return std::nullopt;
        const auto served = strategy_.column(i).served();
        const int number = static_cast<int>(m + 1);
        if (std::find(served.begin(), served.end(), number) == served.end()) return std::nullopt;
        return space_.successor(i, m);
    }

    // Distribution of the state after offering state j to the waiting
    // queues. `variant` > 0 marks queue variant-1 as known empty (its only
    // request was just accepted on arrival).
    const Sparse& serve(std::size_t j, std::size_t variant) {
        auto& slot = memo_[j * (space_.num_types() + 1) + variant];
        if (slot) return *slot;
        Sparse out;
        double reach = 1.0;
        if (space_.is_admissible_index(j)) {
            for (int v : strategy_.column(j).served()) {
                const auto type = static_cast<std::size_t>(v - 1);
                const double nonempty = (variant == type + 1) ? 0.0 : 1.0 - p_empty_[type];
                if (nonempty <= 0.0) continue;
                auto next = space_.successor(j, type);
                if (!next) continue;
                const double w = reach * nonempty;
                if (options_.cascade) {
                    for (const auto& [k, p] : serve(*next, variant)) out.emplace_back(k, w * p);
                } else {
                    out.emplace_back(*next, w);
                }
                reach *= 1.0 - nonempty;
            }
        }
        if (reach > 0.0) out.emplace_back(j, reach);
        compact(out);
        slot = std::move(out);
        return *slot;
    }

    const ResourceModel& model_;
    const PreferenceMatrix& strategy_;
    const StateSpace& space_;
    std::span<const double> p_empty_;
    TransitionOptions options_;
    std::vector<std::optional<Sparse>> memo_;
};

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

}  // namespace

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<double>>& dense) : rows_(dense.size()) {
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i].size() != dense.size()) throw ValidationError("transition matrix must be square");
        for (std::size_t j = 0; j < dense[i].size(); ++j) {
            if (dense[i][j] != 0.0) rows_[i].emplace_back(j, dense[i][j]);
        }
    }
}

double TransitionMatrix::at(std::size_t i, std::size_t j) const {
    for (const auto& [k, p] : rows_.at(i)) {
        if (k == j) return p;
    }
    return 0.0;
}

std::vector<std::vector<double>> TransitionMatrix::dense() const {
    std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
    for (std::size_t i = 0; i < size(); ++i) {
        for (const auto& [j, p] : rows_[i]) out[i][j] = p;
    }
    return out;
}

void TransitionMatrix::add(std::size_t i, std::size_t j, double p) {
    if (i >= size() || j >= size()) throw ContractViolation("transition index out of range");
    auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const Entry& e, std::size_t k) { return e.first < k; });
    if (it != r.end() && it->first == j) {
        it->second += p;
    } else {
        r.insert(it, {j, p});
    }
}

std::vector<double> TransitionMatrix::left_multiply(std::span<const double> x) const {
    if (x.size() != size()) throw ContractViolation("vector length does not match the matrix");
    std::vector<double> y(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        if (x[i] == 0.0) continue;
        for (const auto& [j, p] : rows_[i]) y[j] += x[i] * p;
    }
    return y;
}

void TransitionMatrix::check_stochastic(double tol) const {
    for (std::size_t i = 0; i < size(); ++i) {
        double sum = 0.0;
        for (const auto& [j, p] : rows_[i]) {
            if (!(p >= 0.0)) throw NumericError("negative transition probability in row " + std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw NumericError("row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
    }
}

double transition_probability(const PreferenceMatrix& strategy, const StateSpace& space,
                              std::span<const double> p_empty, std::size_t state_index, std::size_t type_number) {
    check_inputs(strategy, space, p_empty);
    if (state_index >= space.size()) throw ContractViolation("state index out of range");
    if (type_number > space.num_types()) throw ContractViolation("type number out of range");
    return opportunity_outcomes(strategy, space, p_empty, state_index)[type_number];
}

TransitionMatrix build_transition_matrix(const ResourceModel& model, const PreferenceMatrix& strategy,
                                         const StateSpace& space, std::span<const double> p_empty,
                                         const TransitionOptions& options) {
    check_inputs(strategy, space, p_empty);
    if (model.num_types() != space.num_types()) throw ValidationError("state space does not match the model");
    TransitionMatrix psi = Builder(model, strategy, space, p_empty, options).build();
    psi.check_stochastic();
    return psi;
}

StateDistribution long_term_distribution(const TransitionMatrix& psi, std::span<const double> p_init,
                                         const LongTermOptions& options) {
    if (p_init.size() != psi.size()) throw ValidationError("initial distribution has the wrong length");
    double total = 0.0;
    for (double p : p_init) {
        if (!(p >= 0.0)) throw ValidationError("initial distribution has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("initial distribution does not sum to 1");

    StateDistribution out;
    std::vector<double> x(p_init.begin(), p_init.end());
    if (options.method == LongTermMethod::cesaro) {
        std::vector<double> avg = x;
        for (std::size_t k = 1; k <= options.max_iterations; ++k) {
            x = psi.left_multiply(x);
            const double w = 1.0 / static_cast<double>(k + 1);
            double change = 0.0;
            for (std::size_t i = 0; i < avg.size(); ++i) {
                const double next = avg[i] + (x[i] - avg[i]) * w;
                change += std::abs(next - avg[i]);
                avg[i] = next;
            }
            out.iterations = k;
            out.last_change = change;
            if (change < options.tolerance) {
                out.converged = true;
                break;
            }
        }
        x = std::move(avg);
    } else {
        for (std::size_t k = 1; k <= options.max_iterations; ++k) {
            std::vector<double> y = psi.left_multiply(x);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * (x[i] + y[i]);
            out.last_change = l1_distance(x, y);
            out.iterations = k;
            x = std::move(y);
            if (out.last_change < options.tolerance) {
                out.converged = true;
                break;
            }
        }
    }
    double sum = 0.0;
    for (double& p : x) {
        p = std::max(p, 0.0);
        sum += p;
    }
    for (double& p : x) p /= sum;
    out.probabilities = std::move(x);
    return out;
}

std::vector<double> point_mass(std::size_t size, std::size_t index) {
    if (index >= size) throw ContractViolation("point mass index out of range");
    std::vector<double> v(size, 0.0);
    v[index] = 1.0;
    return v;
}

std::vector<double> expected_slice_counts(std::span<const double> distribution, const StateSpace& space) {
    if (distribution.size() != space.size()) throw ValidationError("distribution does not match the state space");
    std::vector<double> out(space.num_types(), 0.0);
    for (std::size_t i = 0; i < space.size(); ++i) {
        const SystemState& s = space.state(i);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += distribution[i] * s[n];
    }
    return out;
}

std::vector<double> estimate_acceptance_rates(std::span<const double> distribution, const StateSpace& space,
                                              std::span<const double> release_rates) {
    if (release_rates.size() != space.num_types()) throw ValidationError("need one release rate per type");
    std::vector<double> mu = expected_slice_counts(distribution, space);
    for (std::size_t n = 0; n < mu.size(); ++n) mu[n] *= release_rates[n];
    return mu;
}

double estimate_mean_utility(std::span<const double> acceptance_rates, std::span<const double> release_rates,
                             std::span<const double> utility_rates) {
    if (acceptance_rates.size() != release_rates.size() || acceptance_rates.size() != utility_rates.size()) {
        throw ValidationError("rate vectors differ in length");
    }
    double u = 0.0;
    for (std::size_t n = 0; n < acceptance_rates.size(); ++n) {
        if (!(release_rates[n] > 0.0)) throw ValidationError("release rates must be > 0");
        u += acceptance_rates[n] * utility_rates[n] / release_rates[n];
    }
    return u;
}

}  // namespace slicesim
