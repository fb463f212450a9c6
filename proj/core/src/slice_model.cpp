#include "slicesim/slice_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slicesim/error.hpp"

namespace slicesim {

namespace {

constexpr double kRelTol = 1e-9;

bool fits(double assigned, double available) {
    return assigned <= available + kRelTol * std::max(std::abs(available), std::abs(assigned));
}

void check_rate(double value, bool allow_zero, const char* what, std::size_t n) {
    const bool ok = std::isfinite(value) && (allow_zero ? value >= 0.0 : value > 0.0);
    if (!ok) {
        throw ValidationError(std::string(what) + " of type " + std::to_string(n + 1) +
                              (allow_zero ? " must be >= 0" : " must be > 0"));
    }
}

}  // namespace

ResourceModel::ResourceModel(std::vector<double> pool, std::vector<std::vector<double>> cost,
                             std::vector<SliceType> types)
    : pool_(std::move(pool)), cost_(std::move(cost)), types_(std::move(types)) {
    if (pool_.empty()) throw ValidationError("resource pool must have at least one resource");
    if (types_.empty()) throw ValidationError("model must define at least one slice type");
    if (cost_.size() != pool_.size()) {
        throw ValidationError("cost matrix has " + std::to_string(cost_.size()) + " rows, expected " +
                              std::to_string(pool_.size()));
    }
    for (std::size_t m = 0; m < cost_.size(); ++m) {
        if (cost_[m].size() != types_.size()) {
            throw ValidationError("cost matrix row " + std::to_string(m + 1) + " has " +
                                  std::to_string(cost_[m].size()) + " entries, expected " +
                                  std::to_string(types_.size()));
        }
        if (!std::isfinite(pool_[m]) || pool_[m] < 0.0) throw ValidationError("pool entries must be >= 0");
        for (double c : cost_[m]) {
            if (!std::isfinite(c) || c < 0.0) throw ValidationError("cost entries must be >= 0");
        }
    }
    for (std::size_t n = 0; n < types_.size(); ++n) {
        const auto& t = types_[n];
        check_rate(t.arrival_rate, true, "arrival_rate", n);
        check_rate(t.release_rate, false, "release_rate", n);
        check_rate(t.utility_rate, true, "utility_rate", n);
        check_rate(t.reneging_rate, true, "reneging_rate", n);
        if (t.balking && !(*t.balking >= 0.0 && *t.balking <= 1.0)) {
            throw ValidationError("balking willingness of type " + std::to_string(n + 1) + " must lie in [0, 1]");
        }
    }
}

std::vector<std::size_t> ResourceModel::individually_infeasible_types() const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < num_types(); ++n) {
        for (std::size_t m = 0; m < num_resources(); ++m) {
            if (!fits(cost_[m][n], pool_[m])) {
                out.push_back(n);
                break;
            }
        }
    }
    return out;
}

double ResourceModel::total_arrival_rate() const noexcept {
    double sum = 0.0;
    for (const auto& t : types_) sum += t.arrival_rate;
    return sum;
}

SystemState::SystemState(std::vector<int> counts) : counts_(std::move(counts)) {
    for (int c : counts_) {
        if (c < 0) throw ContractViolation("slice counts must be non-negative");
    }
}

int SystemState::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0); }

std::string SystemState::to_string(char sep) const {
    std::string out;
    for (std::size_t n = 0; n < counts_.size(); ++n) {
        if (n) out += sep;
        out += std::to_string(counts_[n]);
    }
    return out;
}

std::size_t SystemStateHash::operator()(const SystemState& s) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int c : s.counts()) {
        h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

std::vector<double> assigned_resources(const ResourceModel& model, const SystemState& s) {
    if (s.size() != model.num_types()) {
        throw ContractViolation("state has " + std::to_string(s.size()) + " entries, model has " +
                                std::to_string(model.num_types()) + " types");
    }
    std::vector<double> a(model.num_resources(), 0.0);
    for (std::size_t m = 0; m < a.size(); ++m) {
        for (std::size_t n = 0; n < s.size(); ++n) a[m] += model.cost(m, n) * s[n];
    }
    return a;
}

bool is_feasible(const ResourceModel& model, const SystemState& s) {
    const auto a = assigned_resources(model, s);
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (!fits(a[m], model.pool()[m])) return false;
    }
    return true;
}

SystemState apply_increment(const SystemState& s, std::size_t type_number, Direction direction) {
    if (type_number == 0) return s;
    if (type_number > s.size()) {
        throw ContractViolation("type number " + std::to_string(type_number) + " out of range 0.." +
                                std::to_string(s.size()));
    }
    SystemState out = s;
    const std::size_t n = type_number - 1;
    if (direction == Direction::add) {
        ++out[n];
    } else {
        if (out[n] < 1) {
            throw ContractViolation("cannot release a type-" + std::to_string(type_number) +
                                    " slice: none active");
        }
        --out[n];
    }
    return out;
}

std::optional<std::size_t> StateSpace::index_of(const SystemState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool StateSpace::is_admissible(const SystemState& s) const {
    auto idx = index_of(s);
    return idx && *idx < num_admissible_;
}

std::optional<std::size_t> StateSpace::successor(std::size_t index, std::size_t type) const {
    return successors_.at(index).at(type);
}

StateSpace enumerate_state_space(const ResourceModel& model, std::size_t cap) {
    const std::size_t num_types = model.num_types();
    const std::size_t num_res = model.num_resources();

    // Per-type upper bound floor(min_m r_m / c_mn) over resources with c_mn > 0.
    std::vector<int> bound(num_types, 0);
    for (std::size_t n = 0; n < num_types; ++n) {
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < num_res; ++m) {
            const double c = model.cost(m, n);
            if (c > 0.0) b = std::min(b, model.pool()[m] / c);
        }
        if (!std::isfinite(b)) {
            throw ValidationError("type " + std::to_string(n + 1) +
                                  " consumes no resources; the feasibility space is unbounded");
        }
        bound[n] = static_cast<int>(std::floor(b * (1.0 + kRelTol)));
    }

    // Depth-first over types in order, which visits states lexicographically.
    // Feasibility is monotone, so a coordinate stops growing at the first
    // infeasible value.
    std::vector<SystemState> feasible;
    SystemState cur(num_types);
    auto recurse = [&](auto&& self, std::size_t n) -> void {
        if (n == num_types) {
            if (feasible.size() >= cap) throw StateSpaceTooLarge(cap);
            feasible.push_back(cur);
            return;
        }
        for (int k = 0; k <= bound[n]; ++k) {
            cur[n] = k;
            if (!is_feasible(model, cur)) break;
            self(self, n + 1);
        }
        cur[n] = 0;
    };
    recurse(recurse, 0);

    std::unordered_map<SystemState, std::size_t, SystemStateHash> lex_index;
    lex_index.reserve(feasible.size());
    for (std::size_t i = 0; i < feasible.size(); ++i) lex_index.emplace(feasible[i], i);

    std::vector<char> admissible(feasible.size(), 0);
    for (std::size_t i = 0; i < feasible.size(); ++i) {
        for (std::size_t n = 0; n < num_types && !admissible[i]; ++n) {
            SystemState next = feasible[i];
            ++next[n];
            if (lex_index.count(next)) admissible[i] = 1;
        }
    }

    StateSpace space;
    space.num_types_ = num_types;
    space.states_.reserve(feasible.size());
    for (std::size_t i = 0; i < feasible.size(); ++i) {
        if (admissible[i]) space.states_.push_back(feasible[i]);
    }
    space.num_admissible_ = space.states_.size();
    for (std::size_t i = 0; i < feasible.size(); ++i) {
        if (!admissible[i]) space.states_.push_back(feasible[i]);
    }
    space.index_.reserve(space.states_.size());
    for (std::size_t i = 0; i < space.states_.size(); ++i) space.index_.emplace(space.states_[i], i);

    space.successors_.assign(space.states_.size(), std::vector<std::optional<std::size_t>>(num_types));
    for (std::size_t i = 0; i < space.states_.size(); ++i) {
        for (std::size_t n = 0; n < num_types; ++n) {
            SystemState next = space.states_[i];
            ++next[n];
            space.successors_[i][n] = space.index_of(next);
        }
    }
    return space;
}

}  // namespace slicesim
