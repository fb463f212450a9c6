#pragma once

// Resource pool, slice types, system states and the enumerated
// feasibility space / admissibility region.
//
// Slice types are indexed 0..N-1 in code. Wherever a "type number" leaves
// the library (preference vectors, CSV files) it is 1-based and 0 is the
// reserve symbol.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace slicesim {

/// Per-type request and lifetime behaviour. Rates are per unit time.
struct SliceType {
    double arrival_rate = 1.0;        ///< lambda_n, >= 0; 0 means no requests
    double release_rate = 1.0;        ///< eta_n, > 0; mean lifetime is 1/eta_n
    double utility_rate = 0.0;        ///< u_n, >= 0
    double reneging_rate = 0.0;       ///< alpha_n, >= 0; 0 disables reneging
    std::optional<double> balking;    ///< beta_n in [0,1]; nullopt disables balking
};

class ResourceModel {
public:
    /// `cost[m][n]` is the amount of resource m held by one slice of type n.
    /// Throws ValidationError on dimension mismatch or out-of-domain values.
    ResourceModel(std::vector<double> pool, std::vector<std::vector<double>> cost,
                  std::vector<SliceType> types);

    [[nodiscard]] std::size_t num_resources() const noexcept { return pool_.size(); }
    [[nodiscard]] std::size_t num_types() const noexcept { return types_.size(); }
    [[nodiscard]] const std::vector<double>& pool() const noexcept { return pool_; }
    [[nodiscard]] double cost(std::size_t m, std::size_t n) const { return cost_.at(m).at(n); }
    [[nodiscard]] const std::vector<std::vector<double>>& cost_matrix() const noexcept { return cost_; }
    [[nodiscard]] const SliceType& type(std::size_t n) const { return types_.at(n); }
    [[nodiscard]] const std::vector<SliceType>& types() const noexcept { return types_; }

    /// Types whose cost column does not fit an empty pool. The model is still
    /// usable (such types are simply never admitted); configuration loading
    /// rejects it.
    [[nodiscard]] std::vector<std::size_t> individually_infeasible_types() const;

    [[nodiscard]] double total_arrival_rate() const noexcept;

private:
    std::vector<double> pool_;
    std::vector<std::vector<double>> cost_;
    std::vector<SliceType> types_;
};

/// Number of active slices per type.
class SystemState {
public:
    SystemState() = default;
    explicit SystemState(std::size_t num_types) : counts_(num_types, 0) {}
    explicit SystemState(std::vector<int> counts);
    SystemState(std::initializer_list<int> counts) : SystemState(std::vector<int>(counts)) {}

    [[nodiscard]] std::size_t size() const noexcept { return counts_.size(); }
    [[nodiscard]] int operator[](std::size_t n) const { return counts_[n]; }
    [[nodiscard]] int& operator[](std::size_t n) { return counts_[n]; }
    [[nodiscard]] const std::vector<int>& counts() const noexcept { return counts_; }
    [[nodiscard]] int total() const noexcept;

    auto operator<=>(const SystemState&) const = default;
    bool operator==(const SystemState&) const = default;

    /// "1;0;2" -- the form used in CSV output.
    [[nodiscard]] std::string to_string(char sep = ';') const;

private:
    std::vector<int> counts_;
};

struct SystemStateHash {
    std::size_t operator()(const SystemState& s) const noexcept;
};

enum class Direction { add, release };

/// C * s.
[[nodiscard]] std::vector<double> assigned_resources(const ResourceModel& model, const SystemState& s);

/// r_m - a_m >= 0 for every m, with a 1e-9 relative tolerance on the
/// real-valued comparison.
[[nodiscard]] bool is_feasible(const ResourceModel& model, const SystemState& s);

/// s + delta_s_n (add) or s - delta_s_n (release). `type_number` is 1-based;
/// 0 is the zero increment and returns s unchanged.
[[nodiscard]] SystemState apply_increment(const SystemState& s, std::size_t type_number, Direction direction);

/// Feasible states with admissible ones first. Within each group states are
/// in lexicographic order, so `index_of` agrees with the admissible index on
/// the admissible region.
class StateSpace {
public:
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] std::size_t num_admissible() const noexcept { return num_admissible_; }
    [[nodiscard]] std::size_t num_types() const noexcept { return num_types_; }

    [[nodiscard]] const SystemState& state(std::size_t index) const { return states_.at(index); }
    [[nodiscard]] const std::vector<SystemState>& states() const noexcept { return states_; }
    [[nodiscard]] std::span<const SystemState> admissible() const noexcept {
        return {states_.data(), num_admissible_};
    }
    [[nodiscard]] std::span<const SystemState> boundary() const noexcept {
        return {states_.data() + num_admissible_, states_.size() - num_admissible_};
    }

    [[nodiscard]] std::optional<std::size_t> index_of(const SystemState& s) const;
    [[nodiscard]] bool contains(const SystemState& s) const { return index_of(s).has_value(); }
    [[nodiscard]] bool is_admissible_index(std::size_t index) const noexcept { return index < num_admissible_; }
    [[nodiscard]] bool is_admissible(const SystemState& s) const;

    /// Index of s + delta_s_n if that state is feasible (n is 0-based).
    [[nodiscard]] std::optional<std::size_t> successor(std::size_t index, std::size_t type) const;

private:
    friend StateSpace enumerate_state_space(const ResourceModel&, std::size_t);

    std::size_t num_types_ = 0;
    std::size_t num_admissible_ = 0;
    std::vector<SystemState> states_;
    std::unordered_map<SystemState, std::size_t, SystemStateHash> index_;
    std::vector<std::vector<std::optional<std::size_t>>> successors_;
};

inline constexpr std::size_t kDefaultStateSpaceCap = 1'000'000;

/// Exhaustive enumeration of the feasibility space and admissibility region.
/// Throws StateSpaceTooLarge above `cap` states and ValidationError if a type
/// with an all-zero cost column makes the space unbounded.
[[nodiscard]] StateSpace enumerate_state_space(const ResourceModel& model,
                                               std::size_t cap = kDefaultStateSpaceCap);

}  // namespace slicesim
