#pragma once

// Admission strategies as preference vectors / matrices.
//
// A preference vector for N types is a permutation of {0, 1, ..., N}. Entry
// k >= 1 refers to slice type k (type index k-1); 0 is the reserve symbol and
// every queue listed after it is never served in that state. A preference
// matrix holds one vector per admissible state, in admissible-index order.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicesim/slice_model.hpp"

namespace slicesim {

class PreferenceVector {
public:
    PreferenceVector() = default;
    /// Throws ValidationError unless `entries` is a permutation of 0..N
    /// for N = entries.size() - 1.
    explicit PreferenceVector(std::vector<int> entries);
    PreferenceVector(std::initializer_list<int> entries) : PreferenceVector(std::vector<int>(entries)) {}

    [[nodiscard]] std::size_t num_types() const noexcept { return entries_.empty() ? 0 : entries_.size() - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] int operator[](std::size_t k) const { return entries_[k]; }
    [[nodiscard]] const std::vector<int>& entries() const noexcept { return entries_; }

    /// Type numbers served in this state, in preference order (stops at 0).
    [[nodiscard]] std::span<const int> served() const noexcept;
    /// 0-based position of `value` (0..N) in the vector.
    [[nodiscard]] std::size_t position_of(int value) const;

    bool operator==(const PreferenceVector&) const = default;

private:
    std::vector<int> entries_;
};

class PreferenceMatrix {
public:
    PreferenceMatrix() = default;
    /// Throws ValidationError if any column has a different type count.
    PreferenceMatrix(std::size_t num_types, std::vector<PreferenceVector> columns);

    [[nodiscard]] std::size_t num_types() const noexcept { return num_types_; }
    [[nodiscard]] std::size_t num_columns() const noexcept { return columns_.size(); }
    [[nodiscard]] const PreferenceVector& column(std::size_t admissible_index) const {
        return columns_.at(admissible_index);
    }
    [[nodiscard]] const std::vector<PreferenceVector>& columns() const noexcept { return columns_; }
    void set_column(std::size_t admissible_index, PreferenceVector v);

    bool operator==(const PreferenceMatrix&) const = default;

private:
    std::size_t num_types_ = 0;
    std::vector<PreferenceVector> columns_;
};

/// nullopt when valid, otherwise a description of the first violation.
[[nodiscard]] std::optional<std::string> validate(std::span<const int> entries, std::size_t num_types);
[[nodiscard]] std::optional<std::string> validate(const PreferenceMatrix& matrix, const StateSpace& space);

/// Column for an admissible state. Throws ContractViolation otherwise.
[[nodiscard]] const PreferenceVector& preference_at(const PreferenceMatrix& matrix, const SystemState& s,
                                                    const StateSpace& space);

/// Entry `row` (0-based, 0..N) of the extended column `state_index`
/// (0-based over the whole feasibility space): 0 for non-admissible states.
[[nodiscard]] int extended_preference(const PreferenceMatrix& matrix, std::size_t state_index, std::size_t row);

enum class NaiveKind {
    prefer_type,   ///< preferred type first, others ascending, then 0
    greedy_order,  ///< every type in ascending order, then 0
};

[[nodiscard]] PreferenceMatrix naive_strategy(NaiveKind kind, const StateSpace& space, std::size_t preferred = 1);

/// Independent uniform permutation per column (Fisher-Yates), fixed by seed.
[[nodiscard]] PreferenceMatrix random_strategy(const StateSpace& space, std::uint64_t seed);

/// ((N+1)!)^|A| as a double (may be +inf for large spaces).
[[nodiscard]] double strategy_space_size(std::size_t num_types, std::size_t num_admissible);

/// Text form: one line per column, "index e_1 ... e_{N+1}". Lines starting
/// with '#' are comments.
void write_strategy(std::ostream& os, const PreferenceMatrix& matrix);
[[nodiscard]] PreferenceMatrix read_strategy(std::istream& is, std::size_t num_types);

}  // namespace slicesim
