#include "slicesim/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "slicesim/error.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

std::optional<std::string> validate(std::span<const int> entries, std::size_t num_types) {
    if (entries.size() != num_types + 1) {
        return "preference vector has " + std::to_string(entries.size()) + " entries, expected " +
               std::to_string(num_types + 1);
    }
    std::vector<char> seen(num_types + 1, 0);
    for (int e : entries) {
        if (e < 0 || static_cast<std::size_t>(e) > num_types) {
            return "entry " + std::to_string(e) + " outside 0.." + std::to_string(num_types);
        }
        if (seen[e]) return "entry " + std::to_string(e) + " appears more than once";
        seen[e] = 1;
    }
    return std::nullopt;
}

std::optional<std::string> validate(const PreferenceMatrix& matrix, const StateSpace& space) {
    if (matrix.num_types() != space.num_types()) {
        return "matrix is for " + std::to_string(matrix.num_types()) + " types, state space has " +
               std::to_string(space.num_types());
    }
    if (matrix.num_columns() != space.num_admissible()) {
        return "matrix has " + std::to_string(matrix.num_columns()) + " columns, admissible region has " +
               std::to_string(space.num_admissible()) + " states";
    }
    for (std::size_t j = 0; j < matrix.num_columns(); ++j) {
        if (auto err = validate(matrix.column(j).entries(), matrix.num_types())) {
            return "column " + std::to_string(j) + ": " + *err;
        }
    }
    return std::nullopt;
}

PreferenceVector::PreferenceVector(std::vector<int> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("preference vector must not be empty");
    if (auto err = validate(entries_, entries_.size() - 1)) throw ValidationError(*err);
}

std::span<const int> PreferenceVector::served() const noexcept {
    auto zero = std::find(entries_.begin(), entries_.end(), 0);
    return {entries_.data(), static_cast<std::size_t>(zero - entries_.begin())};
}

std::size_t PreferenceVector::position_of(int value) const {
    auto it = std::find(entries_.begin(), entries_.end(), value);
    if (it == entries_.end()) throw ContractViolation("value not present in preference vector");
    return static_cast<std::size_t>(it - entries_.begin());
}

PreferenceMatrix::PreferenceMatrix(std::size_t num_types, std::vector<PreferenceVector> columns)
    : num_types_(num_types), columns_(std::move(columns)) {
    for (const auto& c : columns_) {
        if (c.num_types() != num_types_) throw ValidationError("preference column has wrong length");
    }
}

void PreferenceMatrix::set_column(std::size_t admissible_index, PreferenceVector v) {
    if (v.num_types() != num_types_) throw ValidationError("preference column has wrong length");
    columns_.at(admissible_index) = std::move(v);
}

const PreferenceVector& preference_at(const PreferenceMatrix& matrix, const SystemState& s,
                                      const StateSpace& space) {
    auto idx = space.index_of(s);
    if (!idx || !space.is_admissible_index(*idx)) {
        throw ContractViolation("state [" + s.to_string(',') + "] is not admissible");
    }
    return matrix.column(*idx);
}

int extended_preference(const PreferenceMatrix& matrix, std::size_t state_index, std::size_t row) {
    if (row > matrix.num_types()) throw ContractViolation("preference row out of range");
    if (state_index >= matrix.num_columns()) return 0;
    return matrix.column(state_index)[row];
}

PreferenceMatrix naive_strategy(NaiveKind kind, const StateSpace& space, std::size_t preferred) {
    const std::size_t n = space.num_types();
    std::vector<int> order;
    order.reserve(n + 1);
    if (kind == NaiveKind::prefer_type) {
        if (preferred < 1 || preferred > n) {
            throw ContractViolation("preferred type " + std::to_string(preferred) + " outside 1.." +
                                    std::to_string(n));
        }
        order.push_back(static_cast<int>(preferred));
    }
    for (std::size_t k = 1; k <= n; ++k) {
        if (kind == NaiveKind::prefer_type && k == preferred) continue;
        order.push_back(static_cast<int>(k));
    }
    order.push_back(0);
    return PreferenceMatrix(n, std::vector<PreferenceVector>(space.num_admissible(), PreferenceVector(order)));
}

PreferenceMatrix random_strategy(const StateSpace& space, std::uint64_t seed) {
    const std::size_t n = space.num_types();
    Rng rng(seed);
    std::vector<PreferenceVector> cols;
    cols.reserve(space.num_admissible());
    std::vector<int> perm(n + 1);
    for (std::size_t j = 0; j < space.num_admissible(); ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            std::swap(perm[i], perm[rng.below(i + 1)]);
        }
        cols.emplace_back(perm);
    }
    return PreferenceMatrix(n, std::move(cols));
}

double strategy_space_size(std::size_t num_types, std::size_t num_admissible) {
    double fact = 1.0;
    for (std::size_t k = 2; k <= num_types + 1; ++k) fact *= static_cast<double>(k);
    return std::pow(fact, static_cast<double>(num_admissible));
}

void write_strategy(std::ostream& os, const PreferenceMatrix& matrix) {
    os << "# preference matrix: " << matrix.num_types() << " types, " << matrix.num_columns()
       << " admissible states\n";
    for (std::size_t j = 0; j < matrix.num_columns(); ++j) {
        os << j;
        for (int e : matrix.column(j).entries()) os << ' ' << e;
        os << '\n';
    }
}

PreferenceMatrix read_strategy(std::istream& is, std::size_t num_types) {
    std::vector<PreferenceVector> cols;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::size_t index = 0;
        if (!(ls >> index)) throw ValidationError("line " + std::to_string(line_no) + ": missing state index");
        if (index != cols.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected state index " +
                                  std::to_string(cols.size()) + ", got " + std::to_string(index));
        }
        std::vector<int> entries;
        int e = 0;
        while (ls >> e) entries.push_back(e);
        if (!ls.eof()) throw ValidationError("line " + std::to_string(line_no) + ": non-integer entry");
        if (auto err = validate(entries, num_types)) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + *err);
        }
        cols.emplace_back(std::move(entries));
    }
    return PreferenceMatrix(num_types, std::move(cols));
}

}  // namespace slicesim
