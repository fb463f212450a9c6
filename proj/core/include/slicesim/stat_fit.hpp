#pragma once

// Empirical PMFs of inter-acceptance times, geometric fits and the
// Kullback-Leibler divergence between them.

#include <cstddef>
#include <span>
#include <vector>

namespace slicesim {

/// Sample t falls into bin floor(t / bin_width).
class EmpiricalPmf {
public:
    /// Throws ValidationError for an empty sample, bin_width <= 0 or a
    /// negative / non-finite sample.
    EmpiricalPmf(std::span<const double> samples, double bin_width);
    /// From bin counts; throws ValidationError if they are all zero.
    EmpiricalPmf(std::vector<std::size_t> counts, double bin_width);

    /// Samples landing at or beyond this bin are rejected.
    static constexpr std::size_t kMaxBins = 100'000'000;

    [[nodiscard]] double bin_width() const noexcept { return bin_width_; }
    [[nodiscard]] std::size_t total() const noexcept { return total_; }
    [[nodiscard]] std::size_t num_bins() const noexcept { return counts_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    [[nodiscard]] double probability(std::size_t k) const;
    /// Mean bin index.
    [[nodiscard]] double mean() const noexcept;

private:
    double bin_width_;
    std::vector<std::size_t> counts_;
    std::size_t total_ = 0;
};

[[nodiscard]] EmpiricalPmf empirical_pmf(std::span<const double> samples, double bin_width);

/// Maximum-likelihood p for the geometric law on {0, 1, 2, ...}: 1 / (1 + mean).
[[nodiscard]] double fit_geometric(const EmpiricalPmf& pmf);

/// (1 - p)^k p.
[[nodiscard]] double geometric_pmf(double p, std::size_t k);

/// sum_k pmf(k) ln(pmf(k) / geometric_pmf(p, k)) over bins with pmf(k) > 0.
/// Throws ValidationError unless 0 < p <= 1. Returns +inf if the pmf has mass
/// where the geometric law has none (p = 1).
[[nodiscard]] double kld_vs_geometric(const EmpiricalPmf& pmf, double p);

/// Default bin width: a tenth of the mean inter-arrival time of the busiest
/// type, i.e. 0.1 / max_n lambda_n.
[[nodiscard]] double default_bin_width(std::span<const double> arrival_rates);

}  // namespace slicesim
