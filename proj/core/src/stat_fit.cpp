#include "slicesim/stat_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "slicesim/error.hpp"

namespace slicesim {

EmpiricalPmf::EmpiricalPmf(std::span<const double> samples, double bin_width) : bin_width_(bin_width) {
    if (samples.empty()) throw ValidationError("empirical PMF needs at least one sample");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ValidationError("bin width must be > 0");
    for (double t : samples) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("samples must be finite and >= 0");
        const double bin = std::floor(t / bin_width);
        if (bin >= static_cast<double>(kMaxBins)) throw ValidationError("sample falls beyond the last histogram bin");
        const auto k = static_cast<std::size_t>(bin);
        if (k >= counts_.size()) counts_.resize(k + 1, 0);
        ++counts_[k];
    }
    total_ = samples.size();
}

EmpiricalPmf::EmpiricalPmf(std::vector<std::size_t> counts, double bin_width)
    : bin_width_(bin_width), counts_(std::move(counts)) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ValidationError("bin width must be > 0");
    for (auto c : counts_) total_ += c;
    if (total_ == 0) throw ValidationError("empirical PMF needs at least one sample");
    while (counts_.back() == 0) counts_.pop_back();
}

double EmpiricalPmf::probability(std::size_t k) const {
    if (k >= counts_.size()) return 0.0;
    return static_cast<double>(counts_[k]) / static_cast<double>(total_);
}

double EmpiricalPmf::mean() const noexcept {
    double sum = 0.0;
    for (std::size_t k = 0; k < counts_.size(); ++k) sum += static_cast<double>(k) * static_cast<double>(counts_[k]);
    return sum / static_cast<double>(total_);
}

EmpiricalPmf empirical_pmf(std::span<const double> samples, double bin_width) {
    return EmpiricalPmf(samples, bin_width);
}

double fit_geometric(const EmpiricalPmf& pmf) { return 1.0 / (1.0 + pmf.mean()); }

double geometric_pmf(double p, std::size_t k) {
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("geometric parameter must be in (0, 1]");
    if (k == 0) return p;
    if (p == 1.0) return 0.0;
    return std::exp(static_cast<double>(k) * std::log1p(-p)) * p;
}

double kld_vs_geometric(const EmpiricalPmf& pmf, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("geometric parameter must be in (0, 1]");
    double d = 0.0;
    for (std::size_t k = 0; k < pmf.num_bins(); ++k) {
        const double q = pmf.probability(k);
        if (q <= 0.0) continue;
        if (p == 1.0 && k > 0) return std::numeric_limits<double>::infinity();
        // ln(geometric) computed directly so that far tails do not underflow.
        const double log_geo = static_cast<double>(k) * (p == 1.0 ? 0.0 : std::log1p(-p)) + std::log(p);
        d += q * (std::log(q) - log_geo);
    }
    return std::max(d, 0.0);
}

double default_bin_width(std::span<const double> arrival_rates) {
    double busiest = 0.0;
    for (double l : arrival_rates) busiest = std::max(busiest, l);
    if (!(busiest > 0.0)) throw ValidationError("default bin width needs a positive arrival rate");
    return 0.1 / busiest;
}

}  // namespace slicesim
