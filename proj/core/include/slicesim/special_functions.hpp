#pragma once

// Series used by the impatient-queue closed forms.
//
// Infinite sums stop once a term drops below 1e-12 of the partial sum; more
// than kMaxSeriesTerms terms raises NumericError.

#include <cstddef>

namespace slicesim {

inline constexpr std::size_t kMaxSeriesTerms = 10'000;
inline constexpr double kSeriesTolerance = 1e-12;

/// Gamma function for x > 0.
[[nodiscard]] double gamma_fn(double x);

/// Modified Bessel function of the first kind I_nu(x), nu > -1, x >= 0.
/// Returns +inf at x = 0 for -1 < nu < 0.
[[nodiscard]] double bessel_i(double nu, double x);

/// sum_k y^k / (k! (nu+1)_k) with y >= 0, nu > -1. With y = (x/2)^2 this is
/// I_nu(x) Gamma(nu+1) / (x/2)^nu, which stays finite where I_nu and Gamma
/// overflow separately.
[[nodiscard]] double bessel_i_scaled(double nu, double y);

/// I_1(2 sqrt(x)) / sqrt(x) = sum_k x^k / (k! (k+1)!), continuous at x = 0.
[[nodiscard]] double bessel_i1_ratio(double x);

}  // namespace slicesim
