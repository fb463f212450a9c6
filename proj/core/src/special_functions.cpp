#include "slicesim/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slicesim/error.hpp"

namespace slicesim {

double gamma_fn(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("gamma_fn needs a finite x > 0");
    return std::tgamma(x);
}

double bessel_i_scaled(double nu, double y) {
    if (!(nu > -1.0)) throw ValidationError("Bessel order must exceed -1");
    if (!(y >= 0.0) || !std::isfinite(y)) throw ValidationError("Bessel argument must be finite and >= 0");
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t k = 1; k <= kMaxSeriesTerms; ++k) {
        const double kd = static_cast<double>(k);
        term *= y / (kd * (nu + kd));
        sum += term;
        // Terms grow while k(nu+k) < y, so only stop on the decreasing side.
        if (term <= kSeriesTolerance * sum && kd * (nu + kd) >= y) return sum;
    }
    throw NumericError("Bessel series did not converge within " + std::to_string(kMaxSeriesTerms) +
                       " terms (nu=" + std::to_string(nu) + ", y=" + std::to_string(y) + ")");
}

double bessel_i(double nu, double x) {
    if (!(x >= 0.0)) throw ValidationError("Bessel argument must be >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        if (nu > -1.0) return std::numeric_limits<double>::infinity();
    }
    const double half = 0.5 * x;
    const double s = bessel_i_scaled(nu, half * half);
    return std::exp(nu * std::log(half) - std::lgamma(nu + 1.0)) * s;
}

double bessel_i1_ratio(double x) { return bessel_i_scaled(1.0, x); }

}  // namespace slicesim
