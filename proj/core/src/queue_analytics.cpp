#include "slicesim/queue_analytics.hpp"

#include <cmath>
#include <sstream>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slicesim/error.hpp"
#include "slicesim/special_functions.hpp"

namespace slicesim {

namespace {

void require_patient(double lambda, double mu) {
    if (!(lambda >= 0.0 && mu > 0.0)) throw ValidationError("need lambda >= 0 and mu > 0");
    if (!(mu > lambda)) throw ValidationError("no statistical equilibrium: lambda >= mu");
}

// sum_{k>=1} y^k / (k! (nu+1)_k), i.e. bessel_i_scaled(nu, y) - 1 without the
// cancellation for small y.
double scaled_series_tail(double nu, double y) {
    double term = 1.0;
    double sum = 0.0;
    for (std::size_t k = 1; k <= kMaxSeriesTerms; ++k) {
        const double kd = static_cast<double>(k);
        term *= y / (kd * (nu + kd));
        sum += term;
        if (term <= kSeriesTolerance * sum && kd * (nu + kd) >= y) return sum;
    }
    throw NumericError("series did not converge within " + std::to_string(kMaxSeriesTerms) + " terms");
}

double empty_probability(const QueueParams& p) {
    const double g = p.gamma();
    const double d = p.delta();
    return 1.0 / (1.0 + d / (g * p.beta) * bessel_i_scaled(g, d));
}

}  // namespace

double little_mean_length(double lambda, double mean_wait) {
    if (!(lambda >= 0.0 && mean_wait >= 0.0)) throw ValidationError("Little's law needs lambda >= 0 and W >= 0");
    return lambda * mean_wait;
}

double mm1_queue_pmf(double rho, std::size_t l) {
    if (!(rho >= 0.0)) throw ValidationError("load must be >= 0");
    if (!(rho < 1.0)) throw ValidationError("no statistical equilibrium: rho >= 1");
    return (1.0 - rho) * std::pow(rho, static_cast<double>(l));
}

double mm1_wait_pdf(double lambda, double mu, double w) {
    require_patient(lambda, mu);
    if (w < 0.0) return 0.0;
    return (mu - lambda) * std::exp(-(mu - lambda) * w);
}

double mm1_wait_cdf(double lambda, double mu, double w) {
    require_patient(lambda, mu);
    if (w < 0.0) return 0.0;
    return -std::expm1(-(mu - lambda) * w);
}

double balk_join_probability(double beta, std::size_t l) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("balking willingness must be in [0, 1]");
    if (l == 0) return 1.0;
    return std::min(1.0, beta / static_cast<double>(l));
}

void validate_impatient(const QueueParams& p) {
    if (!(p.lambda > 0.0 && std::isfinite(p.lambda))) throw ValidationError("lambda must be > 0");
    if (!(p.mu > 0.0 && std::isfinite(p.mu))) throw ValidationError("mu must be > 0");
    if (!(p.alpha > 0.0 && std::isfinite(p.alpha))) throw ValidationError("alpha must be > 0");
    if (!(p.beta > 0.0 && p.beta <= 1.0)) throw ValidationError("beta must be in (0, 1]");
}

double impatient_queue_pmf(const QueueParams& p, std::size_t l) {
    validate_impatient(p);
    const double p0 = empty_probability(p);
    if (l == 0) return p0;
    const double g = p.gamma();
    const double ld = static_cast<double>(l);
    // delta^l p0 / (beta (l-1)! gamma (gamma+1) ... (gamma+l-1))
    const double log_p = ld * std::log(p.delta()) + std::log(p0) - std::log(p.beta) - std::lgamma(ld) -
                         (std::lgamma(g + ld) - std::lgamma(g));
    return std::exp(log_p);
}

std::vector<double> impatient_queue_pmf_table(const QueueParams& p, double tail) {
    validate_impatient(p);
    std::vector<double> out{empty_probability(p)};
    const double g = p.gamma();
    const double d = p.delta();
    double value = out[0] * d / (p.beta * g);  // p(1)
    for (std::size_t l = 1; l <= kMaxSeriesTerms; ++l) {
        out.push_back(value);
        const double ld = static_cast<double>(l);
        const double ratio = d / (ld * (g + ld));  // p(l+1) / p(l)
        if (value < tail && ratio < 1.0) return out;
        value *= ratio;
    }
    throw NumericError("queue-length distribution tail did not fall below " + std::to_string(tail));
}

AcceptanceProbabilities acceptance_probabilities(const QueueParams& p) {
    validate_impatient(p);
    const double g = p.gamma();
    const double d = p.delta();
    const double p0 = empty_probability(p);
    AcceptanceProbabilities out;
    out.accepted = (1.0 - p0) * p.beta * g / d;
    out.accepted_joined = out.accepted - p0;
    // Gamma(g+1) I_g(2 sqrt d) - d^{g/2}  over  sqrt(d) Gamma(g) I_{g-1}(2 sqrt d) - d^{g/2};
    // both sides carry the common factor d^{g/2}.
    out.accepted_given_joined = scaled_series_tail(g, d) / scaled_series_tail(g - 1.0, d);
    return out;
}

WaitDistributions::WaitDistributions(const QueueParams& p) : p_(p) {
    validate_impatient(p);
    p0_ = empty_probability(p);
    prob_ = acceptance_probabilities(p);
}

double WaitDistributions::accepted_pdf(double w) const {
    if (w < 0.0) return 0.0;
    const double x = p_.delta() * -std::expm1(-p_.alpha * w);
    return p0_ * p_.lambda * p_.beta * std::exp(-(p_.mu + p_.alpha) * w) * bessel_i1_ratio(x) /
           prob_.accepted_joined;
}

double WaitDistributions::g(double w) const {
    if (w <= 0.0) return 0.0;
    const double c = p0_ * p_.lambda * p_.beta / prob_.accepted_joined;
    // e^{alpha xi} f_a(xi) with the exponentials combined.
    auto integrand = [&](double xi) {
        const double x = p_.delta() * -std::expm1(-p_.alpha * xi);
        return c * std::exp(-p_.mu * xi) * bessel_i1_ratio(x);
    };
    return integrate(integrand, 0.0, w, 1e-10);
}

double WaitDistributions::reneged_pdf(double w) const {
    if (w < 0.0) return 0.0;
    const double pj = prob_.accepted_given_joined;
    return p_.alpha * std::exp(-p_.alpha * w) * (1.0 - pj * g(w)) / (1.0 - pj);
}

double WaitDistributions::queued_pdf(double w) const {
    if (w < 0.0) return 0.0;
    const double e = p_.alpha * std::exp(-p_.alpha * w);
    return prob_.accepted_given_joined * (accepted_pdf(w) - e * g(w)) + e;
}

WaitDistributions wait_distributions(const QueueParams& p) { return WaitDistributions(p); }

WaitMeans wait_means(const QueueParams& p) {
    const WaitDistributions dist(p);
    const auto& prob = dist.probabilities();
    const double inf = std::numeric_limits<double>::infinity();
    WaitMeans m;
    // Integrate in units of 1/(mu + alpha), the decay scale of the densities.
    const double sc = 1.0 / (p.mu + p.alpha);
    const auto mean_of = [&](double (WaitDistributions::*pdf)(double) const, double tol) {
        return sc * sc * integrate([&](double x) { return x * (dist.*pdf)(sc * x); }, 0.0, inf, tol);
    };
    m.accepted = mean_of(&WaitDistributions::accepted_pdf, 1e-10);
    m.reneged = mean_of(&WaitDistributions::reneged_pdf, 1e-9);
    m.queued = mean_of(&WaitDistributions::queued_pdf, 1e-9);

    const double g = p.gamma();
    const double d = p.delta();
    double term = 1.0;  // delta^i / (i! prod_{j=1..i} (gamma+j))
    double harmonic = 0.0;
    double sum = 0.0;
    for (std::size_t i = 1;; ++i) {
        if (i > kMaxSeriesTerms) throw NumericError("mean-wait series did not converge");
        const double id = static_cast<double>(i);
        term *= d / (id * (g + id));
        harmonic += 1.0 / (g + id);
        const double add = term * harmonic;
        sum += add;
        if (add <= kSeriesTolerance * sum && id * (g + id) >= d) break;
    }
    m.accepted_series = empty_probability(p) / (p.alpha * prob.accepted_joined) * sum;
    m.reneged_identity = 1.0 / p.alpha - prob.accepted_given_joined * m.accepted / (1.0 - prob.accepted_given_joined);
    m.queued_formula = (1.0 - prob.accepted_given_joined) / p.alpha;
    return m;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    if (std::isfinite(a) && std::isfinite(b)) {
        // Boost's error estimate breaks down on very short intervals, so map
        // finite ranges onto [0, 1].
        const double h = b - a;
        value = h * GK::integrate([&](double t) { return f(a + h * t); }, 0.0, 1.0, 15, tol, &error, &l1);
        error *= std::abs(h);
        l1 *= std::abs(h);
    } else {
        value = GK::integrate(f, a, b, 15, tol, &error, &l1);
    }
    if (!std::isfinite(value) || error > 10.0 * tol * l1) {
        std::ostringstream os;
        os << "quadrature did not converge (error estimate " << error << ", L1 " << l1 << " on [" << a << ", " << b
           << "])";
        throw NumericError(os.str());
    }
    return value;
}

}  // namespace slicesim
