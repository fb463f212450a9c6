#pragma once

// Closed-form queueing laws for a single slice queue.
//
// Patient tenants: the queue is M/M/1 with load rho = lambda/mu.
// Impatient tenants: hyperbolic balking (join probability beta/l when l
// requests are present) and exponential reneging with rate alpha. The closed
// forms are those of the Ancker-Gafarian queue: the head-of-line request is
// being served and does not renege, and l counts it.

#include <cstddef>
#include <functional>
#include <vector>

namespace slicesim {

struct QueueParams {
    double lambda = 1.0;  ///< arrival rate
    double mu = 1.0;      ///< acceptance (service) rate
    double alpha = 0.0;   ///< reneging rate
    double beta = 1.0;    ///< balking willingness

    [[nodiscard]] double gamma() const noexcept { return mu / alpha; }
    [[nodiscard]] double delta() const noexcept { return lambda * beta / alpha; }
    [[nodiscard]] double rho() const noexcept { return lambda / mu; }
};

/// L = lambda * W.
[[nodiscard]] double little_mean_length(double lambda, double mean_wait);

/// (1 - rho) rho^l. Throws ValidationError for rho >= 1 (no equilibrium).
[[nodiscard]] double mm1_queue_pmf(double rho, std::size_t l);

/// Exponential law with rate mu - lambda. Throws ValidationError unless mu > lambda.
[[nodiscard]] double mm1_wait_pdf(double lambda, double mu, double w);
[[nodiscard]] double mm1_wait_cdf(double lambda, double mu, double w);

/// 1 for l = 0, else min(1, beta/l).
[[nodiscard]] double balk_join_probability(double beta, std::size_t l);

/// Throws ValidationError unless lambda, mu, alpha > 0 and 0 < beta <= 1.
void validate_impatient(const QueueParams& p);

[[nodiscard]] double impatient_queue_pmf(const QueueParams& p, std::size_t l);

/// p(0), p(1), ... up to the first l > 0 with p(l) < tail (and p decreasing).
[[nodiscard]] std::vector<double> impatient_queue_pmf_table(const QueueParams& p, double tail = 1e-12);

struct AcceptanceProbabilities {
    double accepted = 0.0;         ///< P(A)
    double accepted_joined = 0.0;  ///< P(A, J) = P(A) - p(0)
    double accepted_given_joined = 0.0;  ///< P(A | J)
};

[[nodiscard]] AcceptanceProbabilities acceptance_probabilities(const QueueParams& p);

/// Waiting-time densities of requests that join: accepted (f_a), reneged
/// (f_r) and all (f_q). g(W) = int_0^W e^{alpha xi} f_a(xi) dxi is evaluated
/// by adaptive quadrature.
class WaitDistributions {
public:
    explicit WaitDistributions(const QueueParams& p);

    [[nodiscard]] double accepted_pdf(double w) const;
    [[nodiscard]] double reneged_pdf(double w) const;
    [[nodiscard]] double queued_pdf(double w) const;
    [[nodiscard]] double g(double w) const;

    [[nodiscard]] const QueueParams& params() const noexcept { return p_; }
    [[nodiscard]] const AcceptanceProbabilities& probabilities() const noexcept { return prob_; }

private:
    QueueParams p_;
    double p0_;
    AcceptanceProbabilities prob_;
};

[[nodiscard]] WaitDistributions wait_distributions(const QueueParams& p);

struct WaitMeans {
    // Normative values, by quadrature of the densities.
    double accepted = 0.0;  ///< mean wait of accepted requests
    double reneged = 0.0;   ///< mean wait of reneging requests
    double queued = 0.0;    ///< mean wait of all joining requests

    // Cross-checks from the series and identities.
    double accepted_series = 0.0;   ///< p0/(alpha P(A,J)) sum_i delta^i/(i! prod_{j=1..i}(gamma+j)) sum_{k<=i} 1/(gamma+k)
    double reneged_identity = 0.0;  ///< 1/alpha - P(A|J) W_a / (1 - P(A|J))
    double queued_formula = 0.0;    ///< (1 - P(A|J)) / alpha
};

[[nodiscard]] WaitMeans wait_means(const QueueParams& p);

/// int_a^b f by adaptive Gauss-Kronrod; b may be +inf. Throws NumericError if
/// the error estimate exceeds tol * max(1, |result|).
[[nodiscard]] double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

}  // namespace slicesim
