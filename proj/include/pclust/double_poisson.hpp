#pragma once

#include "pclust/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <variant>
#include <vector>

namespace pclust {

/// Double Poisson location/dispersion pair. `alpha` is the log-dispersion:
/// alpha > 0 underdispersed, alpha < 0 overdispersed, alpha == 0 Poisson.
struct DPParams {
    double mu = 1.0;
    double alpha = 0.0;
};

/// Throws DomainError unless mu is finite and positive and alpha is finite.
void validate(const DPParams& p);

/// Efron's closed-form approximation of the normalizing constant.
struct EfronApprox {};

/// Normalizing constant as the partial sum over y = 0..cutoff (cutoff >= 2 mu).
struct TruncatedSum {
    std::int64_t cutoff = 0;
};

using NormConstMethod = std::variant<EfronApprox, TruncatedSum>;

/// Truncated sum with the smallest admissible cutoff that also covers the
/// sampling window, for use as an exact reference.
[[nodiscard]] TruncatedSum exact_truncation(const DPParams& p);

[[nodiscard]] double norm_const(const DPParams& p, const NormConstMethod& method = EfronApprox{});
[[nodiscard]] double log_norm_const(const DPParams& p, const NormConstMethod& method = EfronApprox{});

/// y ln(y/mu) + mu - y, evaluated without cancellation near y == mu.
[[nodiscard]] double poisson_deviance_half(double y, double mu);

/// Log pmf without the normalizing constant: ln of the summand of the
/// normalizing series at y.
[[nodiscard]] double log_pmf_unnormalized(const DPParams& p, std::int64_t y);

[[nodiscard]] double log_pmf(const DPParams& p, std::int64_t y,
                             const NormConstMethod& method = EfronApprox{});
[[nodiscard]] double pmf(const DPParams& p, std::int64_t y,
                         const NormConstMethod& method = EfronApprox{});

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Approximate moments (mu, mu e^-alpha).
[[nodiscard]] Moments mean_var(const DPParams& p);

/// Score with respect to (mu, alpha), normalizing constant held fixed.
struct DPScore {
    double mu = 0.0;
    double alpha = 0.0;
};

[[nodiscard]] DPScore score(const DPParams& p, std::int64_t y);

/// Approximate Fisher information diag(e^alpha / mu, 1/2).
[[nodiscard]] Eigen::Matrix2d fisher_info(const DPParams& p);

/// Closed integer interval [lo, hi] outside of which the pmf mass is below 1e-12.
struct SupportWindow {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

[[nodiscard]] SupportWindow support_window(const DPParams& p);

/// Inversion sampler over the exactly renormalized pmf on support_window(p).
class DPSampler {
public:
    explicit DPSampler(const DPParams& p);

    [[nodiscard]] std::int64_t operator()(Rng& rng) const;
    [[nodiscard]] const SupportWindow& window() const noexcept { return window_; }
    /// Exactly normalized probabilities over the window, index 0 at window().lo.
    [[nodiscard]] const std::vector<double>& probabilities() const noexcept { return prob_; }

private:
    SupportWindow window_;
    std::vector<double> prob_;
    std::vector<double> cdf_;
};

/// Single draw for a one-off parameter value; cost is linear in the window width.
[[nodiscard]] std::int64_t draw(const DPParams& p, Rng& rng);

[[nodiscard]] std::vector<std::int64_t> sample(const DPParams& p, std::uint64_t rng_seed, std::size_t n);

} // namespace pclust
