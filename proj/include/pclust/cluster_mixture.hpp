#pragma once

#include "pclust/double_poisson.hpp"

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace pclust {

/// Tick multiples k_1 = 1 < k_2 < ... < k_m that trader types are restricted to.
class TickMultipleSet {
public:
    TickMultipleSet() : TickMultipleSet({1, 5, 10}) {}
    TickMultipleSet(std::initializer_list<int> multiples);
    explicit TickMultipleSet(std::vector<int> multiples);

    [[nodiscard]] const std::vector<int>& multiples() const noexcept { return multiples_; }
    [[nodiscard]] std::size_t size() const noexcept { return multiples_.size(); }
    [[nodiscard]] int operator[](std::size_t i) const { return multiples_[i]; }

    friend bool operator==(const TickMultipleSet&, const TickMultipleSet&) = default;

private:
    std::vector<int> multiples_;
};

/// Location/dispersion plus one trader portion per tick multiple.
struct MixtureParams {
    DPParams dp;
    TickMultipleSet multiples;
    std::vector<double> phi;  // aligned with multiples
};

/// Throws DomainError unless phi is a probability vector matching the multiples.
void validate(const MixtureParams& mp);

/// Component parameters (mu / k, alpha + ln k) keeping mean mu and variance mu e^-alpha.
[[nodiscard]] DPParams derive_trader_params(const DPParams& dp, int k);

[[nodiscard]] double trader_pmf(const DPParams& dp, int k, std::int64_t y,
                                const NormConstMethod& method = EfronApprox{});

[[nodiscard]] double mixture_pmf(const MixtureParams& mp, std::int64_t y,
                                 const NormConstMethod& method = EfronApprox{});

/// Closed-form mixture log likelihood of a strictly positive price y.
///
/// `method` selects how each component constant C(mu / k, alpha + ln k) is
/// evaluated; TruncatedSum cutoffs are taken per component via exact_truncation.
[[nodiscard]] double mixture_log_lik(const MixtureParams& mp, std::int64_t y,
                                     const NormConstMethod& method = EfronApprox{});

/// The price-independent part of one mixture term: ln(sqrt(k)) + q ln q - q - ln q!
/// with q = y / k. Undefined (negative infinity) when k does not divide y.
[[nodiscard]] double component_base_term(std::int64_t y, int k);

/// Two-stage draw: trader type from phi, then k times a component draw.
[[nodiscard]] std::int64_t draw(const MixtureParams& mp, Rng& rng);

[[nodiscard]] std::vector<std::int64_t> mixture_sample(const MixtureParams& mp, std::uint64_t rng_seed,
                                                       std::size_t n);

} // namespace pclust
