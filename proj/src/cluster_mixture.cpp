#include "pclust/cluster_mixture.hpp"

#include "pclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pclust {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

std::size_t choose_type(const std::vector<double>& phi, double u) {
    double running = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi[i] <= 0.0) continue;
        last_positive = i;
        running += phi[i];
        if (u < running) return i;
    }
    return last_positive;
}

NormConstMethod component_method(const DPParams& component, const NormConstMethod& method) {
    if (std::holds_alternative<EfronApprox>(method)) return method;
    return exact_truncation(component);
}

} // namespace

TickMultipleSet::TickMultipleSet(std::initializer_list<int> multiples)
    : TickMultipleSet(std::vector<int>(multiples)) {}

TickMultipleSet::TickMultipleSet(std::vector<int> multiples) : multiples_(std::move(multiples)) {
    if (multiples_.empty() || multiples_.front() != 1) {
        throw DomainError("tick multiple set must start with 1");
    }
    for (std::size_t i = 1; i < multiples_.size(); ++i) {
        if (multiples_[i] <= multiples_[i - 1]) {
            throw DomainError("tick multiples must be strictly increasing");
        }
    }
}

void validate(const MixtureParams& mp) {
    validate(mp.dp);
    if (mp.phi.size() != mp.multiples.size()) {
        throw DomainError("trader portions must match the tick multiple set");
    }
    double total = 0.0;
    for (double w : mp.phi) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("trader portions must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        throw DomainError("trader portions must sum to one, got " + std::to_string(total));
    }
}

DPParams derive_trader_params(const DPParams& dp, int k) {
    if (k < 1) throw DomainError("tick multiple must be positive");
    return {dp.mu / k, dp.alpha + std::log(static_cast<double>(k))};
}

double trader_pmf(const DPParams& dp, int k, std::int64_t y, const NormConstMethod& method) {
    if (y < 0) throw DomainError("prices must be nonnegative");
    const DPParams component = derive_trader_params(dp, k);
    if (y % k != 0) return 0.0;
    return pmf(component, y / k, component_method(component, method));
}

double mixture_pmf(const MixtureParams& mp, std::int64_t y, const NormConstMethod& method) {
    validate(mp);
    double total = 0.0;
    for (std::size_t i = 0; i < mp.multiples.size(); ++i) {
        if (mp.phi[i] == 0.0) continue;
        total += mp.phi[i] * trader_pmf(mp.dp, mp.multiples[i], y, method);
    }
    return total;
}

double component_base_term(std::int64_t y, int k) {
    if (y % k != 0) return -std::numeric_limits<double>::infinity();
    const double q = static_cast<double>(y / k);
    const double stirling = q == 0.0 ? 0.0 : q * std::log(q) - q - std::lgamma(q + 1.0);
    return 0.5 * std::log(static_cast<double>(k)) + stirling;
}

double mixture_log_lik(const MixtureParams& mp, std::int64_t y, const NormConstMethod& method) {
    validate(mp);
    if (y < 1) throw DomainError("prices must be strictly positive, got " + std::to_string(y));
    const double ea = std::exp(mp.dp.alpha);
    const double yd = static_cast<double>(y);
    const double shared = 0.5 * mp.dp.alpha - ea * poisson_deviance_half(yd, mp.dp.mu);

    // ln sum_k phi_k 1{k|y} sqrt(k) / C_k (y/k)^(y/k) / (y/k)! e^(-y/k)
    std::vector<double> term;
    term.reserve(mp.multiples.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mp.multiples.size(); ++i) {
        const int k = mp.multiples[i];
        if (mp.phi[i] == 0.0 || y % k != 0) continue;
        const DPParams component = derive_trader_params(mp.dp, k);
        const double t = std::log(mp.phi[i]) + component_base_term(y, k) -
                         log_norm_const(component, component_method(component, method));
        term.push_back(t);
        peak = std::max(peak, t);
    }
    if (term.empty()) return -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double t : term) sum += std::exp(t - peak);
    return shared + peak + std::log(sum);
}

std::int64_t draw(const MixtureParams& mp, Rng& rng) {
    const std::size_t chosen = choose_type(mp.phi, rng.uniform());
    const int k = mp.multiples[chosen];
    return k * draw(derive_trader_params(mp.dp, k), rng);
}

std::vector<std::int64_t> mixture_sample(const MixtureParams& mp, std::uint64_t rng_seed, std::size_t n) {
    validate(mp);
    if (n == 0) throw DomainError("sample size must be positive");
    std::vector<DPSampler> samplers;
    samplers.reserve(mp.multiples.size());
    for (int k : mp.multiples.multiples()) samplers.emplace_back(derive_trader_params(mp.dp, k));
    Rng rng(rng_seed);
    std::vector<std::int64_t> out(n);
    for (auto& y : out) {
        const std::size_t chosen = choose_type(mp.phi, rng.uniform());
        y = mp.multiples[chosen] * samplers[chosen](rng);
    }
    return out;
}

} // namespace pclust
