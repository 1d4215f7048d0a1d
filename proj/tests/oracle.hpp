#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library; formulas are written out directly in long double.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using real = long double;

/// ln of the double Poisson series term at y, straight from the density formula.
inline real dp_log_term(real mu, real alpha, std::int64_t y) {
    const real ea = std::exp(alpha);
    const real yy = static_cast<real>(y);
    real value = alpha / 2 + ea * yy - ea * mu - yy - std::lgamma(yy + 1);
    if (y > 0) value += yy * std::log(yy) + ea * yy * std::log(mu / yy);
    return value;
}

/// Sum of the series terms over y = lo..hi, accumulated relative to the largest term.
inline real dp_series(real mu, real alpha, std::int64_t lo, std::int64_t hi) {
    real peak = -INFINITY;
    for (std::int64_t y = lo; y <= hi; ++y) peak = std::max(peak, dp_log_term(mu, alpha, y));
    real sum = 0;
    for (std::int64_t y = lo; y <= hi; ++y) sum += std::exp(dp_log_term(mu, alpha, y) - peak);
    return std::exp(peak) * sum;
}

/// Brute-force support bound: far enough that the remaining terms are negligible.
inline std::int64_t dp_upper(real mu, real alpha) {
    const real sd = std::sqrt(mu * std::exp(-alpha));
    return static_cast<std::int64_t>(std::ceil(mu + 40 * sd + 60));
}

inline std::int64_t dp_lower(real mu, real alpha) {
    const real sd = std::sqrt(mu * std::exp(-alpha));
    const real lo = std::floor(mu - 40 * sd - 60);
    return lo < 0 ? 0 : static_cast<std::int64_t>(lo);
}

/// Normalized probabilities on [lo, hi] (exact up to the negligible tails).
struct Pmf {
    std::int64_t lo = 0;
    std::vector<real> p;
};

inline Pmf dp_pmf(real mu, real alpha) {
    Pmf out;
    out.lo = dp_lower(mu, alpha);
    const std::int64_t hi = dp_upper(mu, alpha);
    const real total = dp_series(mu, alpha, out.lo, hi);
    for (std::int64_t y = out.lo; y <= hi; ++y) out.p.push_back(std::exp(dp_log_term(mu, alpha, y)) / total);
    return out;
}

inline real poisson_log_pmf(real mu, std::int64_t y) {
    const real yy = static_cast<real>(y);
    return -mu + yy * std::log(mu) - std::lgamma(yy + 1);
}

/// Mixture pmf by explicit enumeration of trader types: type k puts the
/// double Poisson of (mu/k, alpha + ln k) on y / k when k divides y.
inline real mixture_pmf(real mu, real alpha, const std::vector<int>& ks, const std::vector<real>& phi,
                        std::int64_t y) {
    real total = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const int k = ks[i];
        if (y % k != 0) continue;
        const real m = mu / k;
        const real a = alpha + std::log(static_cast<real>(k));
        const real c = dp_series(m, a, dp_lower(m, a), dp_upper(m, a));
        total += phi[i] * std::exp(dp_log_term(m, a, y / k)) / c;
    }
    return total;
}

} // namespace oracle
