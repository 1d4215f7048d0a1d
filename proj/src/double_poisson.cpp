#include "pclust/double_poisson.hpp"

#include "pclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pclust {

namespace {

// Edge terms below peak * e^-40 leave omitted tail mass well under 1e-12.
constexpr double kTailLogRatio = -40.0;
constexpr double kMaxSupport = 9.0e15;

double log_sum_exp_terms(const DPParams& p, std::int64_t lo, std::int64_t hi) {
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t y = lo; y <= hi; ++y) {
        terms.push_back(log_pmf_unnormalized(p, y));
        peak = std::max(peak, terms.back());
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return peak + std::log(sum);
}

} // namespace

void validate(const DPParams& p) {
    if (!(p.mu > 0.0) || !std::isfinite(p.mu)) {
        throw DomainError("double Poisson location must be finite and positive, got " + std::to_string(p.mu));
    }
    if (!std::isfinite(p.alpha)) {
        throw DomainError("double Poisson dispersion must be finite");
    }
}

double poisson_deviance_half(double y, double mu) {
    if (y == 0.0) return mu;
    if (std::abs(y - mu) < 0.1 * (y + mu)) {
        // Series in v = (y - mu) / (y + mu), converges fast for |v| < 0.1.
        double v = (y - mu) / (y + mu);
        double s = (y - mu) * v;
        double ej = 2.0 * y * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double next = s + ej / (2 * j + 1);
            if (next == s) return next;
            s = next;
        }
        return s;
    }
    return y * std::log(y / mu) + mu - y;
}

double log_pmf_unnormalized(const DPParams& p, std::int64_t y) {
    if (y < 0) return -std::numeric_limits<double>::infinity();
    const double yd = static_cast<double>(y);
    // y ln y - y - ln y!, with 0 ln 0 = 0 at y = 0.
    const double stirling = y == 0 ? 0.0 : yd * std::log(yd) - yd - std::lgamma(yd + 1.0);
    return stirling + 0.5 * p.alpha - std::exp(p.alpha) * poisson_deviance_half(yd, p.mu);
}

TruncatedSum exact_truncation(const DPParams& p) {
    const auto window = support_window(p);
    const auto twice_mean = static_cast<std::int64_t>(std::ceil(2.0 * p.mu));
    return TruncatedSum{std::max(twice_mean, window.hi)};
}

double log_norm_const(const DPParams& p, const NormConstMethod& method) {
    validate(p);
    double value = 0.0;
    if (std::holds_alternative<EfronApprox>(method)) {
        const double scale = std::exp(p.alpha) * p.mu;
        const double correction = (1.0 - std::exp(p.alpha)) / (12.0 * scale) * (1.0 + 1.0 / scale);
        if (!(correction > -1.0)) {
            throw DomainError("Efron normalizing constant is not positive for mu=" + std::to_string(p.mu) +
                              ", alpha=" + std::to_string(p.alpha));
        }
        value = std::log1p(correction);
    } else {
        const auto cutoff = std::get<TruncatedSum>(method).cutoff;
        if (static_cast<double>(cutoff) < 2.0 * p.mu) {
            throw DomainError("truncation cutoff " + std::to_string(cutoff) + " is below twice the location");
        }
        value = log_sum_exp_terms(p, 0, cutoff);
    }
    if (!std::isfinite(value)) {
        throw DomainError("normalizing constant is not finite for mu=" + std::to_string(p.mu) +
                          ", alpha=" + std::to_string(p.alpha));
    }
    return value;
}

double norm_const(const DPParams& p, const NormConstMethod& method) {
    const double value = std::exp(log_norm_const(p, method));
    if (!std::isfinite(value)) throw DomainError("normalizing constant overflows");
    return value;
}

double log_pmf(const DPParams& p, std::int64_t y, const NormConstMethod& method) {
    if (y < 0) throw DomainError("double Poisson support is the nonnegative integers");
    return log_pmf_unnormalized(p, y) - log_norm_const(p, method);
}

double pmf(const DPParams& p, std::int64_t y, const NormConstMethod& method) {
    return std::exp(log_pmf(p, y, method));
}

Moments mean_var(const DPParams& p) {
    validate(p);
    return {p.mu, p.mu * std::exp(-p.alpha)};
}

DPScore score(const DPParams& p, std::int64_t y) {
    validate(p);
    if (y < 0) throw DomainError("double Poisson support is the nonnegative integers");
    const double ea = std::exp(p.alpha);
    const double yd = static_cast<double>(y);
    return {ea / p.mu * (yd - p.mu), 0.5 - ea * poisson_deviance_half(yd, p.mu)};
}

Eigen::Matrix2d fisher_info(const DPParams& p) {
    validate(p);
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    info(0, 0) = std::exp(p.alpha) / p.mu;
    info(1, 1) = 0.5;
    return info;
}

SupportWindow support_window(const DPParams& p) {
    validate(p);
    const double sigma = std::sqrt(p.mu * std::exp(-p.alpha));
    double half = std::max(12.0 * sigma, 10.0);
    const auto center_lo = static_cast<std::int64_t>(std::floor(p.mu));
    const double peak = std::max(log_pmf_unnormalized(p, center_lo), log_pmf_unnormalized(p, center_lo + 1));
    for (int iter = 0; iter < 64; ++iter) {
        if (p.mu + half > kMaxSupport) break;
        const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(p.mu - half)));
        const auto hi = static_cast<std::int64_t>(std::ceil(p.mu + half));
        const bool lo_ok = lo == 0 || log_pmf_unnormalized(p, lo) - peak < kTailLogRatio;
        const bool hi_ok = log_pmf_unnormalized(p, hi) - peak < kTailLogRatio;
        if (lo_ok && hi_ok) return {lo, hi};
        half *= 2.0;
    }
    throw DomainError("cannot bound the support of DP(" + std::to_string(p.mu) + ", " + std::to_string(p.alpha) + ")");
}

DPSampler::DPSampler(const DPParams& p) : window_(support_window(p)) {
    const auto width = static_cast<std::size_t>(window_.hi - window_.lo + 1);
    prob_.resize(width);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < width; ++i) {
        prob_[i] = log_pmf_unnormalized(p, window_.lo + static_cast<std::int64_t>(i));
        peak = std::max(peak, prob_[i]);
    }
    double total = 0.0;
    for (double& v : prob_) {
        v = std::exp(v - peak);
        total += v;
    }
    cdf_.resize(width);
    double running = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
        prob_[i] /= total;
        running += prob_[i];
        cdf_[i] = running;
    }
    cdf_.back() = 1.0;
}

std::int64_t DPSampler::operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
    return window_.lo + idx;
}

std::int64_t draw(const DPParams& p, Rng& rng) {
    const auto window = support_window(p);
    const auto width = static_cast<std::size_t>(window.hi - window.lo + 1);
    std::vector<double> weight(width);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < width; ++i) {
        weight[i] = log_pmf_unnormalized(p, window.lo + static_cast<std::int64_t>(i));
        peak = std::max(peak, weight[i]);
    }
    double total = 0.0;
    for (double& w : weight) {
        w = std::exp(w - peak);
        total += w;
    }
    const double target = rng.uniform() * total;
    double running = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
        running += weight[i];
        if (target < running) return window.lo + static_cast<std::int64_t>(i);
    }
    return window.hi;
}

std::vector<std::int64_t> sample(const DPParams& p, std::uint64_t rng_seed, std::size_t n) {
    if (n == 0) throw DomainError("sample size must be positive");
    const DPSampler sampler(p);
    Rng rng(rng_seed);
    std::vector<std::int64_t> out(n);
    for (auto& y : out) y = sampler(rng);
    return out;
}

} // namespace pclust
