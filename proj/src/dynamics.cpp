#include "pclust/dynamics.hpp"

#include "pclust/cluster_mixture.hpp"
#include "pclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pclust {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_strength(double h) { return h > 0.0 ? std::log(h) : kNegInf; }

void require_stationary(const StaticParams& theta) {
    if (!(std::abs(theta.b) < 1.0) || !(std::abs(theta.f) < 1.0)) {
        throw DomainError("stationary initialization needs |b| < 1 and |f| < 1");
    }
}

double clamp_alpha(double alpha, bool& clamped) {
    clamped = alpha > kAlphaBound || alpha < -kAlphaBound;
    return std::clamp(alpha, -kAlphaBound, kAlphaBound);
}

std::vector<double> draw_lognormal(Rng& rng, std::size_t n, double log_sd, double mean) {
    std::vector<double> out(n);
    for (auto& v : out) v = mean * std::exp(log_sd * rng.normal() - 0.5 * log_sd * log_sd);
    return out;
}

} // namespace

std::array<double, StaticParams::size> StaticParams::to_array() const {
    return {c, b, a, d, f, g1, g2, g3, g4, h5, h10};
}

StaticParams StaticParams::from_array(const std::array<double, size>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
}

void validate(const StaticParams& theta) {
    for (double v : theta.to_array()) {
        if (!std::isfinite(v)) throw DomainError("static parameters must be finite");
    }
    if (theta.h5 < 0.0 || theta.h10 < 0.0) throw DomainError("type strengths h5, h10 must be nonnegative");
}

StaticParams reference_params(double h5, double h10) {
    return {5.00, 0.09, 0.30, -0.29, 0.39, -0.14, 0.18, 0.03, -0.71, h5, h10};
}

void validate(const TickSeries& ts) {
    const std::size_t n = ts.size();
    if (ts.day.size() != n || ts.time.size() != n || ts.duration.size() != n || ts.volume.size() != n) {
        throw DomainError("tick series columns differ in length");
    }
    if ((!ts.duration_std.empty() && ts.duration_std.size() != n) ||
        (!ts.volume_std.empty() && ts.volume_std.size() != n)) {
        throw DomainError("standardized covariates differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (ts.price[i] < 1) throw DomainError("prices must be at least one tick at index " + std::to_string(i));
        if (!(ts.volume[i] > 0.0)) throw DomainError("volumes must be positive at index " + std::to_string(i));
        if (ts.segment_start(i)) continue;
        if (ts.day[i] < ts.day[i - 1]) throw DomainError("days must be nondecreasing");
        if (!(ts.time[i] > ts.time[i - 1])) {
            throw DomainError("timestamps must be strictly increasing at index " + std::to_string(i));
        }
        if (!(ts.duration[i] > 0.0)) throw DomainError("durations must be positive at index " + std::to_string(i));
    }
}

TickSeries standardize_exogenous(TickSeries ts) {
    validate(ts);
    double z_sum = 0.0;
    std::size_t z_count = 0;
    double v_sum = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!ts.segment_start(i)) {
            z_sum += ts.duration[i];
            ++z_count;
        }
        v_sum += ts.volume[i];
    }
    const double z_mean = z_count > 0 ? z_sum / static_cast<double>(z_count) : 1.0;
    const double v_mean = ts.size() > 0 ? v_sum / static_cast<double>(ts.size()) : 1.0;
    ts.duration_std.resize(ts.size());
    ts.volume_std.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts.duration_std[i] = ts.segment_start(i) ? std::numeric_limits<double>::quiet_NaN() : ts.duration[i] / z_mean;
        ts.volume_std[i] = ts.volume[i] / v_mean;
    }
    return ts;
}

std::array<double, 3> log_portions(double eta, double h5, double h10) {
    const double l5 = log_strength(h5);
    const double l10 = log_strength(h10);
    const double peak = std::max({eta, l5, l10});
    const double lse = peak + std::log(std::exp(eta - peak) + std::exp(l5 - peak) + std::exp(l10 - peak));
    return {eta - lse, l5 - lse, l10 - lse};
}

std::array<double, 3> portions(double eta, double h5, double h10) {
    const auto lp = log_portions(eta, h5, h10);
    return {std::exp(lp[0]), std::exp(lp[1]), std::exp(lp[2])};
}

FilterState initial_state(const StaticParams& theta, std::int64_t first_price, const InitPolicy& init) {
    validate(theta);
    require_stationary(theta);
    FilterState s;
    s.mu = static_cast<double>(first_price);
    s.alpha = clamp_alpha(theta.c / (1.0 - theta.b), s.clamped);
    const double log_price = std::log(s.mu);
    s.eta = (theta.g1 * log_price + theta.g2 * (log_price - s.alpha) + theta.g3 * init.mean_log_duration +
             theta.g4 * init.mean_log_volume) /
            (1.0 - theta.f);
    s.phi = portions(s.eta, theta.h5, theta.h10);
    return s;
}

FilterState filter_step(const StaticParams& theta, const FilterState& prev, std::int64_t y_prev,
                        std::int64_t y_prev2, double z, double v, std::size_t t) {
    FilterState next;
    next.mu = static_cast<double>(y_prev);
    const double score_term =
        0.5 - std::exp(prev.alpha) * poisson_deviance_half(static_cast<double>(y_prev), static_cast<double>(y_prev2));
    const double log_z = std::log(z);
    const double alpha = theta.c + theta.b * prev.alpha + theta.a * score_term + theta.d * log_z;
    if (!std::isfinite(alpha)) throw FilterDivergence(t, "dispersion recursion is not finite");
    next.alpha = clamp_alpha(alpha, next.clamped);
    const double log_mu = std::log(next.mu);
    next.eta = theta.f * prev.eta + theta.g1 * log_mu + theta.g2 * (log_mu - next.alpha) + theta.g3 * log_z +
               theta.g4 * std::log(v);
    if (!std::isfinite(next.eta)) throw FilterDivergence(t, "portion driver is not finite");
    next.phi = portions(next.eta, theta.h5, theta.h10);
    return next;
}

FilterPath filter_series(const StaticParams& theta, const TickSeries& input, const InitPolicy& init) {
    validate(theta);
    if (input.size() < 3) throw DomainError("filtering needs at least three trades");
    const TickSeries standardized = input.standardized() ? TickSeries{} : standardize_exogenous(input);
    const TickSeries& ts = input.standardized() ? input : standardized;

    const std::size_t n = ts.size();
    FilterPath path;
    for (auto* column : {&path.mu, &path.alpha, &path.eta, &path.phi1, &path.phi5, &path.phi10, &path.loglik}) {
        column->resize(n);
    }
    const TickMultipleSet multiples{1, 5, 10};
    FilterState state;
    std::size_t position = 0;  // index within the current segment
    for (std::size_t t = 0; t < n; ++t) {
        position = ts.segment_start(t) ? 0 : position + 1;
        if (position == 0) {
            state = initial_state(theta, ts.price[t], init);
        } else if (position == 1) {
            state.mu = static_cast<double>(ts.price[t - 1]);
        } else {
            state = filter_step(theta, state, ts.price[t - 1], ts.price[t - 2], ts.duration_std[t], ts.volume_std[t], t);
        }
        path.n_clamped += state.clamped ? 1 : 0;
        path.mu[t] = state.mu;
        path.alpha[t] = state.alpha;
        path.eta[t] = state.eta;
        path.phi1[t] = state.phi[0];
        path.phi5[t] = state.phi[1];
        path.phi10[t] = state.phi[2];
        if (position < 2) {
            path.loglik[t] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const MixtureParams mp{{state.mu, state.alpha}, multiples, {state.phi[0], state.phi[1], state.phi[2]}};
        const double ll = mixture_log_lik(mp, ts.price[t]);
        path.loglik[t] = ll;
        path.loglik_total += ll;
        ++path.n_contrib;
    }
    return path;
}

LikelihoodKernel::LikelihoodKernel(const TickSeries& input) {
    const TickSeries ts = input.standardized() ? input : standardize_exogenous(input);
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= ts.size(); ++i) {
        if (i < ts.size() && !ts.segment_start(i)) continue;
        // Segment [begin, i).
        if (i - begin >= 3) {
            Segment seg{ticks_.size(), 0, std::log(static_cast<double>(ts.price[begin]))};
            for (std::size_t t = begin + 2; t < i; ++t) {
                const double y = static_cast<double>(ts.price[t]);
                const double y1 = static_cast<double>(ts.price[t - 1]);
                const double y2 = static_cast<double>(ts.price[t - 2]);
                Tick tk{};
                tk.index = t;
                tk.log_mu = std::log(y1);
                tk.mu = y1;
                tk.deviance = poisson_deviance_half(y, y1);
                tk.score_deviance = poisson_deviance_half(y1, y2);
                tk.log_z = std::log(ts.duration_std[t]);
                tk.log_v = std::log(ts.volume_std[t]);
                tk.weight1 = std::exp(component_base_term(ts.price[t], 1));
                tk.weight5 = std::exp(component_base_term(ts.price[t], 5));
                tk.weight10 = std::exp(component_base_term(ts.price[t], 10));
                ticks_.push_back(tk);
            }
            seg.end = ticks_.size();
            segments_.push_back(seg);
        }
        begin = i;
    }
    n_contrib_ = ticks_.size();
}

double LikelihoodKernel::total_loglik(const StaticParams& theta) const {
    validate(theta);
    require_stationary(theta);
    const double strength = theta.h5 + theta.h10;
    const double alpha_init = theta.c / (1.0 - theta.b);
    double total = 0.0;
    for (const Segment& seg : segments_) {
        bool clamped = false;
        double alpha = clamp_alpha(alpha_init, clamped);
        double eta = (theta.g1 * seg.log_first_price + theta.g2 * (seg.log_first_price - alpha)) / (1.0 - theta.f);
        double ea_prev = std::exp(alpha);
        for (std::size_t i = seg.begin; i < seg.end; ++i) {
            const Tick& tk = ticks_[i];
            const double raw_alpha =
                theta.c + theta.b * alpha + theta.a * (0.5 - ea_prev * tk.score_deviance) + theta.d * tk.log_z;
            if (!std::isfinite(raw_alpha)) throw FilterDivergence(tk.index, "dispersion recursion is not finite");
            alpha = clamp_alpha(raw_alpha, clamped);
            const double ea = std::exp(alpha);
            eta = theta.f * eta + theta.g1 * tk.log_mu + theta.g2 * (tk.log_mu - alpha) + theta.g3 * tk.log_z +
                  theta.g4 * tk.log_v;
            if (!std::isfinite(eta)) throw FilterDivergence(tk.index, "portion driver is not finite");

            // Portions as 1 / (1 + S e^-eta) and h e^-eta / (1 + S e^-eta), arranged to avoid overflow.
            double phi1 = 0.0;
            double per_strength = 0.0;
            if (strength == 0.0) {
                phi1 = 1.0;
            } else if (eta >= 0.0) {
                const double w = std::exp(-eta);
                phi1 = 1.0 / (1.0 + strength * w);
                per_strength = w * phi1;
            } else {
                const double u = std::exp(eta);
                const double denom = u + strength;
                phi1 = u / denom;
                per_strength = 1.0 / denom;
            }
            // Efron constant of component k: 1 + (1 - k e^a) / (12 e^a mu) (1 + 1 / (e^a mu)).
            const double scale = ea * tk.mu;
            const double inv = (1.0 + 1.0 / scale) / (12.0 * scale);
            const double c1 = 1.0 + (1.0 - ea) * inv;
            if (!(c1 > 0.0)) throw DomainError("Efron normalizing constant is not positive");
            double mix = phi1 * tk.weight1 / c1;
            if (tk.weight5 > 0.0 && theta.h5 > 0.0) {
                const double c5 = 1.0 + (1.0 - 5.0 * ea) * inv;
                if (!(c5 > 0.0)) throw DomainError("Efron normalizing constant is not positive");
                mix += theta.h5 * per_strength * tk.weight5 / c5;
            }
            if (tk.weight10 > 0.0 && theta.h10 > 0.0) {
                const double c10 = 1.0 + (1.0 - 10.0 * ea) * inv;
                if (!(c10 > 0.0)) throw DomainError("Efron normalizing constant is not positive");
                mix += theta.h10 * per_strength * tk.weight10 / c10;
            }
            total += 0.5 * alpha - ea * tk.deviance + std::log(mix);
            ea_prev = ea;
        }
    }
    return total;
}

TickSeries simulate(const StaticParams& theta, const ExogenousPolicy& exo, std::int64_t y0, std::uint64_t rng_seed,
                    std::size_t n) {
    validate(theta);
    require_stationary(theta);
    if (n < 3) throw DomainError("simulation needs at least three trades");
    if (y0 < 1) throw DomainError("starting price must be at least one tick");

    Rng rng(rng_seed);
    std::vector<double> durations;
    std::vector<double> volumes;
    if (const auto* fixed = std::get_if<FixedExogenous>(&exo.source)) {
        if (fixed->durations.size() < n || fixed->volumes.size() < n) {
            throw DomainError("fixed covariate series are shorter than the simulation");
        }
        durations.assign(fixed->durations.begin(), fixed->durations.begin() + static_cast<std::ptrdiff_t>(n));
        volumes.assign(fixed->volumes.begin(), fixed->volumes.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
        const auto& ln = std::get<LogNormalExogenous>(exo.source);
        durations = draw_lognormal(rng, n, ln.duration_log_sd, ln.mean_duration);
        volumes = draw_lognormal(rng, n, ln.volume_log_sd, ln.mean_volume);
    }

    TickSeries ts;
    ts.day.resize(n);
    ts.time.resize(n);
    ts.price.resize(n);
    ts.duration.resize(n);
    ts.volume = volumes;
    const double close = exo.open_time + exo.session_seconds;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            ts.day[i] = 0;
            ts.time[i] = exo.open_time;
            ts.duration[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double next = ts.time[i - 1] + durations[i];
        if (exo.session_seconds > 0.0 && next > close) {
            ts.day[i] = ts.day[i - 1] + 1;
            ts.time[i] = exo.open_time;
            ts.duration[i] = std::numeric_limits<double>::quiet_NaN();
        } else {
            ts.day[i] = ts.day[i - 1];
            ts.time[i] = next;
            ts.duration[i] = durations[i];
        }
    }
    ts.price.assign(n, 1);  // placeholder so validation inside standardization passes
    ts = standardize_exogenous(std::move(ts));

    const TickMultipleSet multiples{1, 5, 10};
    FilterState state;
    std::size_t position = 0;
    for (std::size_t t = 0; t < n; ++t) {
        position = ts.segment_start(t) ? 0 : position + 1;
        if (position == 0) {
            ts.price[t] = t == 0 ? y0 : ts.price[t - 1];
            state = initial_state(theta, ts.price[t]);
            continue;
        }
        if (position == 1) {
            state.mu = static_cast<double>(ts.price[t - 1]);
        } else {
            state = filter_step(theta, state, ts.price[t - 1], ts.price[t - 2], ts.duration_std[t], ts.volume_std[t], t);
        }
        const MixtureParams mp{{state.mu, state.alpha}, multiples, {state.phi[0], state.phi[1], state.phi[2]}};
        const std::int64_t y = draw(mp, rng);
        if (y < 1) throw SimulationError("simulated price reached zero at t=" + std::to_string(t));
        ts.price[t] = y;
    }
    return ts;
}

} // namespace pclust
