#include "pclust/estimation.hpp"

#include "pclust/errors.hpp"
#include "pclust/parallel.hpp"
#include "pclust/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pclust {

namespace {

constexpr double kMinStrength = 1e-6;

// Typical movement of each unconstrained coordinate, in StaticParams order.
constexpr std::array<double, StaticParams::size> kCoordinateScale = {1.0,  1.0,  0.2,  0.2, 1.0, 0.05,
                                                                     0.05, 0.05, 0.2, 1.0, 1.0};

std::vector<std::size_t> free_indices(ModelVariant variant) {
    switch (variant) {
    case ModelVariant::NoClustering:
        return {0, 1, 2, 3};
    case ModelVariant::StaticClustering:
        return {0, 1, 2, 3, 9, 10};
    case ModelVariant::DynamicClustering:
        return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    }
    throw std::invalid_argument("unknown model variant");
}

// Keeps only the parameters the variant estimates.
StaticParams restrict_to(const StaticParams& theta, ModelVariant variant) {
    const auto values = theta.to_array();
    std::array<double, StaticParams::size> out{};
    for (std::size_t i : free_indices(variant)) out[i] = values[i];
    return StaticParams::from_array(out);
}

double encode(std::size_t i, double value) {
    switch (i) {
    case 1:
    case 4:
        return std::atanh(value);
    case 9:
    case 10:
        return std::log(std::max(value, kMinStrength));
    default:
        return value;
    }
}

double decode(std::size_t i, double value) {
    switch (i) {
    case 1:
    case 4:
        return std::tanh(value);
    case 9:
    case 10:
        return std::exp(value);
    default:
        return value;
    }
}

double price_change_log_dispersion(const TickSeries& ts) {
    double price_sum = 0.0;
    for (auto y : ts.price) price_sum += static_cast<double>(y);
    const double mean_price = price_sum / static_cast<double>(ts.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts.segment_start(i)) continue;
        const double change = static_cast<double>(ts.price[i] - ts.price[i - 1]);
        sum += change;
        sum_sq += change * change;
        ++count;
    }
    double variance = count > 1 ? (sum_sq - sum * sum / static_cast<double>(count)) / static_cast<double>(count - 1) : 0.0;
    variance = std::max(variance, 1e-2);
    return std::clamp(std::log(mean_price / variance), -10.0, 20.0);
}

std::string format_number(double value) {
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

} // namespace

std::string_view to_string(ModelVariant variant) {
    switch (variant) {
    case ModelVariant::NoClustering:
        return "none";
    case ModelVariant::StaticClustering:
        return "static";
    case ModelVariant::DynamicClustering:
        return "dynamic";
    }
    return "unknown";
}

ModelVariant parse_variant(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "none" || lower == "noclustering") return ModelVariant::NoClustering;
    if (lower == "static" || lower == "staticclustering") return ModelVariant::StaticClustering;
    if (lower == "dynamic" || lower == "dynamicclustering") return ModelVariant::DynamicClustering;
    throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

std::size_t free_parameter_count(ModelVariant variant) { return free_indices(variant).size(); }

std::vector<double> to_unconstrained(const StaticParams& theta, ModelVariant variant) {
    const auto values = theta.to_array();
    std::vector<double> u;
    for (std::size_t i : free_indices(variant)) u.push_back(encode(i, values[i]));
    return u;
}

StaticParams from_unconstrained(const std::vector<double>& u, ModelVariant variant) {
    const auto indices = free_indices(variant);
    if (u.size() != indices.size()) throw std::invalid_argument("coordinate count does not match the variant");
    std::array<double, StaticParams::size> values{};
    for (std::size_t j = 0; j < indices.size(); ++j) values[indices[j]] = decode(indices[j], u[j]);
    return StaticParams::from_array(values);
}

StaticParams neutral_start(const TickSeries& ts, ModelVariant variant) {
    StaticParams theta;
    theta.b = 0.2;
    theta.a = 0.1;
    theta.c = price_change_log_dispersion(ts) * (1.0 - theta.b);
    if (variant != ModelVariant::NoClustering) {
        theta.h5 = 0.01;
        theta.h10 = 0.01;
    }
    if (variant == ModelVariant::DynamicClustering) theta.f = 0.2;
    return theta;
}

FitResult fit_mle(const TickSeries& input, ModelVariant variant, const FitConfig& config) {
    validate(input);
    if (input.size() < 100) throw DomainError("estimation needs at least 100 trades");
    if (config.n_starts < 1) throw std::invalid_argument("at least one start is required");
    const TickSeries ts = input.standardized() ? input : standardize_exogenous(input);
    const LikelihoodKernel kernel(ts);
    if (kernel.n_contrib() == 0) throw DomainError("no trade contributes to the likelihood");

    std::vector<std::vector<double>> starts;
    const StaticParams neutral = neutral_start(ts, variant);
    starts.push_back(to_unconstrained(neutral, variant));
    for (const auto& extra : config.extra_starts) starts.push_back(to_unconstrained(restrict_to(extra, variant), variant));
    const auto indices = free_indices(variant);
    Rng rng(derive_seed(config.seed, 0));
    while (starts.size() < config.n_starts) {
        auto u = starts.front();
        for (std::size_t j = 0; j < u.size(); ++j) {
            u[j] += config.perturbation * kCoordinateScale[indices[j]] * (2.0 * rng.uniform() - 1.0);
        }
        starts.push_back(std::move(u));
    }

    const Objective objective = [&](const std::vector<double>& u) {
        return -kernel.total_loglik(from_unconstrained(u, variant));
    };

    std::vector<StartTrace> traces(starts.size());
    parallel_for(starts.size(), config.jobs, [&](std::size_t s) {
        StartTrace& trace = traces[s];
        trace.index = s;
        trace.start = from_unconstrained(starts[s], variant);
        OptimOptions options = config.optim;
        options.seed = derive_seed(config.seed, s + 1);
        OptimResult best = praxis(objective, starts[s], options);
        if (config.simplex_fallback && !best.converged && std::isfinite(best.fx)) {
            OptimOptions polish = options;
            polish.max_evals = std::max<std::size_t>(options.max_evals / 4,
                                                     options.max_evals > best.evals ? options.max_evals - best.evals : 0);
            OptimResult simplex = nelder_mead(objective, best.x, polish);
            simplex.evals += best.evals;
            simplex.method = "praxis+nelder-mead";
            if (simplex.fx <= best.fx) {
                best = std::move(simplex);
            } else {
                best.evals = simplex.evals;
            }
        }
        trace.evals = best.evals;
        trace.converged = best.converged;
        trace.method = best.method;
        trace.theta = from_unconstrained(best.x, variant);
        trace.loglik = std::isfinite(best.fx) ? -best.fx : -std::numeric_limits<double>::infinity();
    });

    std::size_t best = traces.size();
    for (std::size_t s = 0; s < traces.size(); ++s) {
        if (!std::isfinite(traces[s].loglik)) continue;
        if (best == traces.size() || traces[s].loglik > traces[best].loglik) best = s;
    }
    if (best == traces.size()) {
        std::ostringstream msg;
        msg << "all " << traces.size() << " starts diverged:";
        for (const auto& t : traces) msg << " [start " << t.index << ": " << t.evals << " evaluations]";
        throw EstimationFailure(msg.str());
    }

    FitResult result;
    result.variant = variant;
    result.theta_hat = traces[best].theta;
    result.path = filter_series(result.theta_hat, ts);
    result.loglik_total = result.path.loglik_total;
    result.n_obs = result.path.n_contrib;
    result.loglik_avg = result.loglik_total / static_cast<double>(result.n_obs);
    result.n_params = free_parameter_count(variant);
    result.aic = 2.0 * static_cast<double>(result.n_params) - 2.0 * result.loglik_total;
    result.converged = traces[best].converged;
    result.starts = std::move(traces);
    return result;
}

std::vector<FitResult> fit_nested(const TickSeries& ts, const std::vector<ModelVariant>& variants,
                                  const FitConfig& config) {
    std::vector<ModelVariant> order = variants;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::vector<FitResult> fits;
    std::vector<StaticParams> previous;
    for (ModelVariant variant : order) {
        FitConfig cfg = config;
        for (const auto& theta : previous) {
            StaticParams seeded = theta;
            if (variant != ModelVariant::NoClustering) {
                seeded.h5 = std::max(seeded.h5, 1e-4);
                seeded.h10 = std::max(seeded.h10, 1e-4);
            }
            cfg.extra_starts.push_back(seeded);
        }
        fits.push_back(fit_mle(ts, variant, cfg));
        previous.push_back(fits.back().theta_hat);
    }
    std::vector<FitResult> out;
    for (ModelVariant variant : variants) {
        for (const auto& fit : fits) {
            if (fit.variant == variant) {
                out.push_back(fit);
                break;
            }
        }
    }
    return out;
}

SummaryRow summarize_fit(const FitResult& fr, double tick_size) {
    SummaryRow row;
    row.variant = fr.variant;
    const FilterPath& p = fr.path;
    double mu = 0.0, alpha = 0.0, phi1 = 0.0, phi5 = 0.0, phi10 = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (std::isnan(p.loglik[t])) continue;
        mu += p.mu[t];
        alpha += p.alpha[t];
        phi1 += p.phi1[t];
        phi5 += p.phi5[t];
        phi10 += p.phi10[t];
        ++count;
    }
    if (count == 0) throw DomainError("the fitted path has no likelihood-contributing trades");
    const double n = static_cast<double>(count);
    row.mean_price = mu / n * tick_size;
    row.mean_alpha = alpha / n;
    row.phi1_pct = 100.0 * phi1 / n;
    row.phi5_pct = 100.0 * phi5 / n;
    row.phi10_pct = 100.0 * phi10 / n;
    return row;
}

nlohmann::ordered_json to_json(const StaticParams& theta) {
    nlohmann::ordered_json j;
    const auto values = theta.to_array();
    for (std::size_t i = 0; i < StaticParams::size; ++i) j[std::string(StaticParams::names[i])] = values[i];
    return j;
}

StaticParams static_params_from_json(const nlohmann::json& j) {
    std::array<double, StaticParams::size> values{};
    for (std::size_t i = 0; i < StaticParams::size; ++i) {
        const std::string key(StaticParams::names[i]);
        values[i] = j.contains(key) ? j.at(key).get<double>() : 0.0;
    }
    return StaticParams::from_array(values);
}

nlohmann::ordered_json to_json(const FitResult& fr) {
    nlohmann::ordered_json j;
    j["variant"] = std::string(to_string(fr.variant));
    j["theta"] = to_json(fr.theta_hat);
    j["loglik_total"] = fr.loglik_total;
    j["loglik_avg"] = fr.loglik_avg;
    j["aic"] = fr.aic;
    j["n_obs"] = fr.n_obs;
    j["n_params"] = fr.n_params;
    j["n_clamped"] = fr.path.n_clamped;
    j["converged"] = fr.converged;
    nlohmann::ordered_json starts = nlohmann::ordered_json::array();
    for (const auto& s : fr.starts) {
        nlohmann::ordered_json t;
        t["index"] = s.index;
        t["method"] = s.method;
        t["evals"] = s.evals;
        t["converged"] = s.converged;
        t["loglik"] = std::isfinite(s.loglik) ? nlohmann::ordered_json(s.loglik) : nlohmann::ordered_json(nullptr);
        t["start"] = to_json(s.start);
        t["theta"] = to_json(s.theta);
        starts.push_back(std::move(t));
    }
    j["starts"] = std::move(starts);
    return j;
}

std::string summary_csv(const std::vector<std::pair<std::string, SummaryRow>>& rows) {
    std::ostringstream out;
    out << "label,variant,mean_price,mean_alpha,phi1,phi5,phi10\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& [label, row] : rows) {
        out << label << ',' << to_string(row.variant) << ',' << row.mean_price << ',' << row.mean_alpha << ','
            << row.phi1_pct << ',' << row.phi5_pct << ',' << row.phi10_pct << '\n';
    }
    return out.str();
}

std::string path_csv(const FilterPath& path) {
    std::ostringstream out;
    out << "t,mu,alpha,eta,phi1,phi5,phi10,loglik\n";
    for (std::size_t t = 0; t < path.size(); ++t) {
        out << t << ',' << format_number(path.mu[t]) << ',' << format_number(path.alpha[t]) << ','
            << format_number(path.eta[t]) << ',' << format_number(path.phi1[t]) << ',' << format_number(path.phi5[t])
            << ',' << format_number(path.phi10[t]) << ',';
        if (!std::isnan(path.loglik[t])) out << format_number(path.loglik[t]);
        out << '\n';
    }
    return out.str();
}

} // namespace pclust
