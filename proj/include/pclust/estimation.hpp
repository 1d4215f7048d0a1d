#pragma once

#include "pclust/dynamics.hpp"
#include "pclust/optimize.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pclust {

enum class ModelVariant { NoClustering, StaticClustering, DynamicClustering };

[[nodiscard]] std::string_view to_string(ModelVariant variant);
/// Accepts "none", "static", "dynamic" (case-insensitive); throws std::invalid_argument otherwise.
[[nodiscard]] ModelVariant parse_variant(std::string_view name);
[[nodiscard]] std::size_t free_parameter_count(ModelVariant variant);

/// Coordinates of the unconstrained search space: b and f through atanh,
/// h5 and h10 through log, everything else as is. Fixed parameters are dropped.
[[nodiscard]] std::vector<double> to_unconstrained(const StaticParams& theta, ModelVariant variant);
[[nodiscard]] StaticParams from_unconstrained(const std::vector<double>& u, ModelVariant variant);

/// Neutral starting point: b = f = 0.2, a = 0.1, d = 0, g = 0, h = 0.01 and
/// c placing the stationary dispersion at ln(mean price / variance of price changes).
[[nodiscard]] StaticParams neutral_start(const TickSeries& ts, ModelVariant variant);

struct FitConfig {
    std::size_t n_starts = 5;
    std::uint64_t seed = 0;
    double perturbation = 0.5;          // half-width of the uniform start perturbation, per unit coordinate scale
    OptimOptions optim{1e-5, 1.0, 10000, 1e-8, 1, 0};
    bool simplex_fallback = true;       // polish with Nelder-Mead when the principal-axis search does not converge
    std::size_t jobs = 0;               // concurrent starts; 0 uses the hardware concurrency
    std::vector<StaticParams> extra_starts;  // tried after the neutral start, before random ones
};

struct StartTrace {
    std::size_t index = 0;
    StaticParams start;
    StaticParams theta;
    double loglik = 0.0;  // -inf when the start diverged everywhere
    std::size_t evals = 0;
    bool converged = false;
    std::string method;
};

struct FitResult {
    ModelVariant variant = ModelVariant::DynamicClustering;
    StaticParams theta_hat;
    double loglik_total = 0.0;
    double loglik_avg = 0.0;
    double aic = 0.0;
    std::size_t n_obs = 0;  // likelihood-contributing trades
    std::size_t n_params = 0;
    FilterPath path;
    std::vector<StartTrace> starts;
    bool converged = false;
};

/// Conditional maximum likelihood over the free parameters of `variant`.
/// Throws EstimationFailure when every start fails to produce a finite likelihood.
[[nodiscard]] FitResult fit_mle(const TickSeries& ts, ModelVariant variant, const FitConfig& config = {});

/// Fits each requested variant from the smallest up, adding every smaller
/// variant's optimum as an extra start so nested likelihoods stay ordered.
/// Results come back in the order of `variants`.
[[nodiscard]] std::vector<FitResult> fit_nested(const TickSeries& ts, const std::vector<ModelVariant>& variants,
                                                const FitConfig& config = {});

/// Averages of the filtered path over likelihood-contributing trades.
struct SummaryRow {
    ModelVariant variant = ModelVariant::DynamicClustering;
    double mean_price = 0.0;  // dollars
    double mean_alpha = 0.0;
    double phi1_pct = 0.0;
    double phi5_pct = 0.0;
    double phi10_pct = 0.0;
};

[[nodiscard]] SummaryRow summarize_fit(const FitResult& fr, double tick_size = 0.01);

[[nodiscard]] nlohmann::ordered_json to_json(const StaticParams& theta);
[[nodiscard]] StaticParams static_params_from_json(const nlohmann::json& j);
/// FitResult without the per-trade path.
[[nodiscard]] nlohmann::ordered_json to_json(const FitResult& fr);

/// CSV with one row per (label, summary) in the column order
/// label, variant, mean_price, mean_alpha, phi1, phi5, phi10.
[[nodiscard]] std::string summary_csv(const std::vector<std::pair<std::string, SummaryRow>>& rows);

/// CSV of a filtered path: t, mu, alpha, eta, phi1, phi5, phi10, loglik.
[[nodiscard]] std::string path_csv(const FilterPath& path);

} // namespace pclust
