#pragma once

#include "pclust/dynamics.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pclust {

/// Share of prices on a multiple of five ticks minus the uniform-digit share 0.2.
[[nodiscard]] double price_clustering_measure(const std::vector<std::int64_t>& prices);

/// Parzen weight on [0, 1]; zero beyond.
[[nodiscard]] double parzen(double x);

enum class KernelForm {
    NonFlatTop,  // gamma_0 + 2 sum_h k(h / (H + 1)) gamma_h, nonnegative by construction
    FlatTop,     // gamma_0 + 2 sum_h k((h - 1) / H) gamma_h
};

struct RKConfig {
    std::optional<std::size_t> bandwidth;  // fixed H instead of the plug-in rule
    KernelForm form = KernelForm::NonFlatTop;
    std::size_t jitter = 2;           // observations averaged at each end of the day
    double sparse_seconds = 1200.0;   // sampling interval of the integrated-variance pilot
    double offset_seconds = 60.0;     // spacing of the pilot's subsample offsets
    double negative_tolerance = 1e-12;
};

struct RKResult {
    double value = 0.0;
    std::size_t bandwidth = 0;
    double noise_variance = 0.0;  // top-frequency estimate RV / (2n)
    double pilot_variance = 0.0;  // subsampled sparse realized variance
    bool bandwidth_shrunk = false;
    std::string warning;
};

/// Bandwidth constant of the Parzen kernel, (12^2 / 0.269)^(1/5).
[[nodiscard]] double parzen_bandwidth_constant();

/// Realized kernel of one day of log prices observed at `times` (seconds, nondecreasing).
[[nodiscard]] RKResult realized_kernel_detail(const std::vector<double>& times, const std::vector<double>& log_prices,
                                              const RKConfig& config = {});
[[nodiscard]] double realized_kernel(const std::vector<double>& times, const std::vector<double>& log_prices,
                                     const RKConfig& config = {});

struct DailyRow {
    std::string stock;
    std::int32_t day = 0;
    double pc = 0.0;          // fraction
    double mean_price = 0.0;  // dollars
    double rk_vol = 0.0;
    double mean_duration = 0.0;
    double mean_volume = 0.0;
};

struct PanelBuild {
    std::vector<DailyRow> rows;
    std::vector<std::string> skipped;  // "stock day: reason"
};

/// One row per stock-day with at least two trades, in (stock, day) order.
[[nodiscard]] PanelBuild build_daily_panel(const std::map<std::string, TickSeries>& per_stock,
                                           std::int64_t tick_scale = 100, const RKConfig& rk = {});

[[nodiscard]] std::string panel_csv(const std::vector<DailyRow>& rows);
[[nodiscard]] std::vector<DailyRow> read_panel_csv(std::istream& in);

enum class PanelModel {
    I,    // price, volatility, duration
    II,   // price, duration, volume
    III,  // price, volatility, duration, volume
};

struct PanelSpec {
    PanelModel model = PanelModel::III;
    bool day_effects = true;
    bool volatility_as_sd = false;  // ln of the RK standard deviation instead of the variance
    double pc_scale = 100.0;        // dependent variable in percent
    double tolerance = 1e-10;
    std::size_t max_sweeps = 100000;
};

struct PanelFit {
    std::vector<std::string> names;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;
    Eigen::MatrixXd vcov;
    Eigen::VectorXd residuals;
    std::vector<std::string> stocks;
    Eigen::VectorXd fe_stock;
    std::vector<std::int32_t> days;
    Eigen::VectorXd fe_day;  // normalized to mean zero; empty without day effects
    std::size_t n = 0;
    std::size_t dropped_zero_rk = 0;

    [[nodiscard]] double p_value(std::size_t i) const;
};

/// Two-way (or stock-only) fixed-effects least squares of the clustering
/// measure on log covariates with covariance clustered by stock and by day.
[[nodiscard]] PanelFit fe_regression(const std::vector<DailyRow>& panel, const PanelSpec& spec = {});

/// Lower-level entry: demeaned design and dependent variable with integer group labels.
[[nodiscard]] PanelFit fe_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     const std::vector<int>& stock_ids, const std::vector<int>& day_ids,
                                     const std::vector<std::string>& names, const PanelSpec& spec = {});

/// B^-1 (M_stock + M_day - M_het) B^-1 with B = X'X and M_g the sum over
/// clusters of the outer products of X_g' e_g. No small-sample correction.
[[nodiscard]] Eigen::MatrixXd two_way_cluster_vcov(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals,
                                                   const std::vector<int>& stock_ids, const std::vector<int>& day_ids);

/// "*", "**", "***" at the 0.05, 0.01, 0.001 levels; empty otherwise.
[[nodiscard]] std::string significance_stars(double p_value);

/// Coefficient table with one column per fit, SE in parentheses under each estimate.
[[nodiscard]] std::string coefficient_table(const std::vector<std::pair<std::string, PanelFit>>& fits);
[[nodiscard]] nlohmann::ordered_json to_json(const PanelFit& fit);

/// Univariate stock-effect regressions of pc on each log covariate, as
/// tidy rows: covariate, stock, day, x, pc, fitted.
[[nodiscard]] std::string univariate_fits_csv(const std::vector<DailyRow>& panel, const PanelSpec& spec = {});

struct DigitRow {
    int digit = 0;
    std::size_t count = 0;
    double mean_price = 0.0;     // ticks
    double mean_variance = 0.0;  // filtered mu e^-alpha; NaN without a path
    double mean_duration = 0.0;
    double mean_volume = 0.0;
};

/// Averages by the last digit of the tick price. Uses trades that have a
/// preceding duration; `path` supplies the instantaneous variance when given.
[[nodiscard]] std::vector<DigitRow> digit_breakdown(const TickSeries& ts, const FilterPath* path = nullptr);
[[nodiscard]] std::string digit_csv(const std::vector<DigitRow>& rows);

struct DescriptiveRow {
    std::string stock;
    std::size_t trades = 0;
    double mean_price = 0.0;  // dollars
    double sd_price = 0.0;
    double mean_duration = 0.0;  // seconds, within days
    double sd_duration = 0.0;
    double pc_pct = 0.0;
};

[[nodiscard]] DescriptiveRow descriptive_stats(const std::string& stock, const TickSeries& ts,
                                               std::int64_t tick_scale = 100);
[[nodiscard]] std::string descriptive_csv(const std::vector<DescriptiveRow>& rows);

} // namespace pclust
