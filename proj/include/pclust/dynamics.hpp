#pragma once

#include "pclust/double_poisson.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <variant>
#include <vector>

namespace pclust {

/// Static parameter vector of the dynamic price clustering model.
///
/// c, b, a, d drive the log-dispersion recursion; f, g1..g4 drive the
/// portion process eta; h5, h10 set the strength of the 5- and 10-tick types.
struct StaticParams {
    double c = 0.0;
    double b = 0.0;
    double a = 0.0;
    double d = 0.0;
    double f = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double g4 = 0.0;
    double h5 = 0.0;
    double h10 = 0.0;

    static constexpr std::size_t size = 11;
    static constexpr std::array<std::string_view, size> names = {"c",  "b",  "a",  "d",  "f", "g1",
                                                                 "g2", "g3", "g4", "h5", "h10"};

    [[nodiscard]] std::array<double, size> to_array() const;
    [[nodiscard]] static StaticParams from_array(const std::array<double, size>& values);

    friend bool operator==(const StaticParams&, const StaticParams&) = default;
};

/// Throws DomainError for non-finite entries or negative type strengths.
void validate(const StaticParams& theta);

/// Reference volatility/portion coefficients for a large-cap stock,
/// completed with caller-chosen type strengths.
[[nodiscard]] StaticParams reference_params(double h5, double h10);

/// Trades in integer ticks with day/time stamps and exogenous covariates.
///
/// A new conditioning segment starts at every change of `day`; the first
/// trade of a segment has no preceding duration (NaN).
struct TickSeries {
    std::vector<std::int32_t> day;
    std::vector<double> time;           // seconds after midnight
    std::vector<std::int64_t> price;    // ticks
    std::vector<double> duration;       // seconds, raw
    std::vector<double> volume;         // shares, raw
    std::vector<double> duration_std;   // unit-mean standardized, empty until standardized
    std::vector<double> volume_std;

    [[nodiscard]] std::size_t size() const noexcept { return price.size(); }
    [[nodiscard]] bool segment_start(std::size_t i) const { return i == 0 || day[i] != day[i - 1]; }
    [[nodiscard]] bool standardized() const noexcept {
        return duration_std.size() == size() && volume_std.size() == size();
    }
};

/// Throws DomainError on mismatched lengths, non-positive prices/volumes,
/// non-positive durations inside a segment, or decreasing timestamps.
void validate(const TickSeries& ts);

/// Returns a copy whose standardized covariates are the raw ones divided by
/// their sample means (durations averaged over defined entries only).
[[nodiscard]] TickSeries standardize_exogenous(TickSeries ts);

struct FilterState {
    double mu = 0.0;
    double alpha = 0.0;
    double eta = 0.0;
    std::array<double, 3> phi{1.0, 0.0, 0.0};  // portions of the 1-, 5-, 10-tick types
    bool clamped = false;
};

inline constexpr double kAlphaBound = 50.0;

/// Portions from the driver eta and type strengths; softmax over
/// (eta, ln h5, ln h10) with zero strengths as impossible types.
[[nodiscard]] std::array<double, 3> portions(double eta, double h5, double h10);
[[nodiscard]] std::array<double, 3> log_portions(double eta, double h5, double h10);

/// Stationary-mean starting state at the first trade of a segment.
struct InitPolicy {
    double mean_log_duration = 0.0;  // ln of the standardized duration mean
    double mean_log_volume = 0.0;
};

[[nodiscard]] FilterState initial_state(const StaticParams& theta, std::int64_t first_price,
                                        const InitPolicy& init = {});

/// One recursion step. `z` and `v` are the standardized duration and volume of
/// the current trade; `t` only labels a FilterDivergence.
[[nodiscard]] FilterState filter_step(const StaticParams& theta, const FilterState& prev, std::int64_t y_prev,
                                      std::int64_t y_prev2, double z, double v, std::size_t t = 0);

struct FilterPath {
    std::vector<double> mu;
    std::vector<double> alpha;
    std::vector<double> eta;
    std::vector<double> phi1;
    std::vector<double> phi5;
    std::vector<double> phi10;
    std::vector<double> loglik;  // NaN for conditioning (burn-in) trades
    double loglik_total = 0.0;
    std::size_t n_contrib = 0;
    std::size_t n_clamped = 0;

    [[nodiscard]] std::size_t size() const noexcept { return mu.size(); }
    [[nodiscard]] double loglik_avg() const {
        return n_contrib == 0 ? std::numeric_limits<double>::quiet_NaN()
                              : loglik_total / static_cast<double>(n_contrib);
    }
};

/// Runs the recursion over every segment. The first two trades of each
/// segment condition the filter and contribute no likelihood.
[[nodiscard]] FilterPath filter_series(const StaticParams& theta, const TickSeries& ts, const InitPolicy& init = {});

/// Precomputed, parameter-free pieces of the log likelihood for repeated
/// evaluation inside an optimizer. Agrees with filter_series term by term.
class LikelihoodKernel {
public:
    explicit LikelihoodKernel(const TickSeries& ts);

    /// Total conditional log likelihood; throws FilterDivergence / DomainError
    /// where filter_series would.
    [[nodiscard]] double total_loglik(const StaticParams& theta) const;
    [[nodiscard]] std::size_t n_contrib() const noexcept { return n_contrib_; }

private:
    struct Tick {
        std::size_t index;   // position in the series
        double log_mu;       // ln y_{t-1}
        double mu;           // y_{t-1}
        double deviance;     // y_t ln(y_t / y_{t-1}) + y_{t-1} - y_t
        double score_deviance;  // same for (y_{t-1}, y_{t-2})
        double log_z;
        double log_v;
        double weight1;      // exp(component_base_term(y_t, k)) for k = 1, 5, 10;
        double weight5;      // zero when k does not divide y_t
        double weight10;
    };
    struct Segment {
        std::size_t begin;
        std::size_t end;
        double log_first_price;
    };

    std::vector<Tick> ticks_;
    std::vector<Segment> segments_;
    std::size_t n_contrib_ = 0;
};

/// Log-normal covariates with unit mean; `*_log_sd` is the sd of the log.
struct LogNormalExogenous {
    double duration_log_sd = 1.0;
    double volume_log_sd = 1.0;
    double mean_duration = 1.0;
    double mean_volume = 1.0;
};

/// Caller-supplied covariates, one entry per simulated trade.
struct FixedExogenous {
    std::vector<double> durations;
    std::vector<double> volumes;
};

struct ExogenousPolicy {
    std::variant<LogNormalExogenous, FixedExogenous> source = LogNormalExogenous{};
    double open_time = 34200.0;        // 09:30:00
    double session_seconds = 23400.0;  // 0 keeps a single segment
};

/// Simulates n trades from the model, starting at price y0.
[[nodiscard]] TickSeries simulate(const StaticParams& theta, const ExogenousPolicy& exo, std::int64_t y0,
                                  std::uint64_t rng_seed, std::size_t n);

} // namespace pclust
