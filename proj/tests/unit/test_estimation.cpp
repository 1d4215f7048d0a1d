#include "pclust/errors.hpp"
#include "pclust/estimation.hpp"
#include "pclust/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace pclust;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TickSeries simulated(const StaticParams& theta, std::uint64_t seed, std::size_t n) {
    return simulate(theta, ExogenousPolicy{}, 17580, seed, n);
}

FitConfig quick_config(std::size_t starts = 3) {
    FitConfig cfg;
    cfg.n_starts = starts;
    cfg.seed = 11;
    cfg.jobs = 1;
    return cfg;
}

StaticParams static_generator(double phi5, double phi10) {
    StaticParams theta = reference_params(0.0, 0.0);
    theta.f = theta.g1 = theta.g2 = theta.g3 = theta.g4 = 0.0;
    // With a neutral driver the one-tick portion is 1 / (1 + h5 + h10).
    const double phi1 = 1.0 - phi5 - phi10;
    theta.h5 = phi5 / phi1;
    theta.h10 = phi10 / phi1;
    return theta;
}

TickSeries unit_series(const std::vector<double>& durations, const std::vector<double>& volumes) {
    TickSeries ts;
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        ts.day.push_back(0);
        ts.time.push_back(34200.0 + static_cast<double>(i) * 10.0);
        ts.price.push_back(1000 + static_cast<std::int64_t>(i % 3));
        ts.duration.push_back(i == 0 ? NAN : durations[i - 1]);
        ts.volume.push_back(volumes[i]);
    }
    return ts;
}

} // namespace

TEST_CASE("Variant names and free parameter counts") {
    CHECK(free_parameter_count(ModelVariant::NoClustering) == 4);
    CHECK(free_parameter_count(ModelVariant::StaticClustering) == 6);
    CHECK(free_parameter_count(ModelVariant::DynamicClustering) == 11);
    for (auto v : {ModelVariant::NoClustering, ModelVariant::StaticClustering, ModelVariant::DynamicClustering}) {
        CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK(parse_variant("Dynamic") == ModelVariant::DynamicClustering);
    CHECK_THROWS_AS(parse_variant("garch"), std::invalid_argument);
}

TEST_CASE("Transforms round-trip and keep constrained parameters feasible") {
    const StaticParams theta = reference_params(0.022, 0.064);
    const auto u = to_unconstrained(theta, ModelVariant::DynamicClustering);
    REQUIRE(u.size() == 11);
    const auto back = from_unconstrained(u, ModelVariant::DynamicClustering).to_array();
    const auto orig = theta.to_array();
    for (std::size_t i = 0; i < orig.size(); ++i) CHECK_THAT(back[i], WithinAbs(orig[i], 1e-14));

    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(11);
        for (auto& xi : x) xi = (rng.uniform() - 0.5) * 40.0;
        const StaticParams p = from_unconstrained(x, ModelVariant::DynamicClustering);
        CHECK(std::abs(p.b) <= 1.0);
        CHECK(std::abs(p.f) <= 1.0);
        CHECK(p.h5 >= 0.0);
        CHECK(p.h10 >= 0.0);
    }
}

TEST_CASE("Restricted variants fix the dropped parameters at zero") {
    const StaticParams theta = reference_params(0.022, 0.064);
    const auto none = from_unconstrained(to_unconstrained(theta, ModelVariant::NoClustering), ModelVariant::NoClustering);
    CHECK(none.f == 0.0);
    CHECK(none.g4 == 0.0);
    CHECK(none.h5 == 0.0);
    CHECK(none.h10 == 0.0);
    CHECK(none.a == theta.a);
    const auto stat =
        from_unconstrained(to_unconstrained(theta, ModelVariant::StaticClustering), ModelVariant::StaticClustering);
    CHECK(stat.g1 == 0.0);
    CHECK(stat.f == 0.0);
    CHECK_THAT(stat.h10, WithinRel(theta.h10, 1e-14));
    CHECK_THROWS_AS(from_unconstrained({1.0, 2.0}, ModelVariant::StaticClustering), std::invalid_argument);
}

TEST_CASE("Neutral start matches the moment guess for the dispersion") {
    const TickSeries ts = simulated(reference_params(0.022, 0.064), 2, 5000);
    const StaticParams start = neutral_start(ts, ModelVariant::DynamicClustering);
    CHECK(start.b == 0.2);
    CHECK(start.f == 0.2);
    CHECK(start.a == 0.1);
    CHECK(start.d == 0.0);
    CHECK(start.g1 == 0.0);
    CHECK(start.h5 == 0.01);

    double mean = 0.0;
    for (auto y : ts.price) mean += static_cast<double>(y);
    mean /= static_cast<double>(ts.size());
    std::vector<double> changes;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts.day[i] == ts.day[i - 1]) changes.push_back(static_cast<double>(ts.price[i] - ts.price[i - 1]));
    }
    double cm = 0.0;
    for (double c : changes) cm += c;
    cm /= static_cast<double>(changes.size());
    double var = 0.0;
    for (double c : changes) var += (c - cm) * (c - cm);
    var /= static_cast<double>(changes.size() - 1);
    CHECK_THAT(start.c, WithinRel(0.8 * std::log(mean / var), 1e-9));

    const StaticParams none = neutral_start(ts, ModelVariant::NoClustering);
    CHECK(none.h5 == 0.0);
    CHECK(none.f == 0.0);
}

TEST_CASE("Standardization divides by the sample mean") {
    const TickSeries ts = standardize_exogenous(unit_series({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0, 1.0}));
    CHECK(std::isnan(ts.duration_std[0]));
    CHECK(ts.duration_std[1] == 0.5);
    CHECK(ts.duration_std[2] == 1.0);
    CHECK(ts.duration_std[3] == 1.5);
    CHECK(ts.duration[3] == 3.0);

    const TickSeries unit = standardize_exogenous(unit_series({0.5, 1.5, 1.0}, {2.0, 0.25, 1.0, 0.75}));
    CHECK(unit.duration_std[1] == 0.5);
    CHECK(unit.volume_std[0] == 2.0);
    CHECK(unit.volume_std[3] == 0.75);

    Rng rng(8);
    std::vector<double> z(999), v(1000);
    for (auto& x : z) x = std::exp(3.0 * rng.normal());
    for (auto& x : v) x = 1.0 + 1e4 * rng.uniform();
    const TickSeries s = standardize_exogenous(unit_series(z, v));
    double zs = 0.0, vs = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) zs += s.duration_std[i];
    for (double x : s.volume_std) vs += x;
    CHECK_THAT(zs / 999.0, WithinAbs(1.0, 1e-12));
    CHECK_THAT(vs / 1000.0, WithinAbs(1.0, 1e-12));
}

TEST_CASE("Estimation rejects tiny or invalid input") {
    const TickSeries small = simulated(reference_params(0.02, 0.06), 1, 99);
    CHECK_THROWS_AS(fit_mle(small, ModelVariant::NoClustering, quick_config()), DomainError);
    const TickSeries ok = simulated(reference_params(0.02, 0.06), 1, 500);
    FitConfig none = quick_config();
    none.n_starts = 0;
    CHECK_THROWS_AS(fit_mle(ok, ModelVariant::NoClustering, none), std::invalid_argument);
    TickSeries broken = ok;
    broken.price[10] = 0;
    CHECK_THROWS_AS(fit_mle(broken, ModelVariant::NoClustering, quick_config()), DomainError);
}

TEST_CASE("Fit bookkeeping: AIC, average log likelihood and start traces") {
    const TickSeries ts = simulated(reference_params(0.022, 0.064), 21, 20000);
    const FitResult fr = fit_mle(ts, ModelVariant::StaticClustering, quick_config(3));
    CHECK(fr.n_params == 6);
    CHECK(fr.aic == 2.0 * 6.0 - 2.0 * fr.loglik_total);
    CHECK(fr.loglik_avg == fr.loglik_total / static_cast<double>(fr.n_obs));
    CHECK(fr.n_obs == ts.size() - 2 * (static_cast<std::size_t>(ts.day.back() - ts.day.front()) + 1));
    REQUIRE(fr.starts.size() == 3);
    double best = -INFINITY;
    for (const auto& s : fr.starts) best = std::max(best, s.loglik);
    CHECK_THAT(fr.loglik_total, WithinRel(best, 1e-12));
    CHECK(fr.path.size() == ts.size());
    CHECK(fr.theta_hat.g2 == 0.0);
    CHECK(fr.theta_hat.f == 0.0);
}

TEST_CASE("Dynamic fit on simulated data lands near the generator") {
    const StaticParams truth = reference_params(0.022, 0.064);
    const TickSeries ts = simulated(truth, 31, 30000);
    const FitResult fr = fit_mle(ts, ModelVariant::DynamicClustering, quick_config(3));
    const double at_truth = filter_series(truth, ts).loglik_total;
    // The optimum can only beat the generator's likelihood.
    CHECK(fr.loglik_total >= at_truth - 1e-6);
    CHECK_THAT(fr.theta_hat.a, WithinAbs(truth.a, 0.05));
    CHECK_THAT(fr.theta_hat.c / (1.0 - fr.theta_hat.b), WithinRel(truth.c / (1.0 - truth.b), 0.05));
    CHECK_THAT(fr.theta_hat.g4, WithinAbs(truth.g4, 0.15));
}

namespace {

std::vector<FitResult> unclustered_fits() {
    const TickSeries ts = simulated(reference_params(0.0, 0.0), 41, 20000);
    return fit_nested(ts,
                      {ModelVariant::NoClustering, ModelVariant::StaticClustering, ModelVariant::DynamicClustering},
                      quick_config(3));
}

} // namespace

TEST_CASE("Without clustering in the data a static portion does not pay for itself") {
    const auto fits = unclustered_fits();
    REQUIRE(fits.size() == 3);
    CHECK(fits[0].aic < fits[1].aic);
    CHECK(fits[2].loglik_total >= fits[1].loglik_total - 1e-6);
    CHECK(fits[1].loglik_total >= fits[0].loglik_total - 1e-6);
}

TEST_CASE("Without clustering in the data the dynamic model does not beat the smallest", "[h0dynamic]") {
    const auto fits = unclustered_fits();
    REQUIRE(fits.size() == 3);
    INFO("aic none " << fits[0].aic << " dynamic " << fits[2].aic);
    CHECK(fits[0].aic < fits[2].aic);
}

TEST_CASE("With dynamic clustering AIC orders dynamic, static, none") {
    const TickSeries ts = simulated(reference_params(0.022, 0.064), 51, 30000);
    const auto fits = fit_nested(
        ts, {ModelVariant::DynamicClustering, ModelVariant::NoClustering, ModelVariant::StaticClustering},
        quick_config(3));
    REQUIRE(fits.size() == 3);
    CHECK(fits[0].variant == ModelVariant::DynamicClustering);
    CHECK(fits[1].variant == ModelVariant::NoClustering);
    CHECK(fits[2].variant == ModelVariant::StaticClustering);
    CHECK(fits[0].aic < fits[2].aic);
    CHECK(fits[2].aic < fits[1].aic);
    CHECK(fits[0].loglik_total >= fits[2].loglik_total - 1e-6);
    CHECK(fits[2].loglik_total >= fits[1].loglik_total - 1e-6);
}

TEST_CASE("Volume scale does not change the maximized likelihood") {
    const TickSeries ts = simulated(reference_params(0.022, 0.064), 61, 10000);
    TickSeries scaled = ts;
    for (auto& v : scaled.volume) v *= 250.0;
    const FitResult a = fit_mle(ts, ModelVariant::DynamicClustering, quick_config(3));
    const FitResult b = fit_mle(scaled, ModelVariant::DynamicClustering, quick_config(3));
    CHECK_THAT(b.loglik_total, WithinRel(a.loglik_total, 1e-8));
}

TEST_CASE("Fits are bit-identical for fixed seeds, also with concurrent starts") {
    const TickSeries ts = simulated(reference_params(0.022, 0.064), 71, 5000);
    FitConfig cfg = quick_config(4);
    const auto first = to_json(fit_mle(ts, ModelVariant::StaticClustering, cfg)).dump();
    const auto second = to_json(fit_mle(ts, ModelVariant::StaticClustering, cfg)).dump();
    cfg.jobs = 4;
    const auto threaded = to_json(fit_mle(ts, ModelVariant::StaticClustering, cfg)).dump();
    CHECK(first == second);
    CHECK(first == threaded);
    cfg.seed = 12;
    const auto other = to_json(fit_mle(ts, ModelVariant::StaticClustering, cfg)).dump();
    CHECK(other != first);
}

TEST_CASE("Static clustering portions are recovered and constant along the path") {
    const StaticParams truth = static_generator(0.02, 0.03);
    const TickSeries ts = simulated(truth, 81, 50000);
    const FitResult fr = fit_mle(ts, ModelVariant::StaticClustering, quick_config(3));
    const SummaryRow row = summarize_fit(fr);
    CHECK(row.variant == ModelVariant::StaticClustering);
    CHECK_THAT(row.phi5_pct, WithinAbs(2.0, 0.5));
    CHECK_THAT(row.phi10_pct, WithinAbs(3.0, 0.5));
    const auto phi = portions(0.0, fr.theta_hat.h5, fr.theta_hat.h10);
    CHECK_THAT(row.phi1_pct, WithinAbs(100.0 * phi[0], 1e-9));
    CHECK_THAT(row.phi5_pct, WithinAbs(100.0 * phi[1], 1e-9));
    CHECK_THAT(row.phi10_pct, WithinAbs(100.0 * phi[2], 1e-9));
    CHECK_THAT(row.phi1_pct + row.phi5_pct + row.phi10_pct, WithinAbs(100.0, 1e-9));
}

TEST_CASE("Summary averages over contributing trades, price in dollars") {
    FitResult fr;
    fr.variant = ModelVariant::DynamicClustering;
    fr.path.mu = {17000, 17580, 17600, 17620};
    fr.path.alpha = {9.0, 5.0, 6.0, 7.0};
    fr.path.eta = {0, 0, 0, 0};
    fr.path.phi1 = {1.0, 0.8, 0.9, 1.0};
    fr.path.phi5 = {0.0, 0.1, 0.05, 0.0};
    fr.path.phi10 = {0.0, 0.1, 0.05, 0.0};
    fr.path.loglik = {NAN, -2.0, -2.0, -2.0};
    const SummaryRow row = summarize_fit(fr);
    CHECK_THAT(row.mean_price, WithinRel(176.0, 1e-12));
    CHECK_THAT(row.mean_alpha, WithinRel(6.0, 1e-12));
    CHECK_THAT(row.phi1_pct, WithinRel(90.0, 1e-12));
    CHECK_THAT(row.phi5_pct, WithinRel(5.0, 1e-12));
    fr.path.loglik = {NAN, NAN, NAN, NAN};
    CHECK_THROWS_AS(summarize_fit(fr), DomainError);
}

TEST_CASE("Serialized results carry parameters by name and the start traces") {
    const TickSeries ts = simulated(reference_params(0.022, 0.064), 91, 3000);
    const FitResult fr = fit_mle(ts, ModelVariant::StaticClustering, quick_config(3));
    const auto j = to_json(fr);
    CHECK(j.at("variant") == "static");
    CHECK(j.at("aic").get<double>() == fr.aic);
    CHECK(j.at("n_params") == 6);
    CHECK(j.at("starts").size() == 3);
    CHECK(static_params_from_json(j.at("theta")) == fr.theta_hat);
    CHECK(!j.contains("path"));
    const auto names = j.at("theta").items().begin().key();
    CHECK(names == "c");

    const auto csv = summary_csv({{"BA", summarize_fit(fr)}});
    CHECK(csv.rfind("label,variant,mean_price,mean_alpha,phi1,phi5,phi10\nBA,static,", 0) == 0);

    const auto path = path_csv(fr.path);
    std::istringstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,mu,alpha,eta,phi1,phi5,phi10,loglik");
    std::getline(in, line);
    CHECK(line.back() == ',');
    std::size_t rows = 1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == ts.size());
}

TEST_CASE("Parameters missing from a JSON document default to zero") {
    const auto theta = static_params_from_json(nlohmann::json{{"c", 1.5}, {"h5", 0.2}});
    CHECK(theta.c == 1.5);
    CHECK(theta.h5 == 0.2);
    CHECK(theta.b == 0.0);
}
