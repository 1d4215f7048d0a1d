#include "panel_sim.hpp"

#include "pclust/daily_analysis.hpp"
#include "pclust/errors.hpp"
#include "pclust/rng.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace pclust;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

using namespace panel_sim;

namespace {

TickSeries day_series(const std::vector<std::int64_t>& prices, const std::vector<double>& durations,
                      const std::vector<double>& volumes, std::int32_t day = 20200102) {
    TickSeries ts;
    double clock = 34200.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (i > 0) clock += durations[i];
        ts.day.push_back(day);
        ts.time.push_back(clock);
        ts.price.push_back(prices[i]);
        ts.duration.push_back(i == 0 ? NAN : durations[i]);
        ts.volume.push_back(volumes[i]);
    }
    return ts;
}

TickSeries append(TickSeries a, const TickSeries& b) {
    a.day.insert(a.day.end(), b.day.begin(), b.day.end());
    a.time.insert(a.time.end(), b.time.begin(), b.time.end());
    a.price.insert(a.price.end(), b.price.begin(), b.price.end());
    a.duration.insert(a.duration.end(), b.duration.begin(), b.duration.end());
    a.volume.insert(a.volume.end(), b.volume.begin(), b.volume.end());
    return a;
}

struct Path {
    std::vector<double> times;
    std::vector<double> logp;
};

Path brownian_day(Rng& rng, double daily_variance, std::size_t n) {
    Path p;
    double x = std::log(100.0);
    const double step_sd = std::sqrt(daily_variance / static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) x += step_sd * rng.normal();
        p.times.push_back(34200.0 + 23400.0 * static_cast<double>(i) / static_cast<double>(n - 1));
        p.logp.push_back(x);
    }
    return p;
}

} // namespace

TEST_CASE("Clustering measure is the excess share of multiples of five") {
    std::vector<std::int64_t> uniform;
    for (std::int64_t y = 1000; y < 1100; ++y) uniform.push_back(y);
    CHECK_THAT(price_clustering_measure(uniform), WithinAbs(0.0, 1e-15));
    CHECK_THAT(price_clustering_measure({1000, 1010, 2020, 30}), WithinAbs(0.8, 1e-15));
    CHECK_THAT(price_clustering_measure({1001, 1002}), WithinAbs(-0.2, 1e-15));
    CHECK_THAT(price_clustering_measure({1005, 1002, 1003, 1004}), WithinAbs(0.05, 1e-15));
    CHECK_THROWS_AS(price_clustering_measure({}), DomainError);
}

TEST_CASE("Clustering measure ignores whole-dollar shifts and stays in range") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::int64_t> prices(1 + static_cast<std::size_t>(rng.uniform() * 300));
        for (auto& y : prices) y = 100 + static_cast<std::int64_t>(rng.uniform() * 20000);
        const double pc = price_clustering_measure(prices);
        CHECK(pc >= -0.2);
        CHECK(pc <= 0.8);
        const std::int64_t dollars = 100 * static_cast<std::int64_t>(1 + rng.uniform() * 50);
        for (auto& y : prices) y += dollars;
        CHECK(price_clustering_measure(prices) == pc);
    }
}

TEST_CASE("Parzen weights") {
    CHECK(parzen(0.0) == 1.0);
    CHECK(parzen(0.5) == 0.25);
    CHECK(parzen(1.0) == 0.0);
    CHECK(parzen(1.5) == 0.0);
    CHECK(parzen(-0.25) == parzen(0.25));
    CHECK_THAT(parzen(0.75), WithinAbs(2.0 * 0.25 * 0.25 * 0.25, 1e-15));
    CHECK_THAT(parzen_bandwidth_constant(), WithinRel(std::pow(144.0 / 0.269, 0.2), 1e-15));
}

TEST_CASE("Realized kernel of a constant price is zero") {
    const std::vector<double> times = {1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> flat(8, std::log(175.8));
    CHECK(realized_kernel(times, flat) == 0.0);
    RKConfig fixed;
    fixed.bandwidth = 3;
    CHECK(realized_kernel(times, flat, fixed) == 0.0);
}

TEST_CASE("Zero bandwidth without end averaging is the realized variance") {
    Rng rng(5);
    const Path p = brownian_day(rng, 1e-4, 500);
    RKConfig cfg;
    cfg.bandwidth = 0;
    cfg.jitter = 1;
    double rv = 0.0;
    for (std::size_t i = 1; i < p.logp.size(); ++i) rv += std::pow(p.logp[i] - p.logp[i - 1], 2);
    CHECK_THAT(realized_kernel(p.times, p.logp, cfg), WithinRel(rv, 1e-12));
}

TEST_CASE("Kernel with a fixed bandwidth matches a direct autocovariance sum") {
    Rng rng(6);
    const Path p = brownian_day(rng, 1e-4, 300);
    std::vector<double> logp = p.logp;
    for (auto& x : logp) x += 1e-4 * rng.normal();
    for (const auto form : {KernelForm::NonFlatTop, KernelForm::FlatTop}) {
        RKConfig cfg;
        cfg.bandwidth = 7;
        cfg.jitter = 2;
        cfg.form = form;
        std::vector<double> x = {(logp[0] + logp[1]) / 2.0};
        x.insert(x.end(), logp.begin() + 2, logp.end() - 2);
        x.push_back((logp[logp.size() - 2] + logp.back()) / 2.0);
        std::vector<double> r;
        for (std::size_t i = 1; i < x.size(); ++i) r.push_back(x[i] - x[i - 1]);
        long double expected = 0;
        for (int h = -7; h <= 7; ++h) {
            long double gamma = 0;
            const auto a = static_cast<std::size_t>(std::abs(h));
            for (std::size_t j = a; j < r.size(); ++j) gamma += static_cast<long double>(r[j]) * r[j - a];
            double w = 1.0;
            if (h != 0) {
                w = form == KernelForm::NonFlatTop ? parzen(std::abs(h) / 8.0) : parzen((std::abs(h) - 1) / 7.0);
            }
            expected += w * gamma;
        }
        const double got = realized_kernel(p.times, logp, cfg);
        CHECK_THAT(got, WithinRel(static_cast<double>(expected), 1e-10));
    }
}

TEST_CASE("Realized kernel ignores level and scales quadratically") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Path p = brownian_day(rng, 2e-4, 2000);
        for (auto& x : p.logp) x += 3e-4 * rng.normal();
        const double base = realized_kernel(p.times, p.logp);
        std::vector<double> shifted = p.logp, scaled = p.logp;
        for (auto& x : shifted) x += 2.5;
        for (auto& x : scaled) x *= 3.0;
        CHECK_THAT(realized_kernel(p.times, shifted), WithinRel(base, 1e-6));
        CHECK_THAT(realized_kernel(p.times, scaled), WithinRel(9.0 * base, 1e-9));
        CHECK(base >= 0.0);
    }
}

TEST_CASE("Realized kernel is unbiased on noise-free diffusions") {
    Rng rng(8);
    const double variance = 1e-4;
    double total = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const Path p = brownian_day(rng, variance, 4000);
        total += realized_kernel(p.times, p.logp);
    }
    CHECK_THAT(total / 100.0, WithinRel(variance, 0.10));
}

TEST_CASE("Plug-in bandwidth grows with noise") {
    Rng rng(9);
    const Path p = brownian_day(rng, 1e-4, 20000);
    const auto clean = realized_kernel_detail(p.times, p.logp);
    std::vector<double> noisy = p.logp;
    for (auto& x : noisy) x += 5e-4 * rng.normal();
    const auto rk = realized_kernel_detail(p.times, noisy);
    CHECK(rk.bandwidth > clean.bandwidth);
    CHECK(rk.noise_variance > clean.noise_variance);
    const double xi2 = rk.noise_variance / rk.pilot_variance;
    CHECK(rk.bandwidth == static_cast<std::size_t>(std::ceil(parzen_bandwidth_constant() * std::pow(xi2, 0.4) *
                                                             std::pow(19999.0, 0.6))));
    // The noise inflates realized variance far more than the kernel.
    double rv = 0.0;
    for (std::size_t i = 1; i < noisy.size(); ++i) rv += std::pow(noisy[i] - noisy[i - 1], 2);
    CHECK(std::abs(rk.value - 1e-4) < 0.2 * std::abs(rv - 1e-4));
}

TEST_CASE("Too few returns shrink the bandwidth with a warning") {
    const std::vector<double> times = {1, 2, 3, 4, 5, 6};
    const std::vector<double> logp = {0.0, 0.01, 0.0, 0.02, 0.01, 0.0};
    RKConfig cfg;
    cfg.bandwidth = 10;
    cfg.jitter = 1;
    const auto rk = realized_kernel_detail(times, logp, cfg);
    CHECK(rk.bandwidth_shrunk);
    CHECK(rk.bandwidth == 3);
    CHECK_THAT(rk.warning, ContainsSubstring("shrunk"));
    CHECK_THROWS_AS(realized_kernel({1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(realized_kernel({2.0, 1.0}, {0.0, 0.1}), DomainError);
}

TEST_CASE("Flat-top kernel can go negative and is rejected; the default never does") {
    std::vector<double> times, logp;
    for (int i = 0; i < 40; ++i) {
        times.push_back(i);
        logp.push_back(i % 2 == 0 ? 0.0 : 0.01);
    }
    RKConfig flat;
    flat.form = KernelForm::FlatTop;
    flat.bandwidth = 1;
    flat.jitter = 1;
    CHECK_THROWS_AS(realized_kernel(times, logp, flat), DomainError);
    RKConfig plain;
    plain.bandwidth = 1;
    plain.jitter = 1;
    CHECK(realized_kernel(times, logp, plain) >= 0.0);
    Rng rng(10);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(60);
        for (auto& v : x) v = rng.normal();
        RKConfig cfg;
        cfg.bandwidth = static_cast<std::size_t>(rng.uniform() * 20);
        std::vector<double> t(60);
        std::iota(t.begin(), t.end(), 0.0);
        CHECK(realized_kernel_detail(t, x, cfg).value >= 0.0);
    }
}

TEST_CASE("Daily row of hand-built trades") {
    const TickSeries ts = day_series({17580, 17585, 17590, 17581, 17582, 17583, 17585, 17584, 17580, 17586},
                                     {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000});
    const PanelBuild built = build_daily_panel({{"BA", ts}});
    REQUIRE(built.rows.size() == 1);
    const DailyRow& r = built.rows[0];
    CHECK(r.stock == "BA");
    CHECK(r.day == 20200102);
    CHECK_THAT(r.pc, WithinAbs(5.0 / 10.0 - 0.2, 1e-15));
    CHECK_THAT(r.mean_price, WithinRel(175.836, 1e-12));
    CHECK_THAT(r.mean_duration, WithinRel(5.0, 1e-12));
    CHECK_THAT(r.mean_volume, WithinRel(550.0, 1e-12));
    std::vector<double> logp;
    for (auto y : ts.price) logp.push_back(std::log(static_cast<double>(y)));
    CHECK(r.rk_vol == realized_kernel(ts.time, logp));
}

TEST_CASE("Stocks sharing days give one row per stock-day in order") {
    const TickSeries d1 = day_series({1000, 1001, 1005}, {0, 1, 1}, {1, 1, 1}, 20200102);
    const TickSeries d2 = day_series({1010, 1002}, {0, 2}, {1, 1}, 20200103);
    const TickSeries d3 = day_series({1010}, {0}, {1}, 20200106);
    const PanelBuild built = build_daily_panel({{"KO", append(d1, d2)}, {"AAPL", append(append(d1, d2), d3)}});
    REQUIRE(built.rows.size() == 4);
    CHECK(built.rows[0].stock == "AAPL");
    CHECK(built.rows[1].stock == "AAPL");
    CHECK(built.rows[2].stock == "KO");
    CHECK(built.rows[0].day == 20200102);
    CHECK(built.rows[1].day == 20200103);
    const auto few = std::count_if(built.skipped.begin(), built.skipped.end(),
                                   [](const std::string& s) { return s.find("fewer than two") != std::string::npos; });
    CHECK(few == 1);
    CHECK(std::find(built.skipped.begin(), built.skipped.end(), "AAPL 20200106: fewer than two trades") !=
          built.skipped.end());
}

TEST_CASE("Daily covariate means track the generator over a month") {
    ExogenousPolicy exo;
    exo.source = LogNormalExogenous{0.8, 0.8, 2.0, 300.0};
    const TickSeries ts = simulate(reference_params(0.022, 0.064), exo, 17580, 3, 21 * 11700);
    const PanelBuild built = build_daily_panel({{"SIM", ts}});
    REQUIRE(built.rows.size() >= 20);
    double dur = 0.0, vol = 0.0;
    for (const auto& r : built.rows) {
        dur += r.mean_duration;
        vol += r.mean_volume;
        CHECK(r.rk_vol > 0.0);
    }
    const double days = static_cast<double>(built.rows.size());
    CHECK_THAT(dur / days, WithinRel(2.0, 0.02));
    CHECK_THAT(vol / days, WithinRel(300.0, 0.02));
}

TEST_CASE("Panel files round-trip") {
    const auto rows = panel_sim::simulate({}, 3);
    std::istringstream in(panel_csv(rows));
    const auto back = read_panel_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].stock == rows[i].stock);
        CHECK(back[i].pc == rows[i].pc);
        CHECK(back[i].rk_vol == rows[i].rk_vol);
        CHECK(back[i].mean_volume == rows[i].mean_volume);
    }
    std::istringstream bad("stock,day\nA,1\n");
    CHECK_THROWS_AS(read_panel_csv(bad), FormatError);
}

TEST_CASE("Within estimator equals dummy-variable least squares") {
    Rng rng(20);
    for (int trial = 0; trial < 100; ++trial) {
        const bool unbalanced = trial % 2 == 1;
        const RandomPanel p = random_panel(rng, 5, 8, 3, unbalanced ? 0.7 : 1.0);
        PanelSpec spec;
        spec.tolerance = 1e-13;
        const PanelFit fit = fe_regression(p.x, p.y, p.stock, p.day, {"a", "b", "c"}, spec);
        const Eigen::VectorXd oracle = dummy_ls(p, 5, 8, true);
        for (int k = 0; k < 3; ++k) CHECK_THAT(fit.beta(k), WithinAbs(oracle(k), 1e-8));

        spec.day_effects = false;
        const PanelFit stock_only = fe_regression(p.x, p.y, p.stock, p.day, {"a", "b", "c"}, spec);
        const Eigen::VectorXd oracle_s = dummy_ls(p, 5, 8, false);
        for (int k = 0; k < 3; ++k) CHECK_THAT(stock_only.beta(k), WithinAbs(oracle_s(k), 1e-8));
    }
}

TEST_CASE("Residuals are orthogonal to regressors and both sets of effects") {
    Rng rng(21);
    const RandomPanel p = random_panel(rng, 6, 9, 2, 0.8);
    PanelSpec spec;
    spec.tolerance = 1e-14;
    const PanelFit fit = fe_regression(p.x, p.y, p.stock, p.day, {"a", "b"}, spec);
    const Eigen::VectorXd full = p.y - p.x * fit.beta;
    Eigen::VectorXd e(full.size());
    for (Eigen::Index r = 0; r < full.size(); ++r) {
        e(r) = full(r) - fit.fe_stock(p.stock[static_cast<std::size_t>(r)]) - fit.fe_day(p.day[static_cast<std::size_t>(r)]);
    }
    CHECK((p.x.transpose() * e).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((dummies(p.stock, p.day, 6, 9).transpose() * e).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((e - fit.residuals).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THAT(fit.fe_day.mean(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("Noiseless panels recover coefficients and effects exactly") {
    panel_sim::Design d;
    d.noise_sd = 0.0;
    d.stocks = 8;
    d.days = 25;
    const auto rows = panel_sim::simulate(d, 22);
    PanelSpec spec;
    spec.tolerance = 1e-14;
    const PanelFit fit = fe_regression(rows, spec);
    REQUIRE(fit.names == std::vector<std::string>{"price", "volatility", "duration", "volume"});
    for (int k = 0; k < 4; ++k) CHECK_THAT(fit.beta(k), WithinAbs(d.beta[static_cast<std::size_t>(k)], 1e-9));
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(fit.n == 200);
    CHECK(fit.stocks.size() == 8);
    CHECK(fit.days.size() == 25);
}

TEST_CASE("Two-way clustered covariance matches the pairwise sandwich") {
    Rng rng(23);
    const int stocks = 3, days = 4;
    const RandomPanel p = random_panel(rng, stocks, days, 2);
    PanelSpec spec;
    spec.tolerance = 1e-15;
    const PanelFit fit = fe_regression(p.x, p.y, p.stock, p.day, {"a", "b"}, spec);

    const auto [beta, v] = pairwise_sandwich(p, stocks, days);
    for (int a = 0; a < 2; ++a) {
        CHECK_THAT(fit.beta(a), WithinAbs(beta(a), 1e-8));
        for (int b = 0; b < 2; ++b) CHECK_THAT(fit.vcov(a, b), WithinAbs(v(a, b), 1e-8));
    }
}

TEST_CASE("Singleton clusters reduce to the heteroskedasticity-robust covariance") {
    Rng rng(24);
    Eigen::MatrixXd x(12, 2);
    Eigen::VectorXd e(12);
    std::vector<int> ids(12);
    for (int i = 0; i < 12; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        e(i) = rng.normal();
        ids[static_cast<std::size_t>(i)] = i;
    }
    const Eigen::MatrixXd bread = (x.transpose() * x).inverse();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < 12; ++i) meat += e(i) * e(i) * x.row(i).transpose() * x.row(i);
    const Eigen::MatrixXd hc0 = bread * meat * bread;
    CHECK((two_way_cluster_vcov(x, e, ids, ids) - hc0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Collinear covariates are named in the error") {
    auto rows = panel_sim::simulate({}, 25);
    for (auto& r : rows) r.mean_duration = r.mean_price * 2.0;
    try {
        (void)fe_regression(rows);
        FAIL("expected a singular design");
    } catch (const SingularDesign& e) {
        const std::string what = e.what();
        CHECK((what.find("price") != std::string::npos || what.find("duration") != std::string::npos));
    }
}

TEST_CASE("Panels need two stocks and two days; zero kernels are dropped") {
    panel_sim::Design d;
    d.stocks = 1;
    CHECK_THROWS_AS(fe_regression(panel_sim::simulate(d, 26)), DomainError);
    d.stocks = 4;
    d.days = 1;
    CHECK_THROWS_AS(fe_regression(panel_sim::simulate(d, 26)), DomainError);
    d.days = 10;
    auto rows = panel_sim::simulate(d, 26);
    rows[3].rk_vol = 0.0;
    rows[7].rk_vol = 0.0;
    PanelSpec model2;
    model2.model = PanelModel::II;
    const PanelFit fit = fe_regression(rows, model2);
    CHECK(fit.dropped_zero_rk == 2);
    CHECK(fit.n == 38);
    CHECK(fit.names == std::vector<std::string>{"price", "duration", "volume"});
}

TEST_CASE("Positive volatility and volume effects are recovered and significant") {
    int both = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const PanelFit fit = fe_regression(panel_sim::simulate({}, 1000 + rep));
        if (fit.beta(1) > 0 && fit.p_value(1) < 0.05 && fit.beta(3) > 0 && fit.p_value(3) < 0.05) ++both;
    }
    CHECK(both >= 95);
}

TEST_CASE("Stars follow the p-value thresholds") {
    CHECK(significance_stars(0.2).empty());
    CHECK(significance_stars(0.05).empty());
    CHECK(significance_stars(0.049) == "*");
    CHECK(significance_stars(0.009) == "**");
    CHECK(significance_stars(0.0009) == "***");
    CHECK(significance_stars(NAN).empty());
}

TEST_CASE("Coefficient table has one column per model, errors in parentheses") {
    const auto rows = panel_sim::simulate({}, 27);
    std::vector<std::pair<std::string, PanelFit>> fits;
    for (auto [label, model] : {std::pair{"I", PanelModel::I}, {"II", PanelModel::II}, {"III", PanelModel::III}}) {
        PanelSpec spec;
        spec.model = model;
        fits.emplace_back(label, fe_regression(rows, spec));
    }
    const std::string table = coefficient_table(fits);
    std::istringstream in(table);
    std::string header, line;
    std::getline(in, header);
    CHECK_THAT(header, ContainsSubstring("I"));
    CHECK_THAT(header, ContainsSubstring("II"));
    CHECK_THAT(header, ContainsSubstring("III"));
    std::getline(in, line);
    CHECK(line.rfind("price", 0) == 0);
    std::getline(in, line);
    CHECK_THAT(line, ContainsSubstring("("));
    CHECK_THAT(table, ContainsSubstring("volume"));
    CHECK_THAT(table, ContainsSubstring("***"));
    const auto j = to_json(fits[2].second);
    CHECK(j.dump().find("volatility") != std::string::npos);
}

TEST_CASE("Univariate fitted lines come from stock-effect regressions") {
    panel_sim::Design d;
    d.stocks = 4;
    d.days = 30;
    const auto rows = panel_sim::simulate(d, 28);
    const std::string csv = univariate_fits_csv(rows);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "covariate,stock,day,x,pc,fitted");
    std::size_t count = 0;
    while (std::getline(in, line)) ++count;
    CHECK(count == 4 * rows.size());
}

TEST_CASE("Digit breakdown averages by the last tick digit") {
    const TickSeries ts = day_series({17580, 17585, 17590, 17581, 17595}, {0, 1, 2, 3, 4}, {10, 20, 30, 40, 50});
    const auto rows = digit_breakdown(ts);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0].count == 1);
    CHECK(rows[5].count == 2);
    CHECK(rows[1].count == 1);
    CHECK(rows[5].mean_price == 17590.0);
    CHECK(rows[5].mean_duration == 2.5);
    CHECK(rows[5].mean_volume == 35.0);
    CHECK(std::isnan(rows[5].mean_variance));
    CHECK(std::isnan(rows[3].mean_price));

    FilterPath path;
    path.mu = {0, 100, 200, 300, 400};
    path.alpha = {0, 0, 0, std::log(3.0), std::log(4.0)};
    const auto with_path = digit_breakdown(ts, &path);
    CHECK_THAT(with_path[5].mean_variance, WithinRel(100.0, 1e-12));
    CHECK_THAT(digit_csv(rows), ContainsSubstring("digit,count,mean_price,mean_variance,mean_duration,mean_volume\n0,1,"));
}

TEST_CASE("Descriptive statistics per stock") {
    const TickSeries ts = append(day_series({1000, 1005, 1010}, {0, 2, 4}, {1, 1, 1}, 20200102),
                                 day_series({1003, 1002}, {0, 6}, {1, 1}, 20200103));
    const DescriptiveRow r = descriptive_stats("KO", ts);
    CHECK(r.trades == 5);
    CHECK_THAT(r.mean_price, WithinRel(10.04, 1e-12));
    CHECK_THAT(r.sd_price, WithinRel(std::sqrt((0.04 * 0.04 + 0.01 * 0.01 + 0.06 * 0.06 + 0.01 * 0.01 + 0.02 * 0.02) / 4.0), 1e-9));
    CHECK_THAT(r.mean_duration, WithinRel(4.0, 1e-12));
    CHECK_THAT(r.sd_duration, WithinRel(2.0, 1e-12));
    CHECK_THAT(r.pc_pct, WithinAbs(40.0, 1e-12));
    CHECK(descriptive_csv({r}) == "stock,trades,mean_price,sd_price,mean_duration,sd_duration,pc_pct\n"
                                  "KO,5,10.04,0.04,4.00,2.00,40.00\n");
}
