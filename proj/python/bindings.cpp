#include "pclust/cluster_mixture.hpp"
#include "pclust/daily_analysis.hpp"
#include "pclust/double_poisson.hpp"
#include "pclust/dynamics.hpp"
#include "pclust/errors.hpp"
#include "pclust/estimation.hpp"
#include "pclust/ingestion.hpp"
#include "pclust/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pclust;

namespace {

NormConstMethod method_from(const std::string& name, const DPParams& p) {
    if (name == "efron") return EfronApprox{};
    if (name == "exact") return exact_truncation(p);
    throw std::invalid_argument("normalization must be 'efron' or 'exact', got " + name);
}

py::dict theta_dict(const StaticParams& theta) {
    py::dict d;
    const auto values = theta.to_array();
    for (std::size_t i = 0; i < StaticParams::size; ++i) d[py::str(std::string(StaticParams::names[i]))] = values[i];
    return d;
}

StaticParams theta_from(const py::dict& d) {
    StaticParams base;
    auto values = base.to_array();
    for (const auto& [key, value] : d) {
        const auto name = key.cast<std::string>();
        const auto it = std::find(StaticParams::names.begin(), StaticParams::names.end(), name);
        if (it == StaticParams::names.end()) throw std::invalid_argument("unknown parameter " + name);
        values[static_cast<std::size_t>(it - StaticParams::names.begin())] = value.cast<double>();
    }
    return StaticParams::from_array(values);
}

py::dict path_dict(const FilterPath& p) {
    py::dict d;
    d["mu"] = p.mu;
    d["alpha"] = p.alpha;
    d["eta"] = p.eta;
    d["phi1"] = p.phi1;
    d["phi5"] = p.phi5;
    d["phi10"] = p.phi10;
    d["loglik"] = p.loglik;
    d["loglik_total"] = p.loglik_total;
    d["n_contrib"] = p.n_contrib;
    d["n_clamped"] = p.n_clamped;
    return d;
}

py::dict fit_dict(const FitResult& fr) {
    py::dict d;
    d["variant"] = std::string(to_string(fr.variant));
    d["theta"] = theta_dict(fr.theta_hat);
    d["loglik_total"] = fr.loglik_total;
    d["loglik_avg"] = fr.loglik_avg;
    d["aic"] = fr.aic;
    d["n_obs"] = fr.n_obs;
    d["n_params"] = fr.n_params;
    d["converged"] = fr.converged;
    const SummaryRow s = summarize_fit(fr);
    d["phi_pct"] = py::make_tuple(s.phi1_pct, s.phi5_pct, s.phi10_pct);
    d["mean_alpha"] = s.mean_alpha;
    return d;
}

FitConfig fit_config(std::size_t starts, std::uint64_t seed, std::size_t jobs) {
    FitConfig cfg;
    cfg.n_starts = starts;
    cfg.seed = seed;
    cfg.jobs = jobs;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_pclust, m) {
    m.doc() = "Double Poisson price clustering models";
    m.attr("__version__") = std::string(kVersion);

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ValueError);
    py::register_exception<SingularDesign>(m, "SingularDesign", PyExc_ValueError);
    py::register_exception<EstimationFailure>(m, "EstimationFailure", PyExc_RuntimeError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    // ---- distribution
    m.def(
        "pmf", [](double mu, double alpha, std::int64_t y, const std::string& normalization) {
            const DPParams p{mu, alpha};
            return pmf(p, y, method_from(normalization, p));
        },
        py::arg("mu"), py::arg("alpha"), py::arg("y"), py::arg("normalization") = "efron");
    m.def(
        "log_pmf", [](double mu, double alpha, std::int64_t y, const std::string& normalization) {
            const DPParams p{mu, alpha};
            return log_pmf(p, y, method_from(normalization, p));
        },
        py::arg("mu"), py::arg("alpha"), py::arg("y"), py::arg("normalization") = "efron");
    m.def(
        "norm_const", [](double mu, double alpha, const std::string& normalization) {
            const DPParams p{mu, alpha};
            return norm_const(p, method_from(normalization, p));
        },
        py::arg("mu"), py::arg("alpha"), py::arg("normalization") = "efron");
    m.def(
        "score", [](double mu, double alpha, std::int64_t y) {
            const auto s = score({mu, alpha}, y);
            return py::make_tuple(s.mu, s.alpha);
        },
        py::arg("mu"), py::arg("alpha"), py::arg("y"));
    m.def(
        "fisher_info", [](double mu, double alpha) { return Eigen::Matrix2d(fisher_info({mu, alpha})); },
        py::arg("mu"), py::arg("alpha"));
    m.def(
        "sample", [](double mu, double alpha, std::uint64_t seed, std::size_t n) { return sample({mu, alpha}, seed, n); },
        py::arg("mu"), py::arg("alpha"), py::arg("seed"), py::arg("n"));

    // ---- mixture over tick multiples
    m.def(
        "mixture_pmf",
        [](double mu, double alpha, std::vector<int> multiples, std::vector<double> phi, std::int64_t y) {
            const MixtureParams mp{{mu, alpha}, TickMultipleSet(std::move(multiples)), std::move(phi)};
            validate(mp);
            return mixture_pmf(mp, y);
        },
        py::arg("mu"), py::arg("alpha"), py::arg("multiples"), py::arg("phi"), py::arg("y"));
    m.def(
        "mixture_log_lik",
        [](double mu, double alpha, std::vector<int> multiples, std::vector<double> phi, std::int64_t y) {
            const MixtureParams mp{{mu, alpha}, TickMultipleSet(std::move(multiples)), std::move(phi)};
            validate(mp);
            return mixture_log_lik(mp, y);
        },
        py::arg("mu"), py::arg("alpha"), py::arg("multiples"), py::arg("phi"), py::arg("y"));

    // ---- series, filter, estimation
    py::class_<TickSeries>(m, "TickSeries")
        .def(py::init<>())
        .def_readwrite("day", &TickSeries::day)
        .def_readwrite("time", &TickSeries::time)
        .def_readwrite("price", &TickSeries::price)
        .def_readwrite("duration", &TickSeries::duration)
        .def_readwrite("volume", &TickSeries::volume)
        .def("__len__", &TickSeries::size)
        .def("validate", [](const TickSeries& ts) { validate(ts); })
        .def("to_csv", [](const TickSeries& ts) { return tick_series_csv(ts); })
        .def_static(
            "from_csv",
            [](const std::string& text, std::int64_t tick_scale) {
                std::istringstream in(text);
                return read_tick_series(in, tick_scale);
            },
            py::arg("text"), py::arg("tick_scale") = 100);

    m.attr("PARAMETER_NAMES") = py::cast(std::vector<std::string>(StaticParams::names.begin(), StaticParams::names.end()));
    m.def(
        "reference_params", [](double h5, double h10) { return theta_dict(reference_params(h5, h10)); },
        py::arg("h5") = 0.022, py::arg("h10") = 0.064);
    m.def(
        "simulate",
        [](const py::dict& theta, std::size_t n, std::uint64_t seed, std::int64_t y0, double session_seconds) {
            ExogenousPolicy exo;
            exo.session_seconds = session_seconds;
            return simulate(theta_from(theta), exo, y0, seed, n);
        },
        py::arg("theta"), py::arg("n"), py::arg("seed"), py::arg("y0") = 17580, py::arg("session_seconds") = 23400.0);
    m.def(
        "filter_series", [](const py::dict& theta, const TickSeries& ts) { return path_dict(filter_series(theta_from(theta), ts)); },
        py::arg("theta"), py::arg("series"));
    m.def(
        "fit",
        [](const TickSeries& ts, const std::string& variant, std::size_t starts, std::uint64_t seed, std::size_t jobs) {
            FitResult fr;
            {
                py::gil_scoped_release release;
                fr = fit_mle(ts, parse_variant(variant), fit_config(starts, seed, jobs));
            }
            return fit_dict(fr);
        },
        py::arg("series"), py::arg("variant") = "dynamic", py::arg("starts") = 5, py::arg("seed") = 0,
        py::arg("jobs") = 0);
    m.def(
        "fit_nested",
        [](const TickSeries& ts, const std::vector<std::string>& variants, std::size_t starts, std::uint64_t seed,
           std::size_t jobs) {
            std::vector<ModelVariant> vs;
            for (const auto& v : variants) vs.push_back(parse_variant(v));
            std::vector<FitResult> fits;
            {
                py::gil_scoped_release release;
                fits = fit_nested(ts, vs, fit_config(starts, seed, jobs));
            }
            py::list out;
            for (const auto& fr : fits) out.append(fit_dict(fr));
            return out;
        },
        py::arg("series"), py::arg("variants") = std::vector<std::string>{"none", "static", "dynamic"},
        py::arg("starts") = 5, py::arg("seed") = 0, py::arg("jobs") = 0);

    // ---- ingestion
    m.def(
        "clean_csv",
        [](const std::string& text, const std::string& primary_exchange) {
            std::istringstream in(text);
            const ParseResult parsed = parse_trades(in);
            CleanConfig config;
            config.primary_exchange = primary_exchange;
            const CleanResult result = clean(parsed.trades, config);
            return py::make_tuple(cleaned_csv(result.trades), to_json(result.report).dump());
        },
        py::arg("text"), py::arg("primary_exchange") = "",
        "Cleans raw trade CSV text; returns the cleaned CSV and the report as JSON text.");

    // ---- daily analysis
    m.def("price_clustering_measure", &price_clustering_measure, py::arg("prices"));
    m.def(
        "realized_kernel",
        [](const std::vector<double>& times, const std::vector<double>& log_prices, std::optional<std::size_t> bandwidth,
           std::size_t jitter, bool flat_top) {
            RKConfig cfg;
            cfg.bandwidth = bandwidth;
            cfg.jitter = jitter;
            cfg.form = flat_top ? KernelForm::FlatTop : KernelForm::NonFlatTop;
            return realized_kernel(times, log_prices, cfg);
        },
        py::arg("times"), py::arg("log_prices"), py::arg("bandwidth") = py::none(), py::arg("jitter") = 2,
        py::arg("flat_top") = false);
    m.def(
        "fe_regression",
        [](const std::string& panel_csv_text, const std::string& model, bool day_effects) {
            std::istringstream in(panel_csv_text);
            PanelSpec spec;
            spec.model = model == "I" ? PanelModel::I : model == "II" ? PanelModel::II : PanelModel::III;
            if (model != "I" && model != "II" && model != "III") throw std::invalid_argument("model must be I, II or III");
            spec.day_effects = day_effects;
            const PanelFit fit = fe_regression(read_panel_csv(in), spec);
            py::dict d;
            d["names"] = fit.names;
            d["beta"] = Eigen::VectorXd(fit.beta);
            d["se"] = Eigen::VectorXd(fit.se);
            d["vcov"] = Eigen::MatrixXd(fit.vcov);
            std::vector<double> p;
            for (Eigen::Index i = 0; i < fit.beta.size(); ++i) p.push_back(fit.p_value(static_cast<std::size_t>(i)));
            d["p_value"] = p;
            d["n"] = fit.n;
            return d;
        },
        py::arg("panel_csv"), py::arg("model") = "III", py::arg("day_effects") = true,
        "Two-way fixed-effects regression of a panel CSV (stock,day,pc,mean_price,rk_vol,mean_duration,mean_volume).");
}
