#include "cli.hpp"

#include "pclust/daily_analysis.hpp"
#include "pclust/errors.hpp"
#include "pclust/estimation.hpp"
#include "pclust/ingestion.hpp"
#include "pclust/io.hpp"
#include "pclust/parallel.hpp"
#include "pclust/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace pclust::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::size_t jobs = 0;
};

/// Collects the files of one command and writes them with a manifest.
class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

    void input(const std::string& path, const std::string& content) { inputs_.emplace_back(path, fnv1a64(content)); }
    void output(const std::string& name, std::string content) { outputs_[name] = std::move(content); }

    void commit(const std::string& command, std::uint64_t seed, const std::string& config, std::ostream& out) {
        fs::create_directories(dir_);
        ordered_json manifest;
        manifest["command"] = command;
        manifest["version"] = kVersion;
        manifest["seed"] = seed;
        manifest["config_hash"] = hex64(fnv1a64(config));
        manifest["config"] = config;
        manifest["inputs"] = ordered_json::array();
        for (const auto& [path, hash] : inputs_) manifest["inputs"].push_back({{"path", path}, {"fnv1a64", hex64(hash)}});
        manifest["outputs"] = ordered_json::array();
        for (const auto& [name, content] : outputs_) {
            write_file_atomic(dir_ / name, content);
            manifest["outputs"].push_back({{"file", name}, {"fnv1a64", hex64(fnv1a64(content))}});
            out << "wrote " << (dir_ / name).string() << '\n';
        }
        write_file_atomic(dir_ / (command + "_config.ini"), config);
        write_file_atomic(dir_ / (command + "_manifest.json"), manifest.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::uint64_t>> inputs_;
    std::map<std::string, std::string> outputs_;
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string load(const std::string& path, Artifacts& artifacts) {
    std::string content = read_file(path);
    artifacts.input(path, content);
    return content;
}

TickSeries load_ticks(const std::string& path, std::int64_t tick_scale, Artifacts& artifacts) {
    std::istringstream in(load(path, artifacts));
    return read_tick_series(in, tick_scale);
}

/// Stock labels from file stems; duplicates are a usage error.
std::vector<std::string> labels_for(const std::vector<std::string>& inputs) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& path : inputs) {
        labels.push_back(stem_of(path));
        if (!seen.insert(labels.back()).second) throw UsageError("two inputs share the label " + labels.back());
    }
    return labels;
}

std::int64_t time_of_day(const std::string& text) {
    try {
        return parse_timestamp(text, TimestampFormat::Iso).second;
    } catch (const FormatError&) {
        throw UsageError("expected a time of day like 09:30:00, got " + text);
    }
}

// ---------------------------------------------------------------- clean

struct CleanOptions {
    std::string input;
    std::string name;
    std::string primary_exchange;
    std::string open = "09:30:00";
    std::string close = "16:00:00";
    double mad_k = 10.0;
    std::size_t median_window = 50;
    std::size_t min_neighbours = 10;
    std::int64_t tick_scale = 100;
    std::string date;
    std::string conditions = "@EF";
    double max_malformed = 0.05;
    char delimiter = ',';
    std::string timestamp_format = "auto";
};

void add_clean(CLI::App& app, CleanOptions& o) {
    app.add_option("--input", o.input, "Raw trades file")->required()->check(CLI::ExistingFile);
    app.add_option("--name", o.name, "Output file stem (default: input stem)");
    app.add_option("--primary-exchange", o.primary_exchange, "Keep only this exchange code (default: all)");
    app.add_option("--open", o.open, "Session open, HH:MM:SS")->capture_default_str();
    app.add_option("--close", o.close, "Session close, HH:MM:SS")->capture_default_str();
    app.add_option("--mad-k", o.mad_k, "Outlier threshold in mean absolute deviations")->capture_default_str();
    app.add_option("--median-window", o.median_window, "Neighbours in the rolling median")->capture_default_str();
    app.add_option("--min-neighbours", o.min_neighbours, "Fewest neighbours for the outlier rule")->capture_default_str();
    app.add_option("--tick-scale", o.tick_scale, "Ticks per currency unit")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--date", o.date, "Trading date (yyyymmdd) when the file carries none");
    app.add_option("--conditions", o.conditions, "Retained sale-condition codes")->capture_default_str();
    app.add_option("--max-malformed", o.max_malformed, "Largest tolerated share of malformed rows")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();
    app.add_option("--timestamp-format", o.timestamp_format, "auto, iso or taq")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "iso", "taq"}));
}

void cmd_clean(const CleanOptions& o, Artifacts& artifacts, std::ostream& out) {
    FormatSpec format;
    format.delimiter = o.delimiter;
    format.timestamp_format = o.timestamp_format == "iso"   ? TimestampFormat::Iso
                              : o.timestamp_format == "taq" ? TimestampFormat::Taq
                                                            : TimestampFormat::Auto;
    format.max_malformed_fraction = o.max_malformed;
    if (!o.date.empty()) {
        try {
            format.default_date = parse_date(o.date);
        } catch (const FormatError&) {
            throw UsageError("--date expects yyyymmdd, got " + o.date);
        }
    }
    CleanConfig config;
    config.primary_exchange = o.primary_exchange;
    config.open_ns = time_of_day(o.open);
    config.close_ns = time_of_day(o.close);
    config.retained_conditions = o.conditions;
    config.mad_k = o.mad_k;
    config.median_window = o.median_window;
    config.min_neighbours = o.min_neighbours;

    std::istringstream in(load(o.input, artifacts));
    ParseResult parsed = parse_trades(in, format);
    CleanResult cleaned = clean(std::move(parsed.trades), config);
    cleaned.report.input += parsed.malformed.size();
    const std::string stem = o.name.empty() ? stem_of(o.input) : o.name;

    const bool empty = cleaned.report.input == 0;
    artifacts.output(stem + "_clean.csv", empty ? std::string() : cleaned_csv(cleaned.trades, o.tick_scale, o.delimiter));
    ordered_json report = to_json(cleaned.report);
    report["malformed"] = ordered_json::array();
    for (const auto& m : parsed.malformed) report["malformed"].push_back({{"line", m.line}, {"reason", m.reason}});
    artifacts.output(stem + "_report.json", report.dump(2) + "\n");
    out << "input " << cleaned.report.input << ", malformed " << parsed.malformed.size() << ", retained "
        << cleaned.report.retained << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::size_t n = 100000;
    std::int64_t y0 = 17580;
    std::string params;
    double h5 = 0.022;
    double h10 = 0.064;
    double duration_log_sd = 1.0;
    double volume_log_sd = 1.0;
    double mean_duration = 1.0;
    double mean_volume = 1.0;
    double session_seconds = 23400.0;
    std::string name = "simulated";
    CLI::Option* h5_option = nullptr;
    CLI::Option* h10_option = nullptr;
};

void add_simulate(CLI::App& app, SimulateOptions& o) {
    app.add_option("--n", o.n, "Number of trades")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--y0", o.y0, "Starting price in ticks")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--params", o.params, "Parameter JSON (default: reference values)")->check(CLI::ExistingFile);
    o.h5_option = app.add_option("--h5", o.h5, "Strength of the 5-tick type")->capture_default_str();
    o.h10_option = app.add_option("--h10", o.h10, "Strength of the 10-tick type")->capture_default_str();
    app.add_option("--duration-log-sd", o.duration_log_sd, "Log-sd of simulated durations")->capture_default_str();
    app.add_option("--volume-log-sd", o.volume_log_sd, "Log-sd of simulated volumes")->capture_default_str();
    app.add_option("--mean-duration", o.mean_duration, "Mean duration in seconds")->capture_default_str();
    app.add_option("--mean-volume", o.mean_volume, "Mean volume")->capture_default_str();
    app.add_option("--session-seconds", o.session_seconds, "Trading-day length; 0 keeps one day")->capture_default_str();
    app.add_option("--name", o.name, "Output file stem")->capture_default_str();
}

void cmd_simulate(const SimulateOptions& o, const Globals& g, Artifacts& artifacts, std::ostream& out) {
    StaticParams theta = reference_params(o.h5, o.h10);
    if (!o.params.empty()) {
        const auto j = nlohmann::json::parse(load(o.params, artifacts));
        theta = static_params_from_json(j.contains("theta") ? j.at("theta") : j);
        if (o.h5_option->count() > 0) theta.h5 = o.h5;
        if (o.h10_option->count() > 0) theta.h10 = o.h10;
    }
    validate(theta);
    ExogenousPolicy exo;
    exo.source = LogNormalExogenous{o.duration_log_sd, o.volume_log_sd, o.mean_duration, o.mean_volume};
    exo.session_seconds = o.session_seconds;
    const TickSeries ts = simulate(theta, exo, o.y0, g.seed, o.n);
    artifacts.output(o.name + ".csv", tick_series_csv(ts));
    artifacts.output(o.name + "_params.json", to_json(theta).dump(2) + "\n");
    out << "simulated " << ts.size() << " trades over " << (ts.size() == 0 ? 0 : ts.day.back() - ts.day.front() + 1)
        << " days\n";
}

// ---------------------------------------------------------------- fit

struct FitOptions {
    std::vector<std::string> inputs;
    std::string variant = "all";
    std::size_t starts = 5;
    std::size_t max_evals = 10000;
    double tolerance = 1e-5;
    double perturbation = 0.5;
    std::int64_t tick_scale = 100;
    bool write_path = false;
};

void add_fit(CLI::App& app, FitOptions& o) {
    app.add_option("--input", o.inputs, "Tick or cleaned-trade files, one per stock")->required()->check(CLI::ExistingFile);
    app.add_option("--variant", o.variant, "all, none, static or dynamic")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "none", "static", "dynamic"}, CLI::ignore_case));
    app.add_option("--starts", o.starts, "Optimizer starts per variant")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--max-evals", o.max_evals, "Likelihood evaluations per start")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--tolerance", o.tolerance, "Step tolerance on the unconstrained scale")->capture_default_str();
    app.add_option("--perturbation", o.perturbation, "Half-width of the random start perturbation")->capture_default_str();
    app.add_option("--tick-scale", o.tick_scale, "Ticks per currency unit")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--write-path", o.write_path, "Also write the filtered path of every fit");
}

void cmd_fit(const FitOptions& o, const Globals& g, Artifacts& artifacts, std::ostream& out) {
    const std::vector<std::string> labels = labels_for(o.inputs);
    std::vector<ModelVariant> variants;
    if (CLI::detail::to_lower(o.variant) == "all") {
        variants = {ModelVariant::NoClustering, ModelVariant::StaticClustering, ModelVariant::DynamicClustering};
    } else {
        variants = {parse_variant(o.variant)};
    }
    std::vector<TickSeries> series;
    for (const auto& path : o.inputs) series.push_back(load_ticks(path, o.tick_scale, artifacts));

    FitConfig config;
    config.n_starts = o.starts;
    config.seed = g.seed;
    config.perturbation = o.perturbation;
    config.optim.max_evals = o.max_evals;
    config.optim.tolerance = o.tolerance;
    config.jobs = series.size() > 1 ? 1 : g.jobs;
    std::vector<std::vector<FitResult>> fits(series.size());
    parallel_for(series.size(), series.size() > 1 ? g.jobs : 1,
                 [&](std::size_t i) { fits[i] = fit_nested(series[i], variants, config); });

    std::vector<std::pair<std::string, SummaryRow>> summary;
    std::ostringstream comparison;
    comparison << "stock,n_obs";
    for (auto v : variants) comparison << ",loglik_avg_" << to_string(v);
    for (auto v : variants) comparison << ",aic_" << to_string(v);
    comparison << '\n' << std::fixed;
    for (std::size_t i = 0; i < series.size(); ++i) {
        comparison << csv_field(labels[i]) << ',' << fits[i].front().n_obs;
        for (const auto& fr : fits[i]) comparison << ',' << std::setprecision(4) << fr.loglik_avg;
        for (const auto& fr : fits[i]) comparison << ',' << std::setprecision(0) << fr.aic;
        comparison << '\n';
        for (const auto& fr : fits[i]) {
            const std::string variant(to_string(fr.variant));
            ordered_json j;
            j["stock"] = labels[i];
            j["input"] = o.inputs[i];
            const ordered_json body = to_json(fr);
            for (const auto& [key, value] : body.items()) j[key] = value;
            artifacts.output(labels[i] + "_fit_" + variant + ".json", j.dump(2) + "\n");
            if (o.write_path) artifacts.output(labels[i] + "_path_" + variant + ".csv", path_csv(fr.path));
            summary.emplace_back(labels[i], summarize_fit(fr, 1.0 / static_cast<double>(o.tick_scale)));
            out << labels[i] << ' ' << variant << ": avg loglik " << format_double(fr.loglik_avg) << ", AIC "
                << format_double(fr.aic) << (fr.converged ? "" : " (not converged)") << '\n';
        }
    }
    artifacts.output("summary.csv", summary_csv(summary));
    artifacts.output("comparison.csv", comparison.str());
}

// ---------------------------------------------------------------- daily

struct DailyOptions {
    std::vector<std::string> inputs;
    std::string panel;
    std::string model = "all";
    bool stock_effects_only = false;
    bool rk_flat_top = false;
    bool volatility_sd = false;
    std::size_t bandwidth = 0;
    CLI::Option* bandwidth_option = nullptr;
    std::size_t jitter = 2;
    std::int64_t tick_scale = 100;
    std::vector<std::string> fits;
};

void add_daily(CLI::App& app, DailyOptions& o) {
    auto* inputs = app.add_option("--input", o.inputs, "Tick or cleaned-trade files, one per stock")
                       ->check(CLI::ExistingFile);
    auto* panel = app.add_option("--panel", o.panel, "Existing stock-day panel CSV")->check(CLI::ExistingFile);
    inputs->excludes(panel);
    app.add_option("--model", o.model, "I, II, III or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"I", "II", "III", "all"}));
    app.add_flag("--stock-effects-only", o.stock_effects_only, "Drop the day fixed effects");
    app.add_flag("--rk-flat-top", o.rk_flat_top, "Use the flat-top realized kernel");
    app.add_flag("--volatility-sd", o.volatility_sd, "Regress on ln of the RK standard deviation");
    o.bandwidth_option = app.add_option("--bandwidth", o.bandwidth, "Fixed realized-kernel bandwidth");
    app.add_option("--jitter", o.jitter, "Observations averaged at each end of a day")->capture_default_str();
    app.add_option("--tick-scale", o.tick_scale, "Ticks per currency unit")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--fit", o.fits, "Fit JSON files supplying filtered variances for the digit breakdown")
        ->check(CLI::ExistingFile);
}

void cmd_daily(const DailyOptions& o, Artifacts& artifacts, std::ostream& out, std::ostream& err) {
    if (o.inputs.empty() && o.panel.empty()) throw UsageError("daily needs --input or --panel");
    std::vector<DailyRow> panel;
    if (!o.panel.empty()) {
        std::istringstream in(load(o.panel, artifacts));
        panel = read_panel_csv(in);
    } else {
        const std::vector<std::string> labels = labels_for(o.inputs);
        std::map<std::string, TickSeries> per_stock;
        for (std::size_t i = 0; i < labels.size(); ++i) per_stock[labels[i]] = load_ticks(o.inputs[i], o.tick_scale, artifacts);

        std::map<std::string, StaticParams> thetas;
        for (const auto& path : o.fits) {
            const auto j = nlohmann::json::parse(load(path, artifacts));
            std::string stock = j.value("stock", std::string());
            if (stock.empty() && labels.size() == 1) stock = labels.front();
            if (!per_stock.contains(stock)) throw UsageError(path + " belongs to no --input stock");
            thetas[stock] = static_params_from_json(j.at("theta"));
        }
        for (const auto& [stock, ts] : per_stock) {
            std::optional<FilterPath> path;
            if (const auto it = thetas.find(stock); it != thetas.end()) path = filter_series(it->second, ts);
            artifacts.output("digits_" + stock + ".csv", digit_csv(digit_breakdown(ts, path ? &*path : nullptr)));
        }

        RKConfig rk;
        rk.form = o.rk_flat_top ? KernelForm::FlatTop : KernelForm::NonFlatTop;
        rk.jitter = o.jitter;
        if (o.bandwidth_option->count() > 0) rk.bandwidth = o.bandwidth;
        PanelBuild built = build_daily_panel(per_stock, o.tick_scale, rk);
        for (const auto& s : built.skipped) err << "warning: skipped " << s << '\n';
        panel = std::move(built.rows);
        artifacts.output("panel.csv", panel_csv(panel));
    }

    std::set<std::string> stocks;
    for (const auto& r : panel) stocks.insert(r.stock);
    if (stocks.size() < 2) {
        err << "warning: panel regressions need at least two stocks; skipped\n";
        return;
    }
    PanelSpec spec;
    spec.day_effects = !o.stock_effects_only;
    spec.volatility_as_sd = o.volatility_sd;
    std::vector<std::pair<std::string, PanelModel>> models;
    if (o.model == "I" || o.model == "all") models.emplace_back("I", PanelModel::I);
    if (o.model == "II" || o.model == "all") models.emplace_back("II", PanelModel::II);
    if (o.model == "III" || o.model == "all") models.emplace_back("III", PanelModel::III);
    std::vector<std::pair<std::string, PanelFit>> fits;
    ordered_json coefficients;
    for (const auto& [label, model] : models) {
        spec.model = model;
        fits.emplace_back(label, fe_regression(panel, spec));
        coefficients[label] = to_json(fits.back().second);
    }
    const std::string table = coefficient_table(fits);
    artifacts.output("coefficients.txt", table);
    artifacts.output("coefficients.json", coefficients.dump(2) + "\n");
    artifacts.output("univariate_fits.csv", univariate_fits_csv(panel, spec));
    out << table;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
    std::vector<std::string> inputs;
    std::int64_t tick_scale = 100;
};

void add_report(CLI::App& app, ReportOptions& o) {
    app.add_option("--input", o.inputs, "Tick or cleaned-trade files, one per stock")->required()->check(CLI::ExistingFile);
    app.add_option("--tick-scale", o.tick_scale, "Ticks per currency unit")->capture_default_str()->check(CLI::PositiveNumber);
}

void cmd_report(const ReportOptions& o, Artifacts& artifacts, std::ostream& out) {
    const std::vector<std::string> labels = labels_for(o.inputs);
    std::vector<DescriptiveRow> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        rows.push_back(descriptive_stats(labels[i], load_ticks(o.inputs[i], o.tick_scale, artifacts), o.tick_scale));
    }
    const std::string table = descriptive_csv(rows);
    artifacts.output("descriptive.csv", table);
    out << table;
}

/// Global settings plus those of the subcommand that ran, as config-file text.
/// Unset text options are left out so the file reads back unchanged; the
/// output directory and worker count do not change outputs and are left out too.
std::string active_config(const CLI::App& app) {
    std::istringstream all(app.config_to_str(true, false));
    std::set<std::string> skipped{"out-dir=", "jobs="};
    for (const auto* sub : app.get_subcommands({})) {
        if (!sub->parsed()) skipped.insert(sub->get_name() + ".");
    }
    std::string kept;
    for (std::string line; std::getline(all, line);) {
        const bool other = std::any_of(skipped.begin(), skipped.end(), [&](const std::string& p) { return line.starts_with(p); });
        if (!other && !line.ends_with("=\"\"")) kept += line + '\n';
    }
    return kept;
}

/// The subcommand named by a config file's keys, for `--config` runs that omit it.
std::optional<std::string> config_command(const std::vector<std::string>& args, const CLI::App& app) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (app.get_subcommand_no_throw(args[i]) != nullptr) return std::nullopt;
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    std::ifstream in(path);
    for (std::string line; in && std::getline(in, line);) {
        const auto dot = line.find('.');
        const auto eq = line.find('=');
        if (dot != std::string::npos && dot < eq && app.get_subcommand_no_throw(line.substr(0, dot)) != nullptr) {
            return line.substr(0, dot);
        }
    }
    return std::nullopt;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Price clustering toolkit: clean trades, simulate, fit, and run daily panel analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));
    Globals g;
    auto* seed_option = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads; 0 uses every core")->capture_default_str();
    app.set_config("--config", "", "Key-value config file mirroring the flags");

    CleanOptions clean_options;
    SimulateOptions simulate_options;
    FitOptions fit_options;
    DailyOptions daily_options;
    ReportOptions report_options;
    auto* clean_cmd = app.add_subcommand("clean", "Clean raw trades into a tick file and a report");
    add_clean(*clean_cmd, clean_options);
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate trades from the model");
    add_simulate(*simulate_cmd, simulate_options);
    auto* fit_cmd = app.add_subcommand("fit", "Estimate the model variants by maximum likelihood");
    add_fit(*fit_cmd, fit_options);
    auto* daily_cmd = app.add_subcommand("daily", "Stock-day panel, fixed-effects regressions and digit breakdown");
    add_daily(*daily_cmd, daily_options);
    auto* report_cmd = app.add_subcommand("report", "Descriptive statistics per stock");
    add_report(*report_cmd, report_options);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (const auto command = config_command(args, app)) reversed.insert(reversed.begin(), *command);
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    Artifacts artifacts{fs::path(g.out_dir)};
    const std::string config = active_config(app);
    try {
        std::string command;
        if (clean_cmd->parsed()) {
            command = "clean";
            cmd_clean(clean_options, artifacts, out);
        } else if (simulate_cmd->parsed()) {
            command = "simulate";
            if (seed_option->count() == 0) throw UsageError("simulate requires --seed");
            cmd_simulate(simulate_options, g, artifacts, out);
        } else if (fit_cmd->parsed()) {
            command = "fit";
            cmd_fit(fit_options, g, artifacts, out);
        } else if (daily_cmd->parsed()) {
            command = "daily";
            cmd_daily(daily_options, artifacts, out, err);
        } else {
            command = "report";
            cmd_report(report_options, artifacts, out);
        }
        artifacts.commit(command, g.seed, config, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for more information.\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace pclust::cli
