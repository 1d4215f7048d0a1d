#include "pclust/daily_analysis.hpp"

#include "pclust/errors.hpp"
#include "pclust/io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace pclust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Previous-tick sampled realized variance on the grid start, start + step, ... <= end.
double sparse_rv(const std::vector<double>& times, const std::vector<double>& x, double start, double step,
                 std::size_t& points) {
    double rv = 0.0;
    double previous = kNaN;
    std::size_t idx = 0;
    points = 0;
    for (double g = start; g <= times.back(); g += step) {
        while (idx + 1 < times.size() && times[idx + 1] <= g) ++idx;
        if (times[idx] > g) continue;
        const double value = x[idx];
        if (!std::isnan(previous)) rv += (value - previous) * (value - previous);
        previous = value;
        ++points;
    }
    return rv;
}

std::vector<double> jittered(const std::vector<double>& x, std::size_t m) {
    if (m <= 1 || x.size() < 2 * m) return x;
    std::vector<double> out;
    out.reserve(x.size() - 2 * m + 2);
    out.push_back(std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m), 0.0) / static_cast<double>(m));
    out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(m), x.end() - static_cast<std::ptrdiff_t>(m));
    out.push_back(std::accumulate(x.end() - static_cast<std::ptrdiff_t>(m), x.end(), 0.0) / static_cast<double>(m));
    return out;
}

std::vector<double> differences(const std::vector<double>& x) {
    std::vector<double> r;
    r.reserve(x.size());
    for (std::size_t i = 1; i < x.size(); ++i) r.push_back(x[i] - x[i - 1]);
    return r;
}

std::vector<std::string> regressor_names(PanelModel model) {
    switch (model) {
    case PanelModel::I:
        return {"price", "volatility", "duration"};
    case PanelModel::II:
        return {"price", "duration", "volume"};
    case PanelModel::III:
        return {"price", "volatility", "duration", "volume"};
    }
    return {};
}

double covariate(const DailyRow& row, const std::string& name, const PanelSpec& spec) {
    if (name == "price") return std::log(row.mean_price);
    if (name == "volatility") return spec.volatility_as_sd ? 0.5 * std::log(row.rk_vol) : std::log(row.rk_vol);
    if (name == "duration") return std::log(row.mean_duration);
    return std::log(row.mean_volume);
}

template <class Key>
std::vector<int> label_ids(const std::vector<Key>& keys, std::vector<Key>& labels) {
    labels = keys;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<int> ids;
    ids.reserve(keys.size());
    for (const auto& k : keys) {
        ids.push_back(static_cast<int>(std::lower_bound(labels.begin(), labels.end(), k) - labels.begin()));
    }
    return ids;
}

int group_count(const std::vector<int>& ids) { return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1; }

// Subtracts group means column-wise; returns the largest adjustment.
double demean_by(Eigen::MatrixXd& m, const std::vector<int>& ids, int groups) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(groups, m.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(groups);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        sums.row(ids[static_cast<std::size_t>(i)]) += m.row(i);
        counts(ids[static_cast<std::size_t>(i)]) += 1.0;
    }
    double largest = 0.0;
    for (int g = 0; g < groups; ++g) {
        if (counts(g) > 0) sums.row(g) /= counts(g);
        largest = std::max(largest, sums.row(g).cwiseAbs().maxCoeff());
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) -= sums.row(ids[static_cast<std::size_t>(i)]);
    return largest;
}

std::string fixed(double value, int places) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(places) << value;
    return out.str();
}

} // namespace

double price_clustering_measure(const std::vector<std::int64_t>& prices) {
    if (prices.empty()) throw DomainError("price clustering needs at least one price");
    std::size_t multiples = 0;
    for (auto y : prices) multiples += y % 5 == 0 ? 1 : 0;
    return static_cast<double>(multiples) / static_cast<double>(prices.size()) - 0.2;
}

double parzen(double x) {
    x = std::abs(x);
    if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
    if (x <= 1.0) return 2.0 * (1.0 - x) * (1.0 - x) * (1.0 - x);
    return 0.0;
}

double parzen_bandwidth_constant() { return std::pow(144.0 / 0.269, 0.2); }

RKResult realized_kernel_detail(const std::vector<double>& times, const std::vector<double>& log_prices,
                                const RKConfig& config) {
    if (times.size() != log_prices.size()) throw DomainError("times and prices differ in length");
    if (log_prices.size() < 2) throw DomainError("realized kernel needs at least two observations");
    for (std::size_t i = 0; i < log_prices.size(); ++i) {
        if (!std::isfinite(log_prices[i])) throw DomainError("log prices must be finite");
        if (i > 0 && times[i] < times[i - 1]) throw DomainError("times must be nondecreasing");
    }
    RKResult out;
    const std::vector<double> raw_returns = differences(log_prices);
    const std::vector<double> returns = differences(jittered(log_prices, config.jitter));
    const std::size_t n = returns.size();

    std::size_t bandwidth = 0;
    if (config.bandwidth) {
        bandwidth = *config.bandwidth;
    } else {
        double rv = 0.0;
        for (double r : raw_returns) rv += r * r;
        out.noise_variance = rv / (2.0 * static_cast<double>(raw_returns.size()));
        double pilot = 0.0;
        std::size_t used = 0;
        for (double offset = 0.0; offset < config.sparse_seconds; offset += config.offset_seconds) {
            std::size_t points = 0;
            const double value = sparse_rv(times, log_prices, times.front() + offset, config.sparse_seconds, points);
            if (points < 2) continue;
            pilot += value;
            ++used;
        }
        out.pilot_variance = used > 0 ? pilot / static_cast<double>(used) : 0.0;
        if (!(out.pilot_variance > 0.0)) out.pilot_variance = rv;
        if (out.noise_variance > 0.0) {
            const double xi2 = out.noise_variance / out.pilot_variance;
            const double h = parzen_bandwidth_constant() * std::pow(xi2, 0.4) *
                             std::pow(static_cast<double>(raw_returns.size()), 0.6);
            bandwidth = static_cast<std::size_t>(std::ceil(h));
        }
    }
    if (bandwidth > 0 && n < bandwidth + 2) {
        const std::size_t shrunk = n >= 2 ? n - 2 : 0;
        out.warning = "bandwidth " + std::to_string(bandwidth) + " shrunk to " + std::to_string(shrunk) + " for " +
                      std::to_string(n) + " returns";
        out.bandwidth_shrunk = true;
        bandwidth = shrunk;
    }
    out.bandwidth = bandwidth;

    double value = 0.0;
    for (double r : returns) value += r * r;
    for (std::size_t h = 1; h <= bandwidth; ++h) {
        double gamma = 0.0;
        for (std::size_t j = h; j < n; ++j) gamma += returns[j] * returns[j - h];
        const double x = config.form == KernelForm::NonFlatTop ? static_cast<double>(h) / static_cast<double>(bandwidth + 1)
                                                                : static_cast<double>(h - 1) / static_cast<double>(bandwidth);
        value += 2.0 * parzen(x) * gamma;
    }
    if (value < -config.negative_tolerance) {
        throw DomainError("realized kernel is negative (" + std::to_string(value) + ")");
    }
    out.value = std::max(value, 0.0);
    return out;
}

double realized_kernel(const std::vector<double>& times, const std::vector<double>& log_prices, const RKConfig& config) {
    return realized_kernel_detail(times, log_prices, config).value;
}

PanelBuild build_daily_panel(const std::map<std::string, TickSeries>& per_stock, std::int64_t tick_scale,
                             const RKConfig& rk) {
    PanelBuild out;
    for (const auto& [stock, ts] : per_stock) {
        for (std::size_t begin = 0; begin < ts.size();) {
            std::size_t end = begin + 1;
            while (end < ts.size() && !ts.segment_start(end)) ++end;
            const std::int32_t day = ts.day[begin];
            if (end - begin < 2) {
                out.skipped.push_back(stock + " " + std::to_string(day) + ": fewer than two trades");
                begin = end;
                continue;
            }
            DailyRow row;
            row.stock = stock;
            row.day = day;
            std::vector<std::int64_t> prices(ts.price.begin() + static_cast<std::ptrdiff_t>(begin),
                                             ts.price.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<double> times(ts.time.begin() + static_cast<std::ptrdiff_t>(begin),
                                      ts.time.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<double> log_prices;
            double price_sum = 0.0, volume_sum = 0.0, duration_sum = 0.0;
            std::size_t durations = 0;
            for (std::size_t i = begin; i < end; ++i) {
                log_prices.push_back(std::log(static_cast<double>(ts.price[i])));
                price_sum += static_cast<double>(ts.price[i]);
                volume_sum += ts.volume[i];
                if (i > begin) {
                    duration_sum += ts.duration[i];
                    ++durations;
                }
            }
            const double count = static_cast<double>(end - begin);
            row.pc = price_clustering_measure(prices);
            row.mean_price = price_sum / count / static_cast<double>(tick_scale);
            row.mean_volume = volume_sum / count;
            row.mean_duration = duration_sum / static_cast<double>(durations);
            const RKResult kernel = realized_kernel_detail(times, log_prices, rk);
            row.rk_vol = kernel.value;
            if (!kernel.warning.empty()) out.skipped.push_back(stock + " " + std::to_string(day) + ": " + kernel.warning);
            out.rows.push_back(std::move(row));
            begin = end;
        }
    }
    return out;
}

std::string panel_csv(const std::vector<DailyRow>& rows) {
    std::string out = "stock,day,pc,mean_price,rk_vol,mean_duration,mean_volume\n";
    for (const auto& r : rows) {
        out += csv_field(r.stock) + ',' + std::to_string(r.day) + ',' + format_double(r.pc) + ',' +
               format_double(r.mean_price) + ',' + format_double(r.rk_vol) + ',' + format_double(r.mean_duration) + ',' +
               format_double(r.mean_volume) + '\n';
    }
    return out;
}

std::vector<DailyRow> read_panel_csv(std::istream& in) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    std::size_t line = 0;
    std::vector<DailyRow> rows;
    if (!reader.next(fields, line)) return rows;
    const std::vector<std::string> expected = {"stock", "day", "pc", "mean_price", "rk_vol", "mean_duration", "mean_volume"};
    std::vector<std::size_t> index(expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const auto it = std::find(fields.begin(), fields.end(), expected[k]);
        if (it == fields.end()) throw FormatError("panel file lacks column '" + expected[k] + "'");
        index[k] = static_cast<std::size_t>(it - fields.begin());
    }
    const std::size_t width = fields.size();
    while (reader.next(fields, line)) {
        if (fields.size() == 1 && fields.front().empty()) continue;
        if (fields.size() != width) throw FormatError("panel line " + std::to_string(line) + " has a wrong field count");
        try {
            DailyRow r;
            r.stock = fields[index[0]];
            r.day = static_cast<std::int32_t>(std::stol(fields[index[1]]));
            r.pc = std::stod(fields[index[2]]);
            r.mean_price = std::stod(fields[index[3]]);
            r.rk_vol = std::stod(fields[index[4]]);
            r.mean_duration = std::stod(fields[index[5]]);
            r.mean_volume = std::stod(fields[index[6]]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw FormatError("panel line " + std::to_string(line) + " has a non-numeric field");
        }
    }
    return rows;
}

double PanelFit::p_value(std::size_t i) const {
    const double t = beta(static_cast<Eigen::Index>(i)) / se(static_cast<Eigen::Index>(i));
    return std::isfinite(t) ? std::erfc(std::abs(t) / std::sqrt(2.0)) : kNaN;
}

Eigen::MatrixXd two_way_cluster_vcov(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals,
                                     const std::vector<int>& stock_ids, const std::vector<int>& day_ids) {
    const Eigen::Index p = x.cols();
    if (x.rows() != residuals.size() || static_cast<std::size_t>(x.rows()) != stock_ids.size() ||
        stock_ids.size() != day_ids.size()) {
        throw DomainError("design, residuals and cluster labels differ in length");
    }
    auto cluster_meat = [&](const std::vector<int>& ids) {
        const int groups = group_count(ids);
        Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(groups, p);
        for (Eigen::Index i = 0; i < x.rows(); ++i) scores.row(ids[static_cast<std::size_t>(i)]) += x.row(i) * residuals(i);
        return Eigen::MatrixXd(scores.transpose() * scores);
    };
    const Eigen::MatrixXd weighted = x.array().colwise() * residuals.array();
    const Eigen::MatrixXd het = weighted.transpose() * weighted;
    const Eigen::MatrixXd meat = cluster_meat(stock_ids) + cluster_meat(day_ids) - het;
    const Eigen::MatrixXd bread = (x.transpose() * x).inverse();
    return bread * meat * bread;
}

PanelFit fe_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<int>& stock_ids,
                       const std::vector<int>& day_ids, const std::vector<std::string>& names, const PanelSpec& spec) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const int stocks = group_count(stock_ids);
    const int days = group_count(day_ids);
    if (stocks < 2) throw DomainError("panel regression needs at least two stocks");
    if (spec.day_effects && days < 2) throw DomainError("panel regression needs at least two days");
    if (y.size() != n || static_cast<std::size_t>(n) != stock_ids.size() || stock_ids.size() != day_ids.size()) {
        throw DomainError("panel inputs differ in length");
    }

    Eigen::MatrixXd data(n, p + 1);
    data << y, x;
    for (std::size_t sweep = 0;; ++sweep) {
        double change = demean_by(data, stock_ids, stocks);
        if (spec.day_effects) change = std::max(change, demean_by(data, day_ids, days));
        if (change < spec.tolerance) break;
        if (sweep >= spec.max_sweeps) throw DomainError("fixed-effect demeaning did not converge");
    }
    const Eigen::VectorXd yt = data.col(0);
    const Eigen::MatrixXd xt = data.rightCols(p);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xt);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::string collinear;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < p; ++k) {
            if (!collinear.empty()) collinear += ", ";
            collinear += names[static_cast<std::size_t>(perm(k))];
        }
        throw SingularDesign("design is rank deficient after removing fixed effects; collinear: " + collinear);
    }

    PanelFit fit;
    fit.names = names;
    fit.n = static_cast<std::size_t>(n);
    fit.beta = qr.solve(yt);
    fit.residuals = yt - xt * fit.beta;
    fit.vcov = two_way_cluster_vcov(xt, fit.residuals, stock_ids, day_ids);
    fit.se.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) fit.se(k) = fit.vcov(k, k) >= 0.0 ? std::sqrt(fit.vcov(k, k)) : kNaN;

    // Recover the effects from the undemeaned residual by alternating group means.
    const Eigen::VectorXd u = y - x * fit.beta;
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(stocks);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(spec.day_effects ? days : 0);
    for (std::size_t sweep = 0; sweep <= spec.max_sweeps; ++sweep) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(stocks), count = Eigen::VectorXd::Zero(stocks);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int s = stock_ids[static_cast<std::size_t>(i)];
            sum(s) += u(i) - (spec.day_effects ? delta(day_ids[static_cast<std::size_t>(i)]) : 0.0);
            count(s) += 1.0;
        }
        const Eigen::VectorXd next_gamma = sum.cwiseQuotient(count);
        double change = (next_gamma - gamma).cwiseAbs().maxCoeff();
        gamma = next_gamma;
        if (spec.day_effects) {
            Eigen::VectorXd dsum = Eigen::VectorXd::Zero(days), dcount = Eigen::VectorXd::Zero(days);
            for (Eigen::Index i = 0; i < n; ++i) {
                const int d = day_ids[static_cast<std::size_t>(i)];
                dsum(d) += u(i) - gamma(stock_ids[static_cast<std::size_t>(i)]);
                dcount(d) += 1.0;
            }
            const Eigen::VectorXd next_delta = dsum.cwiseQuotient(dcount);
            change = std::max(change, (next_delta - delta).cwiseAbs().maxCoeff());
            delta = next_delta;
        }
        if (change < spec.tolerance) break;
    }
    if (spec.day_effects) {
        const double shift = delta.mean();
        delta.array() -= shift;
        gamma.array() += shift;
    }
    fit.fe_stock = gamma;
    fit.fe_day = delta;
    return fit;
}

PanelFit fe_regression(const std::vector<DailyRow>& panel, const PanelSpec& spec) {
    const auto names = regressor_names(spec.model);
    std::vector<const DailyRow*> rows;
    std::size_t dropped = 0;
    for (const auto& r : panel) {
        if (!(r.rk_vol > 0.0)) {
            ++dropped;
            continue;
        }
        if (!(r.mean_price > 0.0) || !(r.mean_duration > 0.0) || !(r.mean_volume > 0.0)) {
            throw DomainError("panel covariates must be positive for " + r.stock + " " + std::to_string(r.day));
        }
        rows.push_back(&r);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(names.size()));
    Eigen::VectorXd y(n);
    std::vector<std::string> stock_keys;
    std::vector<std::int32_t> day_keys;
    for (Eigen::Index i = 0; i < n; ++i) {
        const DailyRow& r = *rows[static_cast<std::size_t>(i)];
        y(i) = spec.pc_scale * r.pc;
        for (std::size_t k = 0; k < names.size(); ++k) x(i, static_cast<Eigen::Index>(k)) = covariate(r, names[k], spec);
        stock_keys.push_back(r.stock);
        day_keys.push_back(r.day);
    }
    std::vector<std::string> stocks;
    std::vector<std::int32_t> days;
    const auto stock_ids = label_ids(stock_keys, stocks);
    const auto day_ids = label_ids(day_keys, days);
    PanelFit fit = fe_regression(x, y, stock_ids, day_ids, names, spec);
    fit.stocks = std::move(stocks);
    fit.days = spec.day_effects ? std::move(days) : std::vector<std::int32_t>{};
    fit.dropped_zero_rk = dropped;
    return fit;
}

std::string significance_stars(double p) {
    if (!(p < 0.05)) return "";
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    return "*";
}

std::string coefficient_table(const std::vector<std::pair<std::string, PanelFit>>& fits) {
    const std::vector<std::string> order = {"price", "volatility", "duration", "volume"};
    constexpr int width = 14;
    std::ostringstream out;
    out << std::left << std::setw(12) << "";
    for (const auto& [label, fit] : fits) out << std::right << std::setw(width) << label;
    out << '\n';
    for (const auto& name : order) {
        std::ostringstream est, err;
        est << std::left << std::setw(12) << name;
        err << std::left << std::setw(12) << "";
        bool present = false;
        for (const auto& [label, fit] : fits) {
            const auto it = std::find(fit.names.begin(), fit.names.end(), name);
            if (it == fit.names.end()) {
                est << std::right << std::setw(width) << "";
                err << std::right << std::setw(width) << "";
                continue;
            }
            present = true;
            const auto k = static_cast<std::size_t>(it - fit.names.begin());
            est << std::right << std::setw(width)
                << fixed(fit.beta(static_cast<Eigen::Index>(k)), 4) + significance_stars(fit.p_value(k));
            err << std::right << std::setw(width) << "(" + fixed(fit.se(static_cast<Eigen::Index>(k)), 4) + ")";
        }
        if (present) out << est.str() << '\n' << err.str() << '\n';
    }
    out << std::left << std::setw(12) << "N";
    for (const auto& [label, fit] : fits) out << std::right << std::setw(width) << fit.n;
    out << '\n';
    out << "Stars: * p < 0.05, ** p < 0.01, *** p < 0.001 (two-way clustered standard errors).\n";
    return out.str();
}

nlohmann::ordered_json to_json(const PanelFit& fit) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json coefficients = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < fit.names.size(); ++k) {
        const auto idx = static_cast<Eigen::Index>(k);
        nlohmann::ordered_json c;
        c["name"] = fit.names[k];
        c["estimate"] = fit.beta(idx);
        c["se"] = std::isfinite(fit.se(idx)) ? nlohmann::ordered_json(fit.se(idx)) : nlohmann::ordered_json(nullptr);
        const double p = fit.p_value(k);
        c["p_value"] = std::isfinite(p) ? nlohmann::ordered_json(p) : nlohmann::ordered_json(nullptr);
        c["stars"] = significance_stars(p);
        coefficients.push_back(std::move(c));
    }
    j["coefficients"] = std::move(coefficients);
    j["n"] = fit.n;
    j["stocks"] = fit.stocks.size();
    j["days"] = fit.days.size();
    j["dropped_zero_rk"] = fit.dropped_zero_rk;
    return j;
}

std::string univariate_fits_csv(const std::vector<DailyRow>& panel, const PanelSpec& spec) {
    std::string out = "covariate,stock,day,x,pc,fitted\n";
    std::vector<const DailyRow*> rows;
    for (const auto& r : panel) {
        if (r.rk_vol > 0.0) rows.push_back(&r);
    }
    std::vector<std::string> stock_keys;
    for (const auto* r : rows) stock_keys.push_back(r->stock);
    std::vector<std::string> stocks;
    const auto stock_ids = label_ids(stock_keys, stocks);
    const std::vector<int> no_days(rows.size(), 0);
    PanelSpec stock_only = spec;
    stock_only.day_effects = false;
    const auto n = static_cast<Eigen::Index>(rows.size());
    for (const std::string name : {"price", "volatility", "duration", "volume"}) {
        Eigen::MatrixXd x(n, 1);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, 0) = covariate(*rows[static_cast<std::size_t>(i)], name, spec);
            y(i) = spec.pc_scale * rows[static_cast<std::size_t>(i)]->pc;
        }
        // Single-stock panels cannot separate a stock effect from the slope; skip them.
        if (stocks.size() < 2) break;
        const PanelFit fit = fe_regression(x, y, stock_ids, no_days, {name}, stock_only);
        for (Eigen::Index i = 0; i < n; ++i) {
            const DailyRow& r = *rows[static_cast<std::size_t>(i)];
            const double fitted = fit.fe_stock(stock_ids[static_cast<std::size_t>(i)]) + fit.beta(0) * x(i, 0);
            out += name + ',' + csv_field(r.stock) + ',' + std::to_string(r.day) + ',' + format_double(x(i, 0)) + ',' +
                   format_double(y(i)) + ',' + format_double(fitted) + '\n';
        }
    }
    return out;
}

std::vector<DigitRow> digit_breakdown(const TickSeries& ts, const FilterPath* path) {
    if (path && path->size() != ts.size()) throw DomainError("filtered path does not match the series");
    std::vector<DigitRow> rows(10);
    for (int d = 0; d < 10; ++d) rows[static_cast<std::size_t>(d)].digit = d;
    for (std::size_t t = 0; t < ts.size(); ++t) {
        if (ts.segment_start(t)) continue;
        DigitRow& row = rows[static_cast<std::size_t>(ts.price[t] % 10)];
        ++row.count;
        row.mean_price += static_cast<double>(ts.price[t]);
        row.mean_duration += ts.duration[t];
        row.mean_volume += ts.volume[t];
        if (path) row.mean_variance += path->mu[t] * std::exp(-path->alpha[t]);
    }
    for (auto& row : rows) {
        const double c = static_cast<double>(row.count);
        row.mean_price = row.count ? row.mean_price / c : kNaN;
        row.mean_duration = row.count ? row.mean_duration / c : kNaN;
        row.mean_volume = row.count ? row.mean_volume / c : kNaN;
        row.mean_variance = path && row.count ? row.mean_variance / c : kNaN;
    }
    return rows;
}

std::string digit_csv(const std::vector<DigitRow>& rows) {
    std::string out = "digit,count,mean_price,mean_variance,mean_duration,mean_volume\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    for (const auto& r : rows) {
        out += std::to_string(r.digit) + ',' + std::to_string(r.count) + ',' + cell(r.mean_price) + ',' +
               cell(r.mean_variance) + ',' + cell(r.mean_duration) + ',' + cell(r.mean_volume) + '\n';
    }
    return out;
}

DescriptiveRow descriptive_stats(const std::string& stock, const TickSeries& ts, std::int64_t tick_scale) {
    if (ts.size() == 0) throw DomainError("descriptive statistics need at least one trade");
    DescriptiveRow row;
    row.stock = stock;
    row.trades = ts.size();
    auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = kNaN;
        sd = kNaN;
        if (v.empty()) return;
        mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        if (v.size() < 2) return;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    std::vector<double> prices;
    std::vector<double> durations;
    for (std::size_t t = 0; t < ts.size(); ++t) {
        prices.push_back(static_cast<double>(ts.price[t]) / static_cast<double>(tick_scale));
        if (!ts.segment_start(t)) durations.push_back(ts.duration[t]);
    }
    mean_sd(prices, row.mean_price, row.sd_price);
    mean_sd(durations, row.mean_duration, row.sd_duration);
    row.pc_pct = 100.0 * price_clustering_measure(ts.price);
    return row;
}

std::string descriptive_csv(const std::vector<DescriptiveRow>& rows) {
    std::ostringstream out;
    out << "stock,trades,mean_price,sd_price,mean_duration,sd_duration,pc_pct\n";
    for (const auto& r : rows) {
        out << csv_field(r.stock) << ',' << r.trades << ',' << fixed(r.mean_price, 2) << ',' << fixed(r.sd_price, 2) << ','
            << fixed(r.mean_duration, 2) << ',' << fixed(r.sd_duration, 2) << ',' << fixed(r.pc_pct, 2) << '\n';
    }
    return out.str();
}

} // namespace pclust
