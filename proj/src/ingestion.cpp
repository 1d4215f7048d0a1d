#include "pclust/ingestion.hpp"

#include "pclust/errors.hpp"
#include "pclust/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace pclust {

namespace {

using Wide = __int128;

Wide pow10(int exponent) {
    Wide out = 1;
    for (int i = 0; i < exponent; ++i) out *= 10;
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::int64_t to_int(std::string_view s, std::string_view what) {
    std::int64_t value = 0;
    const auto* end = s.data() + s.size();
    const auto result = std::from_chars(s.data(), end, value);
    if (s.empty() || result.ec != std::errc{} || result.ptr != end) {
        throw FormatError("invalid " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

bool valid_date(std::int32_t year, std::int32_t month, std::int32_t day) {
    return year >= 1900 && year <= 9999 && month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

// HH:MM:SS[.fffffffff]
std::int64_t parse_clock(std::string_view s) {
    if (s.size() < 8 || s[2] != ':' || s[5] != ':') throw FormatError("invalid time '" + std::string(s) + "'");
    const auto hh = to_int(s.substr(0, 2), "hour");
    const auto mm = to_int(s.substr(3, 2), "minute");
    const auto ss = to_int(s.substr(6, 2), "second");
    if (hh > 23 || mm > 59 || ss > 60) throw FormatError("time out of range '" + std::string(s) + "'");
    std::int64_t frac = 0;
    if (s.size() > 8) {
        if (s[8] != '.' || s.size() == 9 || s.size() > 18 || !all_digits(s.substr(9))) {
            throw FormatError("invalid fractional seconds in '" + std::string(s) + "'");
        }
        const auto digits = s.substr(9);
        frac = to_int(digits, "fraction") * static_cast<std::int64_t>(pow10(9 - static_cast<int>(digits.size())));
    }
    return ((hh * 60 + mm) * 60 + ss) * kNanosPerSecond + frac;
}

std::string format_date(std::int32_t date) {
    std::ostringstream out;
    out << date;
    return out.str();
}

std::string format_nanos(std::int64_t ns) {
    std::string frac = std::to_string(ns % kNanosPerSecond);
    frac.insert(0, 9 - frac.size(), '0');
    return std::to_string(ns / kNanosPerSecond) + "." + frac;
}

struct Columns {
    std::ptrdiff_t timestamp = -1, date = -1, price = -1, size = -1, exchange = -1, condition = -1, correction = -1,
                   suffix = -1;
};

} // namespace

Decimal parse_decimal(std::string_view text) {
    std::string_view s = trim(text);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (dot != std::string_view::npos && !frac.empty() && !all_digits(frac)) ||
        (dot != std::string_view::npos && frac.empty() && whole.empty())) {
        throw FormatError("invalid decimal '" + std::string(text) + "'");
    }
    if (whole.size() + frac.size() > 18) throw FormatError("too many digits in '" + std::string(text) + "'");
    std::string digits(whole);
    digits += frac;
    return {digits.empty() ? 0 : to_int(digits, "decimal"), static_cast<int>(frac.size())};
}

int compare(const Decimal& a, const Decimal& b) {
    const int scale = std::max(a.scale, b.scale);
    const Wide x = static_cast<Wide>(a.mantissa) * pow10(scale - a.scale);
    const Wide y = static_cast<Wide>(b.mantissa) * pow10(scale - b.scale);
    return x < y ? -1 : (x > y ? 1 : 0);
}

double to_double(const Decimal& d) { return static_cast<double>(d.mantissa) / static_cast<double>(pow10(d.scale)); }

std::int64_t to_ticks(const Decimal& d, std::int64_t tick_scale) {
    if (tick_scale < 1) throw DomainError("tick scale must be positive");
    const Wide numerator = static_cast<Wide>(d.mantissa) * tick_scale;
    const Wide denominator = pow10(d.scale);
    if (numerator % denominator != 0) {
        throw PrecisionError("price with " + std::to_string(d.scale) + " decimals is not a whole number of ticks at scale " +
                             std::to_string(tick_scale));
    }
    const Wide ticks = numerator / denominator;
    if (ticks > std::numeric_limits<std::int64_t>::max()) throw PrecisionError("price overflows the tick range");
    return static_cast<std::int64_t>(ticks);
}

std::int32_t parse_date(std::string_view text) {
    const auto s = trim(text);
    std::int64_t year = 0, month = 0, day = 0;
    if (s.size() == 8 && all_digits(s)) {
        year = to_int(s.substr(0, 4), "year");
        month = to_int(s.substr(4, 2), "month");
        day = to_int(s.substr(6, 2), "day");
    } else if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        year = to_int(s.substr(0, 4), "year");
        month = to_int(s.substr(5, 2), "month");
        day = to_int(s.substr(8, 2), "day");
    } else {
        throw FormatError("invalid date '" + std::string(text) + "'");
    }
    if (!valid_date(static_cast<std::int32_t>(year), static_cast<std::int32_t>(month), static_cast<std::int32_t>(day))) {
        throw FormatError("date out of range '" + std::string(text) + "'");
    }
    return static_cast<std::int32_t>(year * 10000 + month * 100 + day);
}

std::pair<std::int32_t, std::int64_t> parse_timestamp(std::string_view text, TimestampFormat format) {
    std::string_view s = trim(text);
    if (format == TimestampFormat::Auto) {
        format = s.find_first_of("-:") == std::string_view::npos ? TimestampFormat::Taq : TimestampFormat::Iso;
    }
    if (format == TimestampFormat::Taq) {
        if (s.size() < 6 || s.size() > 15 || !all_digits(s)) throw FormatError("invalid TAQ time '" + std::string(text) + "'");
        const auto hh = to_int(s.substr(0, 2), "hour");
        const auto mm = to_int(s.substr(2, 2), "minute");
        const auto ss = to_int(s.substr(4, 2), "second");
        if (hh > 23 || mm > 59 || ss > 60) throw FormatError("time out of range '" + std::string(text) + "'");
        const auto frac_digits = s.substr(6);
        const std::int64_t frac =
            frac_digits.empty()
                ? 0
                : to_int(frac_digits, "fraction") * static_cast<std::int64_t>(pow10(9 - static_cast<int>(frac_digits.size())));
        return {0, ((hh * 60 + mm) * 60 + ss) * kNanosPerSecond + frac};
    }
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
    if (s.size() >= 3 && s[2] == ':') return {0, parse_clock(s)};
    if (s.size() < 19 || (s[10] != 'T' && s[10] != ' ')) throw FormatError("invalid timestamp '" + std::string(text) + "'");
    return {parse_date(s.substr(0, 10)), parse_clock(s.substr(11))};
}

ParseResult parse_trades(std::istream& in, const FormatSpec& format) {
    ParseResult result;
    CsvReader reader(in, format.delimiter);
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!reader.next(fields, line)) return result;
    if (!fields.empty() && fields.front().starts_with("\xEF\xBB\xBF")) fields.front().erase(0, 3);

    Columns col;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = trim(fields[i]);
        const auto idx = static_cast<std::ptrdiff_t>(i);
        if (name == format.timestamp_column) col.timestamp = idx;
        if (name == format.date_column) col.date = idx;
        if (name == format.price_column) col.price = idx;
        if (name == format.size_column) col.size = idx;
        if (name == format.exchange_column) col.exchange = idx;
        if (name == format.condition_column) col.condition = idx;
        if (name == format.correction_column) col.correction = idx;
        if (name == format.suffix_column) col.suffix = idx;
    }
    for (const auto& [index, name] : {std::pair{col.timestamp, format.timestamp_column}, {col.price, format.price_column},
                                      {col.size, format.size_column}, {col.exchange, format.exchange_column}}) {
        if (index < 0) throw FormatError("missing required column '" + name + "'");
    }
    const std::size_t width = fields.size();

    std::size_t records = 0;
    while (reader.next(fields, line)) {
        if (fields.size() == 1 && trim(fields.front()).empty()) continue;
        ++records;
        try {
            if (fields.size() != width) {
                throw FormatError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
            }
            auto field = [&](std::ptrdiff_t idx) -> std::string_view {
                return idx < 0 ? std::string_view{} : std::string_view(fields[static_cast<std::size_t>(idx)]);
            };
            RawTrade t;
            t.line = line;
            t.timestamp = std::string(trim(field(col.timestamp)));
            const auto [date, ns] = parse_timestamp(t.timestamp, format.timestamp_format);
            t.time_ns = ns;
            t.date = date;
            if (t.date == 0 && col.date >= 0 && !trim(field(col.date)).empty()) t.date = parse_date(field(col.date));
            if (t.date == 0 && format.default_date) t.date = *format.default_date;
            if (t.date == 0) throw FormatError("no trade date");
            t.price_text = std::string(trim(field(col.price)));
            if (t.price_text.empty()) throw FormatError("empty price");
            t.price = parse_decimal(t.price_text);
            t.volume = to_int(trim(field(col.size)), "size");
            if (t.volume <= 0) throw FormatError("size must be positive");
            t.exchange = std::string(trim(field(col.exchange)));
            t.condition = std::string(field(col.condition));
            const auto correction = trim(field(col.correction));
            t.correction = correction.empty() ? 0 : static_cast<std::int32_t>(to_int(correction, "correction"));
            t.suffix = std::string(trim(field(col.suffix)));
            result.trades.push_back(std::move(t));
        } catch (const FormatError& e) {
            result.malformed.push_back({line, e.what()});
        }
    }
    if (records > 0 &&
        static_cast<double>(result.malformed.size()) > format.max_malformed_fraction * static_cast<double>(records)) {
        std::ostringstream msg;
        msg << result.malformed.size() << " of " << records << " rows are malformed; first at line "
            << result.malformed.front().line << ": " << result.malformed.front().reason;
        throw FormatError(msg.str());
    }
    return result;
}

nlohmann::ordered_json to_json(const CleaningReport& r) {
    nlohmann::ordered_json j;
    j["input"] = r.input;
    j["dropped"] = {{"suffix", r.suffix},
                    {"hours", r.hours},
                    {"zero_price", r.zero_price},
                    {"off_exchange", r.off_exchange},
                    {"corrected", r.corrected},
                    {"abnormal_condition", r.abnormal_condition},
                    {"outlier", r.outlier},
                    {"duplicate", r.duplicate}};
    j["retained"] = r.retained;
    return j;
}

std::vector<bool> rolling_median_outliers(const std::vector<double>& prices, const CleanConfig& config) {
    const std::size_t n = prices.size();
    const std::size_t half = config.median_window / 2;
    std::vector<bool> flagged(n, false);
    std::vector<double> window;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        window.clear();
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j != i) window.push_back(prices[j]);
        }
        if (window.size() < config.min_neighbours || window.empty()) continue;
        std::sort(window.begin(), window.end());
        const std::size_t m = window.size();
        const double median = m % 2 == 1 ? window[m / 2] : 0.5 * (window[m / 2 - 1] + window[m / 2]);
        double mad = 0.0;
        for (double p : window) mad += std::abs(p - median);
        mad /= static_cast<double>(m);
        flagged[i] = std::abs(prices[i] - median) > config.mad_k * mad;
    }
    return flagged;
}

CleanResult clean(std::vector<RawTrade> trades, const CleanConfig& config) {
    CleanResult out;
    CleaningReport& report = out.report;
    report.input = trades.size();
    std::stable_sort(trades.begin(), trades.end(), [](const RawTrade& a, const RawTrade& b) {
        return a.date != b.date ? a.date < b.date : a.time_ns < b.time_ns;
    });

    auto keep_if = [&](auto&& keep, std::size_t& counter) {
        const auto it = std::stable_partition(trades.begin(), trades.end(), keep);
        counter += static_cast<std::size_t>(trades.end() - it);
        trades.erase(it, trades.end());
    };
    keep_if([](const RawTrade& t) { return t.suffix.empty(); }, report.suffix);
    keep_if([&](const RawTrade& t) { return t.time_ns >= config.open_ns && t.time_ns <= config.close_ns; }, report.hours);
    keep_if([](const RawTrade& t) { return t.price.mantissa != 0; }, report.zero_price);
    keep_if([&](const RawTrade& t) { return config.primary_exchange.empty() || t.exchange == config.primary_exchange; },
            report.off_exchange);
    keep_if([](const RawTrade& t) { return t.correction == 0; }, report.corrected);
    keep_if(
        [&](const RawTrade& t) {
            return std::all_of(t.condition.begin(), t.condition.end(), [&](char c) {
                return c == ' ' || config.retained_conditions.find(c) != std::string::npos;
            });
        },
        report.abnormal_condition);

    std::vector<RawTrade> kept;
    kept.reserve(trades.size());
    for (std::size_t begin = 0; begin < trades.size();) {
        std::size_t end = begin;
        while (end < trades.size() && trades[end].date == trades[begin].date) ++end;
        std::vector<double> prices;
        for (std::size_t i = begin; i < end; ++i) prices.push_back(to_double(trades[i].price));
        const auto flagged = rolling_median_outliers(prices, config);
        for (std::size_t i = begin; i < end; ++i) {
            if (flagged[i - begin]) {
                ++report.outlier;
            } else {
                kept.push_back(std::move(trades[i]));
            }
        }
        begin = end;
    }

    for (std::size_t begin = 0; begin < kept.size();) {
        std::size_t end = begin;
        while (end < kept.size() && kept[end].date == kept[begin].date && kept[end].time_ns == kept[begin].time_ns) ++end;
        // Modal price; ties go to the lowest price, then the first entry carrying it.
        std::size_t chosen = begin;
        std::size_t chosen_count = 0;
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t count = 0;
            for (std::size_t j = begin; j < end; ++j) count += compare(kept[i].price, kept[j].price) == 0 ? 1 : 0;
            if (count > chosen_count || (count == chosen_count && compare(kept[i].price, kept[chosen].price) < 0)) {
                chosen = i;
                chosen_count = count;
            }
        }
        report.duplicate += end - begin - 1;
        out.trades.push_back(std::move(kept[chosen]));
        begin = end;
    }
    report.retained = out.trades.size();
    return out;
}

TickSeries to_tick_series(const std::vector<RawTrade>& trades, std::int64_t tick_scale) {
    TickSeries ts;
    const std::size_t n = trades.size();
    ts.day.reserve(n);
    ts.time.reserve(n);
    ts.price.reserve(n);
    ts.duration.reserve(n);
    ts.volume.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RawTrade& t = trades[i];
        ts.day.push_back(t.date);
        ts.time.push_back(static_cast<double>(t.time_ns) / static_cast<double>(kNanosPerSecond));
        ts.price.push_back(to_ticks(t.price, tick_scale));
        ts.volume.push_back(static_cast<double>(t.volume));
        if (i == 0 || trades[i - 1].date != t.date) {
            ts.duration.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            ts.duration.push_back(static_cast<double>(t.time_ns - trades[i - 1].time_ns) /
                                  static_cast<double>(kNanosPerSecond));
        }
    }
    return ts;
}

std::string format_ticks(std::int64_t ticks, std::int64_t tick_scale) {
    int places = 0;
    for (std::int64_t s = tick_scale; s > 1; s /= 10) {
        if (s % 10 != 0) throw DomainError("tick scale must be a power of ten to format decimals");
        ++places;
    }
    const bool negative = ticks < 0;
    const std::uint64_t magnitude = negative ? 0 - static_cast<std::uint64_t>(ticks) : static_cast<std::uint64_t>(ticks);
    std::string digits = std::to_string(magnitude);
    if (places > 0) {
        if (digits.size() <= static_cast<std::size_t>(places)) digits.insert(0, places + 1 - digits.size(), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    }
    return negative ? "-" + digits : digits;
}

std::string cleaned_csv(const std::vector<RawTrade>& trades, std::int64_t tick_scale, char delimiter) {
    std::string out;
    const std::string d(1, delimiter);
    out += "date" + d + "timestamp" + d + "price" + d + "size" + d + "exchange" + d + "condition" + d + "correction" + d +
           "suffix" + d + "ticks" + d + "duration\n";
    for (std::size_t i = 0; i < trades.size(); ++i) {
        const RawTrade& t = trades[i];
        out += format_date(t.date) + d + csv_field(t.timestamp, delimiter) + d + csv_field(t.price_text, delimiter) + d +
               std::to_string(t.volume) + d + csv_field(t.exchange, delimiter) + d + csv_field(t.condition, delimiter) +
               d + std::to_string(t.correction) + d + csv_field(t.suffix, delimiter) + d +
               std::to_string(to_ticks(t.price, tick_scale)) + d;
        if (i > 0 && trades[i - 1].date == t.date) out += format_nanos(t.time_ns - trades[i - 1].time_ns);
        out += '\n';
    }
    return out;
}

std::string tick_series_csv(const TickSeries& ts) {
    std::string out = "day,time,ticks,duration,volume\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += std::to_string(ts.day[i]) + ',' + format_double(ts.time[i]) + ',' + std::to_string(ts.price[i]) + ',';
        if (!ts.segment_start(i)) out += format_double(ts.duration[i]);
        out += ',' + format_double(ts.volume[i]) + '\n';
    }
    return out;
}

TickSeries read_tick_series(std::istream& in, std::int64_t tick_scale) {
    const std::string text(std::istreambuf_iterator<char>(in), {});
    std::istringstream header_stream(text);
    CsvReader reader(header_stream);
    std::vector<std::string> header;
    std::size_t line = 0;
    if (!reader.next(header, line)) return {};
    auto column = [&](std::string_view name) -> std::ptrdiff_t {
        const auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; });
        return it == header.end() ? -1 : it - header.begin();
    };
    if (column("timestamp") >= 0 && column("ticks") >= 0) {
        std::istringstream body(text);
        FormatSpec format;
        format.max_malformed_fraction = 0.0;
        return to_tick_series(parse_trades(body, format).trades, tick_scale);
    }
    const std::ptrdiff_t day = column("day"), time = column("time"), ticks = column("ticks"), duration = column("duration"),
                         volume = column("volume");
    if (day < 0 || time < 0 || ticks < 0 || volume < 0) {
        throw FormatError("tick file needs day, time, ticks and volume columns");
    }
    TickSeries ts;
    std::vector<std::string> fields;
    while (reader.next(fields, line)) {
        if (fields.size() == 1 && fields.front().empty()) continue;
        if (fields.size() != header.size()) throw FormatError("line " + std::to_string(line) + " has a wrong field count");
        auto get = [&](std::ptrdiff_t idx) { return std::string(trim(fields[static_cast<std::size_t>(idx)])); };
        try {
            ts.day.push_back(static_cast<std::int32_t>(to_int(get(day), "day")));
            ts.time.push_back(std::stod(get(time)));
            ts.price.push_back(to_int(get(ticks), "ticks"));
            ts.volume.push_back(std::stod(get(volume)));
            const bool first = ts.size() == 1 || ts.day[ts.size() - 1] != ts.day[ts.size() - 2];
            if (first) {
                ts.duration.push_back(std::numeric_limits<double>::quiet_NaN());
            } else if (duration >= 0 && !get(duration).empty()) {
                ts.duration.push_back(std::stod(get(duration)));
            } else {
                ts.duration.push_back(ts.time.back() - ts.time[ts.size() - 2]);
            }
        } catch (const std::logic_error&) {
            throw FormatError("line " + std::to_string(line) + " has a non-numeric field");
        }
    }
    validate(ts);
    return ts;
}

} // namespace pclust
