#pragma once

#include "pclust/dynamics.hpp"

#include <json.hpp>

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pclust {

/// Exact decimal: value = mantissa / 10^scale.
struct Decimal {
    std::int64_t mantissa = 0;
    int scale = 0;
};

/// Parses "123", "123.45", "+0.5". Throws FormatError on anything else,
/// including signs other than '+' and more than 18 significant digits.
[[nodiscard]] Decimal parse_decimal(std::string_view text);
/// -1, 0, 1 as a is below, equal to, above b.
[[nodiscard]] int compare(const Decimal& a, const Decimal& b);
[[nodiscard]] double to_double(const Decimal& d);
/// Integer ticks at `tick_scale` ticks per unit; PrecisionError unless exact.
[[nodiscard]] std::int64_t to_ticks(const Decimal& d, std::int64_t tick_scale = 100);

inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

enum class TimestampFormat { Auto, Iso, Taq };

struct RawTrade {
    std::int32_t date = 0;     // yyyymmdd
    std::int64_t time_ns = 0;  // nanoseconds after midnight
    std::string timestamp;     // as read
    Decimal price;
    std::string price_text;    // as read
    std::int64_t volume = 0;
    std::string exchange;
    std::string condition;
    std::int32_t correction = 0;
    std::string suffix;
    std::size_t line = 0;
};

struct FormatSpec {
    char delimiter = ',';
    TimestampFormat timestamp_format = TimestampFormat::Auto;
    std::string timestamp_column = "timestamp";
    std::string date_column = "date";  // used when timestamps carry no date
    std::string price_column = "price";
    std::string size_column = "size";
    std::string exchange_column = "exchange";
    std::string condition_column = "condition";
    std::string correction_column = "correction";
    std::string suffix_column = "suffix";
    std::optional<std::int32_t> default_date;  // yyyymmdd when neither timestamp nor column has one
    double max_malformed_fraction = 0.05;
};

struct MalformedRow {
    std::size_t line = 0;
    std::string reason;
};

struct ParseResult {
    std::vector<RawTrade> trades;
    std::vector<MalformedRow> malformed;
};

/// Reads a header plus records. Missing timestamp/price/size/exchange columns
/// or too many malformed rows raise FormatError; an empty stream yields nothing.
[[nodiscard]] ParseResult parse_trades(std::istream& in, const FormatSpec& format = {});

/// Parses an ISO-8601 date-time or a TAQ HHMMSS[fraction] time.
/// Returns {date or 0, nanoseconds after midnight}; throws FormatError.
[[nodiscard]] std::pair<std::int32_t, std::int64_t> parse_timestamp(std::string_view text, TimestampFormat format);
/// Accepts yyyymmdd or yyyy-mm-dd.
[[nodiscard]] std::int32_t parse_date(std::string_view text);

struct CleanConfig {
    std::string primary_exchange;  // empty keeps every exchange
    std::int64_t open_ns = (9 * 3600 + 30 * 60) * kNanosPerSecond;
    std::int64_t close_ns = 16 * 3600 * kNanosPerSecond;
    std::string retained_conditions = "@EF";  // blanks are always retained
    double mad_k = 10.0;
    std::size_t median_window = 50;  // neighbours, split evenly before and after
    std::size_t min_neighbours = 10;
};

struct CleaningReport {
    std::size_t input = 0;
    std::size_t suffix = 0;
    std::size_t hours = 0;
    std::size_t zero_price = 0;
    std::size_t off_exchange = 0;
    std::size_t corrected = 0;
    std::size_t abnormal_condition = 0;
    std::size_t outlier = 0;
    std::size_t duplicate = 0;
    std::size_t retained = 0;

    [[nodiscard]] std::size_t dropped() const {
        return suffix + hours + zero_price + off_exchange + corrected + abnormal_condition + outlier + duplicate;
    }
};

[[nodiscard]] nlohmann::ordered_json to_json(const CleaningReport& report);

struct CleanResult {
    std::vector<RawTrade> trades;
    CleaningReport report;
};

/// Applies, in order: suffix pre-step, trading hours, zero price, primary
/// exchange, corrections, sale conditions, rolling-median outliers (per day),
/// and the modal-price collapse of same-timestamp trades.
[[nodiscard]] CleanResult clean(std::vector<RawTrade> trades, const CleanConfig& config = {});

/// Flags of rule (vi) for one day's prices: true marks an outlier.
[[nodiscard]] std::vector<bool> rolling_median_outliers(const std::vector<double>& prices, const CleanConfig& config);

/// Integer-tick series; durations are nanosecond gaps within a day.
[[nodiscard]] TickSeries to_tick_series(const std::vector<RawTrade>& trades, std::int64_t tick_scale = 100);

/// Cleaned trades in the input schema plus `ticks` and `duration` columns.
[[nodiscard]] std::string cleaned_csv(const std::vector<RawTrade>& trades, std::int64_t tick_scale = 100,
                                      char delimiter = ',');

/// Tick series as text: day, time, ticks, duration (blank at a day's first trade), volume.
[[nodiscard]] std::string tick_series_csv(const TickSeries& ts);

/// Reads either the tick-series layout above or a cleaned-trades file
/// (recognised by its timestamp and ticks columns).
[[nodiscard]] TickSeries read_tick_series(std::istream& in, std::int64_t tick_scale = 100);

/// Formats ticks as a decimal with as many places as the power of ten in tick_scale.
[[nodiscard]] std::string format_ticks(std::int64_t ticks, std::int64_t tick_scale = 100);

} // namespace pclust
