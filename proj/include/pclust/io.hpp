#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace pclust {

/// Delimited-text record reader: quoted fields with doubled quotes, embedded
/// delimiters and newlines inside quotes, LF or CRLF record ends.
class CsvReader {
public:
    explicit CsvReader(std::istream& in, char delimiter = ',') : in_(in), delimiter_(delimiter) {}

    /// Reads the next record. `line` receives the 1-based line the record starts on.
    bool next(std::vector<std::string>& fields, std::size_t& line);

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 1;
};

/// Quotes a field when it holds the delimiter, a quote, or a line break.
[[nodiscard]] std::string csv_field(std::string_view value, char delimiter = ',');

/// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view data);
[[nodiscard]] std::string hex64(std::uint64_t value);

/// Shortest text that reads back to the same double.
[[nodiscard]] std::string format_double(double value);

} // namespace pclust
