#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace slicesim {

/// Shortest decimal form that round-trips to the same double.
[[nodiscard]] std::string format_double(double value);

/// RFC-4180 rows with LF line endings. Fields containing a comma, quote,
/// CR or LF are quoted, with embedded quotes doubled.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(&os) {}

    CsvWriter& field(std::string_view value);
    CsvWriter& field(double value) { return field(format_double(value)); }
    CsvWriter& field(long long value) { return field(std::to_string(value)); }
    CsvWriter& field(unsigned long long value) { return field(std::to_string(value)); }
    CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
    CsvWriter& field(std::size_t value) { return field(static_cast<unsigned long long>(value)); }
    void end_row();

    void row(const std::vector<std::string>& fields);

private:
    std::ostream* os_;
    bool row_started_ = false;
};

/// Splits one CSV record (no embedded newlines) into fields, honouring
/// RFC-4180 quoting.
[[nodiscard]] std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace slicesim
