#include "slicesim/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "slicesim/error.hpp"

namespace slicesim {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw NumericError("cannot format double");
    return std::string(buf, end);
}

CsvWriter& CsvWriter::field(std::string_view value) {
    if (row_started_) *os_ << ',';
    row_started_ = true;
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
        *os_ << value;
        return *this;
    }
    *os_ << '"';
    for (char c : value) {
        if (c == '"') *os_ << '"';
        *os_ << c;
    }
    *os_ << '"';
    return *this;
}

void CsvWriter::end_row() {
    *os_ << '\n';
    row_started_ = false;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (const auto& f : fields) field(std::string_view(f));
    end_row();
}

std::vector<std::string> parse_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ValidationError("unterminated quoted CSV field");
    out.push_back(std::move(cur));
    return out;
}

}  // namespace slicesim
