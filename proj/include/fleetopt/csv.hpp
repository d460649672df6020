#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fleetopt {

/// Shortest decimal form that round-trips the exact double value.
std::string format_double(double v);

std::string format_int(std::int64_t v);

/// Minimal CSV support: comma separation, no quoting (all values written by
/// this tool are numeric or plain identifiers).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    int column(const std::string& name) const; // -1 when absent
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace fleetopt
