#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace omqd {

/// Shortest representation that round-trips the exact double (to_chars).
std::string format_double(double value);

/// Minimal CSV writer: UTF-8, '.' decimal separator, mandatory header,
/// deterministic byte output.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace omqd
