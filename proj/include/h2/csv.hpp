#pragma once
#include <string>
#include <vector>

namespace h2::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 when absent
};

// Reads a comma-separated file. First line is the header. Empty lines are
// skipped. No quoting support; none of our formats need it.
Table read_file(const std::string& path);

// Parses a cell as double/int, raising InputError that names file, line and
// column on failure.
double parse_double(const std::string& cell, const std::string& file, int line, const std::string& col);
long long parse_int(const std::string& cell, const std::string& file, int line, const std::string& col);

// Writes `content` to `path` atomically (temp file in the same directory,
// then rename over the target).
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace h2::csv
