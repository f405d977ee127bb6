#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lcn/dominance.hpp"

namespace lcn::csv {

/// One parsed data row plus the 1-based line it came from.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Splits on commas, trims blanks, skips empty lines and lines starting with '#'.
/// With `skip_header` the first non-empty line is dropped.
std::vector<Row> read_rows(std::istream& in, bool skip_header = false);

double parse_double(std::string_view field, const std::string& source, std::size_t line);
long long parse_int(std::string_view field, const std::string& source, std::size_t line);

/// Point sets: one vector per row, every row the same width.
std::vector<ObjectiveVector> read_points(std::istream& in, const std::string& source,
                                         bool header = false);
std::vector<ObjectiveVector> read_points(const std::filesystem::path& path, bool header = false);

void write_points(std::ostream& out, const std::vector<ObjectiveVector>& points);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

/// "1,2.5,-3" -> {1, 2.5, -3}.
ObjectiveVector parse_vector(std::string_view text);

}  // namespace lcn::csv
