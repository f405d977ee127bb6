#include "lcn/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "lcn/errors.hpp"

namespace lcn::csv {

namespace {

std::string_view trim(std::string_view s) {
    const auto blank = " \t\r\n";
    const auto b = s.find_first_not_of(blank);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(blank);
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Row> read_rows(std::istream& in, bool skip_header) {
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_pending = skip_header;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        Row row{lineno, {}};
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            row.fields.emplace_back(trim(body.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double parse_double(std::string_view field, const std::string& source, std::size_t line) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty() || !std::isfinite(value)) {
        throw ParseError(source, line, "expected a finite number, got '" + std::string(field) + "'");
    }
    return value;
}

long long parse_int(std::string_view field, const std::string& source, std::size_t line) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(source, line, "expected an integer, got '" + std::string(field) + "'");
    }
    return value;
}

std::vector<ObjectiveVector> read_points(std::istream& in, const std::string& source, bool header) {
    std::vector<ObjectiveVector> points;
    std::size_t width = 0;
    for (const auto& row : read_rows(in, header)) {
        if (width == 0) width = row.fields.size();
        if (row.fields.size() != width) {
            throw ParseError(source, row.line,
                             "expected " + std::to_string(width) + " columns, got " +
                                 std::to_string(row.fields.size()));
        }
        ObjectiveVector p;
        p.reserve(width);
        for (const auto& f : row.fields) p.push_back(parse_double(f, source, row.line));
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<ObjectiveVector> read_points(const std::filesystem::path& path, bool header) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    return read_points(in, path.string(), header);
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

void write_points(std::ostream& out, const std::vector<ObjectiveVector>& points) {
    for (const auto& p : points) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out << ',';
            out << format_double(p[j]);
        }
        out << '\n';
    }
}

ObjectiveVector parse_vector(std::string_view text) {
    ObjectiveVector out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parse_double(trim(text.substr(start, comma - start)), "vector", 0));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace lcn::csv
