#pragma once

// Small CSV helpers for the result and manifest files. Comma-separated,
// dot decimal; lines starting with '#' are comments. Doubles are written
// with 17 significant digits so files round-trip exactly. The lenient
// number parser accepts a decimal comma inside quoted fields, which
// normalizes data transcribed from comma-decimal sources.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ledfit::csv {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Split one CSV line. Double quotes group fields; no escape handling
/// beyond doubled quotes is needed for our files.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(std::string field) {
    // normalize a decimal comma ("27,996") when no dot is present
    if (field.find('.') == std::string::npos) {
        const auto comma = field.find(',');
        if (comma != std::string::npos && field.find(',', comma + 1) == std::string::npos)
            field[comma] = '.';
    }
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::runtime_error("not a number: '" + field + "'");
    return value;
}

struct Table {
    std::vector<std::string> comments;  // '#' lines in file order
    std::vector<std::string> header;    // first non-comment row
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::runtime_error("missing CSV column '" + name + "'");
    }
};

inline Table read_table(std::istream& in) {
    Table t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line);
            continue;
        }
        auto fields = split_line(line);
        if (!header_seen) {
            t.header = std::move(fields);
            header_seen = true;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

inline Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_table(in);
}

}  // namespace ledfit::csv
