#pragma once

// IESNA LM-63 reader/writer covering the pragmatic subset needed for
// symmetric lens data: TILT=NONE, candela multiplier applied, photometric
// type and units read but not interpreted. A photometric file reduces to
// the 91-sample symmetric form (polar 0..90 at whole degrees) that the
// optimizers consume.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ledfit/model.hpp"

namespace ledfit {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line)
        : std::runtime_error("parse error at line " + std::to_string(line) + ": " + msg),
          line_number(line) {}
    int line_number;
};

struct ExtractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhotometricFile {
    std::vector<std::string> metadata;      // header lines up to and including TILT
    std::vector<double> c_plane_angles;     // horizontal angles, degrees
    std::vector<double> polar_angles;       // vertical angles, strictly increasing
    std::vector<std::vector<double>> candela_grid;  // [plane][polar]
};

namespace detail {

struct Token {
    std::string text;
    int line;
};

inline double parse_number(const Token& tok) {
    const char* begin = tok.text.data();
    const char* end = begin + tok.text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("malformed number '" + tok.text + "'", tok.line);
    return value;
}

}  // namespace detail

/// Parse an LM-63-style stream. Throws ParseError naming the offending line.
inline PhotometricFile parse_ies(std::istream& in) {
    PhotometricFile file;
    std::string line;
    int line_no = 0;
    bool tilt_seen = false;

    // Header: keyword lines up to the TILT line.
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        file.metadata.push_back(line);
        if (line.rfind("TILT=", 0) == 0) {
            if (line != "TILT=NONE")
                throw ParseError("unsupported TILT mode '" + line.substr(5) + "' (only TILT=NONE)", line_no);
            tilt_seen = true;
            break;
        }
    }
    if (!tilt_seen) throw ParseError("missing TILT line", line_no);

    // Numeric block: whitespace-separated tokens with line tracking.
    std::vector<detail::Token> tokens;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string word;
        while (ls >> word) tokens.push_back({word, line_no});
    }

    std::size_t pos = 0;
    auto next = [&](const char* what) -> const detail::Token& {
        if (pos >= tokens.size())
            throw ParseError(std::string("unexpected end of file, expected ") + what, line_no);
        return tokens[pos++];
    };
    auto next_number = [&](const char* what) { return detail::parse_number(next(what)); };

    next_number("lamp count");
    next_number("lumens per lamp");
    const double multiplier = next_number("candela multiplier");
    const double n_vert_d = next_number("vertical angle count");
    const double n_horiz_d = next_number("horizontal angle count");
    next_number("photometric type");
    next_number("units type");
    next_number("width");
    next_number("length");
    next_number("height");
    next_number("ballast factor");
    next_number("future use");
    next_number("input watts");

    if (n_vert_d < 1 || n_vert_d != std::floor(n_vert_d))
        throw ParseError("invalid vertical angle count", tokens[3].line);
    if (n_horiz_d < 1 || n_horiz_d != std::floor(n_horiz_d))
        throw ParseError("invalid horizontal angle count", tokens[4].line);
    const auto n_vert = static_cast<std::size_t>(n_vert_d);
    const auto n_horiz = static_cast<std::size_t>(n_horiz_d);

    file.polar_angles.reserve(n_vert);
    for (std::size_t i = 0; i < n_vert; ++i) {
        const double v = next_number("vertical angle");
        if (i > 0 && v <= file.polar_angles.back())
            throw ParseError("vertical angles not strictly increasing", tokens[pos - 1].line);
        file.polar_angles.push_back(v);
    }
    file.c_plane_angles.reserve(n_horiz);
    for (std::size_t i = 0; i < n_horiz; ++i)
        file.c_plane_angles.push_back(next_number("horizontal angle"));

    file.candela_grid.assign(n_horiz, {});
    for (std::size_t p = 0; p < n_horiz; ++p) {
        file.candela_grid[p].reserve(n_vert);
        for (std::size_t i = 0; i < n_vert; ++i) {
            const detail::Token& tok = next("candela value");
            const double v = detail::parse_number(tok) * multiplier;
            if (v < 0.0) throw ParseError("negative candela value", tok.line);
            file.candela_grid[p].push_back(v);
        }
    }
    if (pos != tokens.size())
        throw ParseError("trailing data after declared candela values", tokens[pos].line);
    return file;
}

inline PhotometricFile parse_ies(const std::string& text) {
    std::istringstream in(text);
    return parse_ies(in);
}

/// Reduce one C-plane to the 91-sample symmetric form (polar 0..90, whole
/// degrees). Angles above 90 are discarded; a missing whole degree is an error.
inline IntensitySamples extract_plane(const PhotometricFile& file, std::size_t plane_index) {
    if (plane_index >= file.candela_grid.size())
        throw ExtractError("plane index " + std::to_string(plane_index) + " out of range (file has " +
                           std::to_string(file.candela_grid.size()) + " planes)");
    IntensitySamples out;
    out.phi.reserve(91);
    out.candela.reserve(91);
    std::vector<int> missing;
    std::size_t cursor = 0;
    for (int deg = 0; deg <= 90; ++deg) {
        bool found = false;
        while (cursor < file.polar_angles.size() && file.polar_angles[cursor] < deg - 1e-9) ++cursor;
        if (cursor < file.polar_angles.size() && std::abs(file.polar_angles[cursor] - deg) <= 1e-9) {
            out.phi.push_back(deg);
            out.candela.push_back(file.candela_grid[plane_index][cursor]);
            found = true;
        }
        if (!found) missing.push_back(deg);
    }
    if (!missing.empty()) {
        std::string msg = "missing integer-degree polar samples:";
        for (int d : missing) msg += " " + std::to_string(d);
        throw ExtractError(msg);
    }
    for (double v : out.candela) out.i_max = std::max(out.i_max, v);
    return out;
}

/// Same reduction but averaging candela over all C-planes.
inline IntensitySamples extract_plane_mean(const PhotometricFile& file) {
    if (file.candela_grid.empty()) throw ExtractError("file has no C-planes");
    IntensitySamples acc = extract_plane(file, 0);
    for (std::size_t p = 1; p < file.candela_grid.size(); ++p) {
        const IntensitySamples s = extract_plane(file, p);
        for (std::size_t i = 0; i < acc.candela.size(); ++i) acc.candela[i] += s.candela[i];
    }
    const double planes = static_cast<double>(file.candela_grid.size());
    acc.i_max = 0.0;
    for (double& v : acc.candela) {
        v /= planes;
        acc.i_max = std::max(acc.i_max, v);
    }
    return acc;
}

struct WriteOptions {
    // Decimal places for candela values; negative means full precision
    // (round-trip exact). Whole-degree angles are written as integers.
    int candela_decimals = -1;
};

namespace detail {

inline std::string format_candela(double v, int decimals) {
    char buf[64];
    if (decimals < 0)
        std::snprintf(buf, sizeof buf, "%.17g", v);
    else
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace detail

/// Emit a minimal single-plane LM-63 file with polar angles 0..180 where
/// candela above 90 degrees are zero. parse_ies + extract_plane recovers
/// the input exactly when full-precision serialization is used.
inline std::string write_ies(const IntensitySamples& samples, const WriteOptions& opts = {}) {
    if (samples.size() != 91)
        throw std::invalid_argument("write_ies expects the standard 91-sample form");
    for (int deg = 0; deg <= 90; ++deg)
        if (samples.phi[deg] != deg)
            throw std::invalid_argument("write_ies expects whole-degree polar angles 0..90");

    std::ostringstream out;
    out << "IESNA:LM-63-2002\n";
    out << "[TEST] synthetic symmetric lens\n";
    out << "[MANUFAC] ledfit\n";
    out << "TILT=NONE\n";
    out << "1 0 1 181 1 1 2 0 0 0\n";
    out << "1 1 0\n";
    for (int deg = 0; deg <= 180; ++deg) out << deg << (deg % 10 == 9 ? '\n' : ' ');
    out << "\n0\n";
    for (int deg = 0; deg <= 180; ++deg) {
        const double v = deg <= 90 ? samples.candela[deg] : 0.0;
        out << detail::format_candela(v, opts.candela_decimals) << (deg % 5 == 4 ? '\n' : ' ');
    }
    out << '\n';
    return out.str();
}

}  // namespace ledfit
