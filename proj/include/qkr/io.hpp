#pragma once

// File formats shared by the experiment runner: `key = value` configuration
// text, CSV with `#` metadata lines, and binary PGM heatmaps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qkr/config.hpp"
#include "qkr/phase_space.hpp"

namespace qkr::io {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin)
{
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(origin + ":" + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config file " + path.string());
    return parse_key_values(in, path.string());
}

inline std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_real(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw Error("");
        return v;
    } catch (...) {
        throw Error("invalid number for " + what + ": '" + s + "'");
    }
}

inline long parse_integer(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size())
            throw Error("");
        return v;
    } catch (...) {
        throw Error("invalid integer for " + what + ": '" + s + "'");
    }
}

/// Comma-separated reals; an item `a:b:step` expands to a, a+step, ..., b.
inline std::vector<double> parse_real_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(parse_real(item, what));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw Error("range for " + what + " must be start:stop:step, got '" + item + "'");
        const double a = parse_real(trim(item.substr(0, c1)), what);
        const double b = parse_real(trim(item.substr(c1 + 1, c2 - c1 - 1)), what);
        const double step = parse_real(trim(item.substr(c2 + 1)), what);
        if (!(step > 0.0) || b < a)
            throw Error("range for " + what + " needs step > 0 and stop >= start");
        const long count = std::lround(std::floor((b - a) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            // Round through a short decimal so 0.1:5:0.1 yields 0.3, not 0.30000000000000004.
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", a + double(i) * step);
            out.push_back(std::stod(buf));
        }
    }
    if (out.empty())
        throw Error("empty list for " + what);
    return out;
}

inline std::vector<long> parse_integer_list(const std::string& s, const std::string& what)
{
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_integer(item, what));
    }
    if (out.empty())
        throw Error("empty list for " + what);
    return out;
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// CSV with `# key: value` lines, a header row, then data rows.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const Metadata& meta, const std::vector<std::string>& header)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_)
            throw Error("cannot write " + path.string());
        for (const auto& [k, v] : meta)
            out_ << "# " << k << ": " << v << '\n';
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        if (!out_)
            throw Error("write failed for " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// Binary PGM (P5) of a folded cell distribution: width = height = ell,
/// top row = highest momentum cell, pixel = round(255 p / p_max).
inline void write_pgm(const std::filesystem::path& path, const CellDistribution& dist)
{
    if (!dist.folded())
        throw Error("write_pgm: distribution must be folded");
    const int ell = dist.ell();
    double p_max = 0.0;
    for (double p : dist.values())
        p_max = std::max(p_max, p);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "P5\n# p_max " << format_real(p_max) << '\n' << ell << ' ' << ell << "\n255\n";
    for (int r = 0; r < ell; ++r) {
        const int p_row = ell - 1 - r;
        for (int x = 0; x < ell; ++x) {
            const double p = dist.at(x, p_row);
            const long v = p_max > 0.0 ? std::lround(255.0 * p / p_max) : 0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0L, 255L))));
        }
    }
    if (!out)
        throw Error("write failed for " + path.string());
}

}  // namespace qkr::io
