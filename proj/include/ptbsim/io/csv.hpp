#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ptbsim/engine/simulation.hpp"
#include "ptbsim/io/series.hpp"

namespace ptbsim::io {

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Saved years print without a fractional part when they are whole.
inline std::string format_time(double t) {
    if (std::abs(t - std::round(t)) < 1e-9 && std::abs(t) < 1e15) {
        return std::to_string(static_cast<long long>(std::llround(t)));
    }
    return format_number(t);
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline std::string run_to_csv(const engine::RunResult& result) {
    std::string out = "year";
    for (const auto& n : result.names) {
        out += ',';
        out += n;
    }
    out += '\n';
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        out += format_time(result.times[i]);
        for (const auto& col : result.columns) {
            out += ',';
            out += format_number(col.at(i));
        }
        out += '\n';
    }
    return out;
}

/// `year` column followed by one column per traced variable.
inline void export_run(const engine::RunResult& result, const std::filesystem::path& path) {
    write_text(path, run_to_csv(result));
}

inline std::string series_to_csv(const TimeSeries& s) {
    std::string out = "year,value\n";
    for (const auto& pt : s.points) {
        out += std::to_string(pt.year);
        out += ',';
        out += format_number(pt.value);
        out += '\n';
    }
    return out;
}

inline void export_series(const TimeSeries& s, const std::filesystem::path& path) {
    write_text(path, series_to_csv(s));
}

/// Reads a file written by export_run.
inline engine::RunResult parse_run_csv(std::string_view text, std::string_view source = "<input>") {
    engine::RunResult r;
    std::size_t line_no = 0;
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t pos = 0;
        while (true) {
            const auto c = line.find(',', pos);
            cells.push_back(line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
            if (c == std::string_view::npos) break;
            pos = c + 1;
        }
        return cells;
    };
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = detail::trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (line_no == 1) {
            if (cells.empty() || cells[0] != "year") {
                throw DataError(std::string(source) + ":1: expected 'year' as first column");
            }
            for (std::size_t k = 1; k < cells.size(); ++k) r.names.emplace_back(cells[k]);
            r.columns.resize(r.names.size());
            continue;
        }
        if (cells.size() != r.names.size() + 1) {
            throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": wrong number of cells");
        }
        double t = 0.0;
        if (!detail::parse_number(cells[0], t)) {
            throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": malformed year");
        }
        r.times.push_back(t);
        for (std::size_t k = 1; k < cells.size(); ++k) {
            double v = 0.0;
            if (!detail::parse_number(cells[k], v)) {
                throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": malformed value");
            }
            r.columns[k - 1].push_back(v);
        }
    }
    return r;
}

inline engine::RunResult load_run_csv(const std::filesystem::path& path) {
    return parse_run_csv(read_file(path), path.string());
}

}  // namespace ptbsim::io
