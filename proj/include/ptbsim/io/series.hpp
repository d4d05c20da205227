#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace ptbsim::io {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeriesPoint {
    int year;
    double value;

    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Year-indexed series; years strictly increasing, values finite.
struct TimeSeries {
    std::string name;
    std::vector<SeriesPoint> points;

    [[nodiscard]] bool empty() const noexcept { return points.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }

    [[nodiscard]] std::optional<double> value_at(int year) const noexcept {
        for (const auto& pt : points) {
            if (pt.year == year) return pt.value;
        }
        return std::nullopt;
    }

    [[nodiscard]] bool covers(int first, int last) const noexcept {
        for (int y = first; y <= last; ++y) {
            if (!value_at(y)) return false;
        }
        return true;
    }

    [[nodiscard]] TimeSeries window(int first, int last) const {
        TimeSeries out{name, {}};
        for (const auto& pt : points) {
            if (pt.year >= first && pt.year <= last) out.points.push_back(pt);
        }
        return out;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace detail

/// Parses `year,value` CSV text. `source` names the input in error messages.
inline TimeSeries parse_series(std::string_view text, std::string name, std::string_view source = "<input>") {
    TimeSeries series{std::move(name), {}};
    std::size_t line_no = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& what) {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line != "year,value") fail("expected header 'year,value'");
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            fail("malformed row, expected 'year,value'");
        }
        SeriesPoint pt{};
        if (!detail::parse_number(line.substr(0, comma), pt.year)) fail("malformed year");
        if (!detail::parse_number(line.substr(comma + 1), pt.value)) fail("malformed value");
        if (!std::isfinite(pt.value)) fail("non-finite value");
        if (!series.points.empty() && pt.year <= series.points.back().year) fail("years not increasing");
        series.points.push_back(pt);
    }
    if (series.points.empty()) {
        throw DataError(std::string(source) + ": no data rows");
    }
    return series;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline TimeSeries load_series(const std::filesystem::path& path, std::string name) {
    return parse_series(read_file(path), std::move(name), path.string());
}

/// Vulnerable population proxy: twice the count below 200% of the FPL.
inline TimeSeries derive_vulnerable(const TimeSeries& poverty) {
    TimeSeries out{"vulnerable_population", poverty.points};
    for (auto& pt : out.points) pt.value *= 2.0;
    return out;
}

struct DataBundle {
    TimeSeries pbr_history;
    TimeSeries total_population;
    TimeSeries poverty_below_fpl;
    std::optional<TimeSeries> crime_rate;

    [[nodiscard]] TimeSeries vulnerable_population() const { return derive_vulnerable(poverty_below_fpl); }

    void require_calibration_window(int first = 1995, int last = 2017) const {
        if (!pbr_history.covers(first, last)) {
            throw DataError("pbr history does not cover " + std::to_string(first) + "-" + std::to_string(last));
        }
        if (!total_population.covers(first, last)) {
            throw DataError("total population does not cover " + std::to_string(first) + "-" +
                            std::to_string(last));
        }
    }
};

inline constexpr std::string_view kPbrFile = "pbr.csv";
inline constexpr std::string_view kPopulationFile = "total_population.csv";
inline constexpr std::string_view kPovertyFile = "poverty_below_fpl.csv";
inline constexpr std::string_view kCrimeFile = "crime_rate.csv";

/// Loads a county bundle from a directory holding the four `year,value` files.
/// The crime series is optional.
inline DataBundle load_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw DataError("data directory '" + dir.string() + "' does not exist");
    }
    DataBundle b;
    b.pbr_history = load_series(dir / kPbrFile, "pbr");
    b.total_population = load_series(dir / kPopulationFile, "total_population");
    b.poverty_below_fpl = load_series(dir / kPovertyFile, "poverty_below_fpl");
    if (std::filesystem::exists(dir / kCrimeFile)) {
        b.crime_rate = load_series(dir / kCrimeFile, "crime_rate");
    }
    return b;
}

}  // namespace ptbsim::io
