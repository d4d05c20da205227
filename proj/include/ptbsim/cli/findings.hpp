#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptbsim/engine/simulation.hpp"

namespace ptbsim::cli {

enum class Side { Below = -1, Equal = 0, Above = 1 };

struct Crossing {
    double year;
    Side side_after;  // scenario relative to base from this year on
};

inline Side side_of(double delta) {
    if (delta > 0.0) return Side::Above;
    if (delta < 0.0) return Side::Below;
    return Side::Equal;
}

inline const char* side_name(Side s) {
    switch (s) {
        case Side::Above: return "above";
        case Side::Below: return "below";
        case Side::Equal: return "equal";
    }
    return "equal";
}

/// Saved years where sign(scenario - base) flips relative to the last
/// established sign and then holds for at least `persistence` further saves.
/// Zero deltas carry no sign; short-lived flips are ignored.
inline std::vector<Crossing> crossing_years(const std::vector<double>& times, const std::vector<double>& base,
                                            const std::vector<double>& scenario, std::size_t persistence = 2) {
    std::vector<Crossing> out;
    const std::size_t n = std::min({times.size(), base.size(), scenario.size()});
    Side established = Side::Equal;
    for (std::size_t i = 0; i < n; ++i) {
        const Side s = side_of(scenario[i] - base[i]);
        if (s == Side::Equal || s == established) continue;
        if (established == Side::Equal) {
            established = s;
            continue;
        }
        if (i + persistence >= n) break;
        bool holds = true;
        for (std::size_t k = 1; k <= persistence; ++k) {
            if (side_of(scenario[i + k] - base[i + k]) != s) holds = false;
        }
        if (holds) {
            out.push_back(Crossing{times[i], s});
            established = s;
        }
    }
    return out;
}

struct Checkpoint {
    double year;
    double scenario;
    double base;
};

struct Comparison {
    std::string scenario;
    std::string variable;
    std::vector<Crossing> crossings;
    double max_abs_delta = 0.0;
    std::vector<Checkpoint> checkpoints;
};

inline Comparison compare_traces(const std::string& scenario, const std::string& variable,
                                 const engine::RunResult& base, const engine::RunResult& other,
                                 const std::vector<double>& checkpoint_years) {
    Comparison c{scenario, variable, {}, 0.0, {}};
    const auto& b = base.trace(variable);
    const auto& s = other.trace(variable);
    c.crossings = crossing_years(base.times, b, s);
    for (std::size_t i = 0; i < std::min(b.size(), s.size()); ++i) {
        c.max_abs_delta = std::max(c.max_abs_delta, std::abs(s[i] - b[i]));
    }
    for (double y : checkpoint_years) {
        for (std::size_t i = 0; i < base.times.size(); ++i) {
            if (std::abs(base.times[i] - y) < 1e-9) {
                c.checkpoints.push_back(Checkpoint{y, s[i], b[i]});
            }
        }
    }
    return c;
}

inline nlohmann::json to_json(const Comparison& c) {
    nlohmann::json j;
    j["scenario"] = c.scenario;
    j["variable"] = c.variable;
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& x : c.crossings) xs.push_back({{"year", x.year}, {"scenario_is", side_name(x.side_after)}});
    j["crossings"] = xs;
    j["first_crossing_year"] = c.crossings.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.crossings.front().year);
    j["max_abs_delta"] = c.max_abs_delta;
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& cp : c.checkpoints) {
        cps.push_back({{"year", cp.year}, {"scenario", cp.scenario}, {"base", cp.base},
                       {"delta", cp.scenario - cp.base}});
    }
    j["checkpoints"] = cps;
    return j;
}

}  // namespace ptbsim::cli
