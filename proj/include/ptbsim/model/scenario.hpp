#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ptbsim/model/parameters.hpp"

namespace ptbsim::model {

enum class ScenarioKind { Base, S1, S2, Custom };

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Base;
    std::map<std::string, double> overrides;
};

struct UnknownScenario : std::invalid_argument {
    explicit UnknownScenario(std::string_view name)
        : std::invalid_argument("unknown scenario '" + std::string(name) + "' (expected base, s1, s2 or custom)") {}
};

inline std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) {
    if (name == "base") return ScenarioKind::Base;
    if (name == "s1") return ScenarioKind::S1;
    if (name == "s2") return ScenarioKind::S2;
    if (name == "custom") return ScenarioKind::Custom;
    return std::nullopt;
}

inline std::string_view scenario_label(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Base: return "base";
        case ScenarioKind::S1: return "s1";
        case ScenarioKind::S2: return "s2";
        case ScenarioKind::Custom: return "custom";
    }
    return "custom";
}

/// Base share of LAL residents pushed into vulnerability by the 2000 shock
/// is read as 15%; S1 raises it to 22%.
inline constexpr double kS1VulnerableScale = 22.0 / 15.0;
inline constexpr double kS2DesiredPbr = 9.0;

/// Applies the named scenario to `p`, then any explicit overrides on top.
inline Parameters build_scenario(Parameters p, const ScenarioSpec& spec) {
    for (const auto& [name, value] : spec.overrides) {
        if (!is_parameter(name)) throw UnknownParameter(name);
    }
    switch (spec.kind) {
        case ScenarioKind::Base:
        case ScenarioKind::Custom:
            break;
        case ScenarioKind::S1:
            p.frac_becoming_vulnerable *= kS1VulnerableScale;
            break;
        case ScenarioKind::S2:
            p.desired_pbr = kS2DesiredPbr;
            break;
    }
    apply_overrides(p, spec.overrides);
    return p;
}

/// Flat `{"name": number, ...}` object of parameter and switch overrides.
inline std::map<std::string, double> overrides_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("parameter overrides must be a JSON object");
    std::map<std::string, double> out;
    for (const auto& [name, value] : j.items()) {
        if (!is_parameter(name)) throw UnknownParameter(name);
        if (!value.is_number()) {
            throw std::invalid_argument("override '" + name + "' must be a number");
        }
        out[name] = value.get<double>();
    }
    return out;
}

inline std::map<std::string, double> load_overrides(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("scenario file '" + path + "': " + e.what());
    }
    return overrides_from_json(j);
}

}  // namespace ptbsim::model
