#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptbsim/calibration/nelder_mead.hpp"
#include "ptbsim/engine/simulation.hpp"
#include "ptbsim/io/series.hpp"
#include "ptbsim/model/model.hpp"
#include "ptbsim/model/parameters.hpp"

namespace ptbsim::calibration {

struct CalibrationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FreeParameter {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    double initial = 0.0;

    void validate() const {
        if (!model::is_parameter(name)) throw model::UnknownParameter(name);
        if (model::is_switch(name)) throw CalibrationError("switch '" + name + "' cannot be a free parameter");
        if (!(lower <= initial && initial <= upper)) {
            throw CalibrationError("free parameter '" + name + "' needs lower <= initial <= upper");
        }
    }
};

/// Scalar rates and fractions that shape the population split and migration.
inline std::vector<FreeParameter> default_free_parameters(const model::Parameters& p = {}) {
    return {
        {"relative_vul_immigration", 0.0, 1.0, p.relative_vul_immigration},
        {"shock_magnitude", 0.0, 0.7, p.shock_magnitude},
        {"frac_becoming_vulnerable", 0.0, 1.0, p.frac_becoming_vulnerable},
        {"initial_percent_vul", 0.15, 0.4, p.initial_percent_vul},
        {"relative_contribution_vul", 0.3, 1.0, p.relative_contribution_vul},
    };
}

using Weights = std::map<std::string, double>;

inline Weights default_weights() {
    return {{"pbr", 1.0}, {"total_population", 1.0}, {"vulnerable_population", 1.0}};
}

/// Historical series keyed by calibration name, with the simulated trace
/// each one is compared against.
struct Target {
    std::string name;
    std::string trace;
    io::TimeSeries observed;
};

inline std::vector<Target> targets_from_bundle(const io::DataBundle& data) {
    return {
        {"pbr", "pbr", data.pbr_history},
        {"total_population", "total_pop", data.total_population},
        {"vulnerable_population", "vul_pop", data.vulnerable_population()},
    };
}

struct SeriesMetrics {
    double rmse = 0.0;
    double mape = 0.0;  // percent
    std::size_t count = 0;
};

namespace detail {

struct Overlap {
    std::vector<double> sim;
    std::vector<double> obs;
};

inline Overlap overlap(const engine::RunResult& run, const Target& target) {
    Overlap o;
    const auto& col = run.trace(target.trace);
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const double t = run.times[i];
        if (std::abs(t - std::round(t)) > 1e-9) continue;
        if (auto v = target.observed.value_at(static_cast<int>(std::llround(t)))) {
            o.sim.push_back(col[i]);
            o.obs.push_back(*v);
        }
    }
    return o;
}

}  // namespace detail

inline SeriesMetrics series_metrics(const std::vector<double>& sim, const std::vector<double>& obs) {
    if (sim.empty() || sim.size() != obs.size()) throw CalibrationError("no overlapping years");
    SeriesMetrics m;
    m.count = sim.size();
    double sq = 0.0, ape = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        const double e = sim[i] - obs[i];
        sq += e * e;
        ape += std::abs(e) / std::abs(obs[i]);
    }
    m.rmse = std::sqrt(sq / static_cast<double>(m.count));
    m.mape = 100.0 * ape / static_cast<double>(m.count);
    return m;
}

/// RMSE and MAPE per target over the years present in both run and data.
inline std::map<std::string, SeriesMetrics> metrics(const engine::RunResult& run, const std::vector<Target>& targets) {
    std::map<std::string, SeriesMetrics> out;
    for (const auto& t : targets) {
        const auto o = detail::overlap(run, t);
        if (o.sim.empty()) throw CalibrationError("series '" + t.name + "' has no years overlapping the run");
        out[t.name] = series_metrics(o.sim, o.obs);
    }
    return out;
}

inline std::map<std::string, SeriesMetrics> metrics(const engine::RunResult& run, const io::DataBundle& data) {
    return metrics(run, targets_from_bundle(data));
}

/// Weighted sum over series of squared errors normalized by the mean of the
/// observed values in the overlap.
inline double objective_from_run(const engine::RunResult& run, const std::vector<Target>& targets,
                                 const Weights& weights) {
    double total = 0.0;
    std::size_t used = 0;
    for (const auto& [name, w] : weights) {
        const Target* target = nullptr;
        for (const auto& t : targets) {
            if (t.name == name) target = &t;
        }
        if (target == nullptr) throw CalibrationError("weight given for unknown series '" + name + "'");
        const auto o = detail::overlap(run, *target);
        if (o.sim.empty()) continue;
        double mean = 0.0;
        for (double v : o.obs) mean += v;
        mean /= static_cast<double>(o.obs.size());
        if (mean == 0.0) throw CalibrationError("series '" + name + "' has zero mean");
        double sse = 0.0;
        for (std::size_t i = 0; i < o.sim.size(); ++i) {
            const double r = (o.sim[i] - o.obs[i]) / mean;
            sse += r * r;
        }
        total += w * sse;
        ++used;
    }
    if (used == 0) throw CalibrationError("no overlap between simulated and observed years");
    return total;
}

inline engine::SimConfig calibration_window(double dt = 1.0 / 16.0) {
    return engine::SimConfig{1995.0, 2017.0, dt, 1.0};
}

inline double objective(const model::Parameters& p, const std::vector<Target>& targets, const Weights& weights,
                        const engine::SimConfig& config = calibration_window()) {
    return objective_from_run(model::simulate(p, config), targets, weights);
}

inline double objective(const model::Parameters& p, const io::DataBundle& data,
                        const Weights& weights = default_weights(),
                        const engine::SimConfig& config = calibration_window()) {
    return objective(p, targets_from_bundle(data), weights, config);
}

struct FitResult {
    std::map<std::string, double> values;
    double objective = 0.0;
    double initial_objective = 0.0;
    std::size_t iterations = 0;  // objective evaluations
    std::map<std::string, SeriesMetrics> per_series;

    [[nodiscard]] model::Parameters apply(model::Parameters p) const {
        model::apply_overrides(p, values);
        return p;
    }
};

struct FitOptions {
    SimplexOptions simplex;
    engine::SimConfig window = calibration_window();
};

inline FitResult fit(const model::Parameters& base, const std::vector<FreeParameter>& free,
                     const std::vector<Target>& targets, const Weights& weights, const FitOptions& options = {}) {
    if (free.empty()) throw CalibrationError("empty free set");
    for (const auto& fp : free) fp.validate();

    std::vector<double> x0, lo, hi;
    for (const auto& fp : free) {
        x0.push_back(fp.initial);
        lo.push_back(fp.lower);
        hi.push_back(fp.upper);
    }

    auto with_values = [&](const std::vector<double>& x) {
        model::Parameters p = base;
        for (std::size_t i = 0; i < free.size(); ++i) model::set_parameter(p, free[i].name, x[i]);
        return p;
    };
    auto f = [&](const std::vector<double>& x) {
        try {
            return objective(with_values(x), targets, weights, options.window);
        } catch (const engine::SimulationError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const std::invalid_argument&) {
            // parameter combination rejected by validation
            return std::numeric_limits<double>::infinity();
        }
    };

    FitResult result;
    result.initial_objective = f(x0);
    const SimplexResult best = NelderMead(options.simplex).minimize(f, x0, lo, hi);

    for (std::size_t i = 0; i < free.size(); ++i) result.values[free[i].name] = best.x[i];
    result.objective = best.value;
    result.iterations = best.evaluations;
    result.per_series = metrics(model::simulate(with_values(best.x), options.window), targets);
    return result;
}

inline FitResult fit(const model::Parameters& base, const std::vector<FreeParameter>& free,
                     const io::DataBundle& data, const Weights& weights = default_weights(),
                     const FitOptions& options = {}) {
    return fit(base, free, targets_from_bundle(data), weights, options);
}

inline nlohmann::json to_json(const FitResult& r) {
    nlohmann::json j;
    j["values"] = r.values;
    j["objective"] = r.objective;
    j["initial_objective"] = r.initial_objective;
    j["iterations"] = r.iterations;
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [name, m] : r.per_series) {
        per[name] = {{"rmse", m.rmse}, {"mape", m.mape}, {"count", m.count}};
    }
    j["per_series"] = per;
    return j;
}

inline FitResult fit_result_from_json(const nlohmann::json& j) {
    FitResult r;
    r.values = j.at("values").get<std::map<std::string, double>>();
    r.objective = j.at("objective").get<double>();
    r.initial_objective = j.value("initial_objective", r.objective);
    r.iterations = j.at("iterations").get<std::size_t>();
    for (const auto& [name, m] : j.at("per_series").items()) {
        r.per_series[name] = SeriesMetrics{m.at("rmse").get<double>(), m.at("mape").get<double>(),
                                           m.value("count", std::size_t{0})};
    }
    return r;
}

/// Calibration settings file.
///
///     {"free": [{"name": ..., "lower": ..., "upper": ..., "initial": ...}],
///      "weights": {"pbr": 1, ...}, "max_evaluations": 2000,
///      "tolerance": 1e-8, "parameters": {name: value}}
///
/// Missing "free" selects the default set; "initial" defaults to the base
/// parameter value.
struct CalibrationSpec {
    std::vector<FreeParameter> free;
    Weights weights = default_weights();
    SimplexOptions simplex;
    std::map<std::string, double> parameters;
};

inline CalibrationSpec calibration_spec_from_json(const nlohmann::json& j, const model::Parameters& base) {
    CalibrationSpec spec;
    if (!j.is_object()) throw CalibrationError("calibration spec must be a JSON object");
    if (j.contains("parameters")) {
        for (const auto& [name, v] : j.at("parameters").items()) {
            if (!model::is_parameter(name)) throw model::UnknownParameter(name);
            spec.parameters[name] = v.get<double>();
        }
    }
    model::Parameters p = base;
    model::apply_overrides(p, spec.parameters);
    if (j.contains("free")) {
        for (const auto& e : j.at("free")) {
            FreeParameter fp;
            fp.name = e.at("name").get<std::string>();
            if (!model::is_parameter(fp.name)) throw model::UnknownParameter(fp.name);
            fp.lower = e.at("lower").get<double>();
            fp.upper = e.at("upper").get<double>();
            fp.initial = e.contains("initial") ? e.at("initial").get<double>() : model::get_parameter(p, fp.name);
            spec.free.push_back(fp);
        }
    } else {
        spec.free = default_free_parameters(p);
    }
    if (j.contains("weights")) spec.weights = j.at("weights").get<Weights>();
    spec.simplex.max_evaluations = j.value("max_evaluations", spec.simplex.max_evaluations);
    spec.simplex.relative_tolerance = j.value("tolerance", spec.simplex.relative_tolerance);
    return spec;
}

}  // namespace ptbsim::calibration
