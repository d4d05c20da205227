#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptbsim::engine {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a run cannot continue: a non-finite value or a failing step.
class SimulationError : public std::runtime_error {
public:
    SimulationError(double time, std::string variable, const std::string& detail)
        : std::runtime_error(format(time, variable, detail)), time_(time), variable_(std::move(variable)) {}

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] const std::string& variable() const noexcept { return variable_; }

private:
    static std::string format(double time, const std::string& variable, const std::string& detail) {
        std::ostringstream os;
        os.precision(10);
        os << "simulation aborted at t=" << time << " in '" << variable << "': " << detail;
        return os.str();
    }

    double time_;
    std::string variable_;
};

struct SimConfig {
    double start_time = 1995.0;
    double end_time = 2022.0;
    double dt = 1.0 / 16.0;
    double save_interval = 1.0;

    [[nodiscard]] std::size_t step_count() const {
        return static_cast<std::size_t>(std::llround((end_time - start_time) / dt));
    }
    [[nodiscard]] std::size_t steps_per_save() const {
        return static_cast<std::size_t>(std::llround(save_interval / dt));
    }

    void validate() const {
        if (!std::isfinite(start_time) || !std::isfinite(end_time) || !(start_time < end_time)) {
            throw ConfigError("start_time must be finite and earlier than end_time");
        }
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw ConfigError("dt must be positive");
        }
        if (!(save_interval > 0.0) || !std::isfinite(save_interval)) {
            throw ConfigError("save_interval must be positive");
        }
        const double per_save = save_interval / dt;
        if (per_save < 1.0 - 1e-12 || std::abs(per_save - std::round(per_save)) > 1e-12 * std::max(1.0, per_save)) {
            throw ConfigError("dt must evenly divide save_interval");
        }
        const double steps = (end_time - start_time) / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            throw ConfigError("dt must evenly divide the simulation window");
        }
    }
};

struct RunWarning {
    double time;
    std::string variable;
    double value;
    std::string message;
};

/// Saved traces of one run. Columns keep the order in which the model first
/// recorded each variable.
struct RunResult {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<RunWarning> warnings;

    [[nodiscard]] bool has(std::string_view name) const noexcept {
        for (const auto& n : names) {
            if (n == name) return true;
        }
        return false;
    }

    [[nodiscard]] const std::vector<double>& trace(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return columns[i];
        }
        throw std::out_of_range("no trace named '" + std::string(name) + "'");
    }

    /// Saved value at the given year, matched within half a save interval of
    /// floating error.
    [[nodiscard]] double at(std::string_view name, double time) const {
        const auto& col = trace(name);
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (std::abs(times[i] - time) < 1e-9) return col[i];
        }
        std::ostringstream os;
        os << "no saved row at t=" << time;
        throw std::out_of_range(os.str());
    }
};

/// Per-step sink for auxiliaries and warnings. Slot order is fixed by the
/// first step; later steps overwrite values in place.
class StepContext {
public:
    void record(std::string_view name, double value) {
        if (first_pass_) {
            names_.emplace_back(name);
            values_.push_back(value);
        } else {
            values_.at(cursor_) = value;
        }
        ++cursor_;
    }

    /// Emitted once per variable per run.
    void warn(std::string_view variable, double value, std::string_view message) {
        for (const auto& w : warnings_) {
            if (w.variable == variable) return;
        }
        warnings_.push_back(RunWarning{time_, std::string(variable), value, std::string(message)});
    }

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

private:
    template <class M, class S>
    friend RunResult run(const M&, const SimConfig&, S);

    void begin(double t) {
        time_ = t;
        cursor_ = 0;
    }
    void end_first_pass() { first_pass_ = false; }

    std::vector<std::string> names_;
    std::vector<double> values_;
    std::vector<RunWarning> warnings_;
    std::size_t cursor_ = 0;
    double time_ = 0.0;
    bool first_pass_ = true;
};

template <class M>
concept SteppableModel = requires(const M& model, const typename M::State& state, double t, double dt,
                                  StepContext& ctx) {
    { model.step(state, t, dt, ctx) } -> std::convertible_to<typename M::State>;
};

/// Fixed-step explicit integration from start_time to end_time. Every
/// auxiliary the model records is saved at each save_interval, including the
/// final instant.
template <class M, class S>
RunResult run(const M& model, const SimConfig& config, S state) {
    static_assert(SteppableModel<M>);
    config.validate();

    const std::size_t steps = config.step_count();
    const std::size_t per_save = config.steps_per_save();

    RunResult result;
    StepContext ctx;

    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = config.start_time + static_cast<double>(i) * config.dt;
        ctx.begin(t);
        S next;
        try {
            next = model.step(state, t, config.dt, ctx);
        } catch (const SimulationError&) {
            throw;
        } catch (const std::exception& e) {
            throw SimulationError(t, "step", e.what());
        }
        if (i == 0) {
            ctx.end_first_pass();
            result.names = ctx.names();
            result.columns.resize(result.names.size());
        }
        const auto& values = ctx.values();
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (!std::isfinite(values[k])) {
                throw SimulationError(t, result.names[k], "non-finite value");
            }
        }
        if (i % per_save == 0) {
            result.times.push_back(t);
            for (std::size_t k = 0; k < values.size(); ++k) {
                result.columns[k].push_back(values[k]);
            }
        }
        state = std::move(next);
    }
    result.warnings = ctx.warnings_;
    return result;
}

}  // namespace ptbsim::engine
