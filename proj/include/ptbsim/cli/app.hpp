#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptbsim/calibration/calibration.hpp"
#include "ptbsim/cli/findings.hpp"
#include "ptbsim/engine/simulation.hpp"
#include "ptbsim/io/csv.hpp"
#include "ptbsim/io/series.hpp"
#include "ptbsim/io/svg.hpp"
#include "ptbsim/model/model.hpp"
#include "ptbsim/model/scenario.hpp"

namespace ptbsim::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 1, kSimulationAbort = 2, kOptimizerFailure = 3 };

struct Invocation {
    std::string subcommand;
    std::vector<std::string> scenarios;
    std::string scenario_file;
    std::vector<std::string> sets;
    std::string config_path;
    std::string data_dir;
    std::string output_dir = ".";
    std::string calibration_spec;
    std::optional<double> dt;
    std::optional<double> start_time;
    std::optional<double> end_time;
};

/// Variables overlaid by `compare`.
inline const std::vector<std::string> kCompareVariables{"pbr", "resources_allocated_to_healthcare", "vul_pop",
                                                        "total_pop"};

namespace detail {

struct Setup {
    engine::SimConfig config;
    model::Parameters base;                   // after config-file parameters
    std::map<std::string, double> overrides;  // scenario file and --set
    std::optional<io::DataBundle> data;
};

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw engine::ConfigError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw engine::ConfigError("'" + path + "': " + e.what());
    }
}

inline std::map<std::string, double> parse_sets(const std::vector<std::string>& sets) {
    std::map<std::string, double> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw engine::ConfigError("--set expects name=value, got '" + s + "'");
        const std::string name = s.substr(0, eq);
        double v = 0.0;
        if (!io::detail::parse_number(std::string_view(s).substr(eq + 1), v)) {
            throw engine::ConfigError("--set " + name + ": value is not a number");
        }
        if (!model::is_parameter(name)) throw model::UnknownParameter(name);
        out[name] = v;
    }
    return out;
}

/// Scenario files are flat name->number objects. A calibration result
/// (with a "values" object) is accepted as well.
inline std::map<std::string, double> scenario_file_overrides(const std::string& path) {
    const nlohmann::json j = read_json(path);
    if (j.is_object() && j.contains("values") && j.at("values").is_object()) {
        return model::overrides_from_json(j.at("values"));
    }
    return model::overrides_from_json(j);
}

inline Setup prepare(const Invocation& inv) {
    Setup s;
    if (!inv.config_path.empty()) {
        const nlohmann::json j = read_json(inv.config_path);
        if (!j.is_object()) throw engine::ConfigError("config must be a JSON object");
        s.config.start_time = j.value("start_time", s.config.start_time);
        s.config.end_time = j.value("end_time", s.config.end_time);
        s.config.dt = j.value("dt", s.config.dt);
        s.config.save_interval = j.value("save_interval", s.config.save_interval);
        if (j.contains("parameters")) model::apply_overrides(s.base, model::overrides_from_json(j.at("parameters")));
    }
    if (inv.dt) s.config.dt = *inv.dt;
    if (inv.start_time) s.config.start_time = *inv.start_time;
    if (inv.end_time) s.config.end_time = *inv.end_time;
    s.config.validate();

    if (!inv.scenario_file.empty()) s.overrides = scenario_file_overrides(inv.scenario_file);
    for (const auto& [k, v] : parse_sets(inv.sets)) s.overrides[k] = v;

    std::string dir = inv.data_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("SD_DATA_DIR")) dir = env;
    }
    if (!dir.empty()) {
        try {
            s.data = io::load_bundle(dir);
        } catch (const io::DataError& e) {
            throw engine::ConfigError(e.what());
        }
    }

    std::error_code ec;
    fs::create_directories(inv.output_dir, ec);
    if (ec || !fs::is_directory(inv.output_dir)) {
        throw engine::ConfigError("output directory '" + inv.output_dir + "' is not writable");
    }
    return s;
}

inline model::ScenarioKind resolve_kind(const std::string& name) {
    auto kind = model::parse_scenario_kind(name);
    if (!kind) throw model::UnknownScenario(name);
    return *kind;
}

inline void report_warnings(const engine::RunResult& r, const std::string& label, std::ostream& err) {
    for (const auto& w : r.warnings) {
        err << "warning: [" << label << "] t=" << io::format_number(w.time) << " " << w.variable << "="
            << io::format_number(w.value) << ": " << w.message << "\n";
    }
}

inline io::Chart run_chart(const std::string& title, const engine::RunResult& r, const std::optional<io::DataBundle>& data) {
    io::ChartPanel pbr{"Preterm birth rate", "PBR (%)", {io::series_from_run(r, "pbr", "PBR simulated")}};
    io::ChartPanel pop{"Population", "people",
                       {io::series_from_run(r, "total_pop", "Total simulated"),
                        io::series_from_run(r, "vul_pop", "Vulnerable simulated")}};
    if (data) {
        pbr.series.push_back(io::series_from_data(data->pbr_history, "PBR historical"));
        pop.series.push_back(io::series_from_data(data->total_population, "Total historical"));
        pop.series.push_back(io::series_from_data(data->vulnerable_population(), "Vulnerable historical"));
    }
    return io::Chart{title, {pbr, pop}};
}

/// Appends `name` to `taken`, suffixed with _2, _3, ... if already present.
inline std::string unique_label(const std::string& name, std::vector<std::string>& taken) {
    std::string label = name;
    for (int k = 2; std::find(taken.begin(), taken.end(), label) != taken.end(); ++k) {
        label = name + "_" + std::to_string(k);
    }
    taken.push_back(label);
    return label;
}

}  // namespace detail

inline int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const auto setup = detail::prepare(inv);
    const std::string& name = inv.scenarios.empty() ? std::string("base") : inv.scenarios.front();
    const model::ScenarioSpec spec{detail::resolve_kind(name), setup.overrides};
    const model::Parameters params = model::build_scenario(setup.base, spec);

    const engine::RunResult r = model::simulate(params, setup.config);
    detail::report_warnings(r, name, err);

    const fs::path dir(inv.output_dir);
    io::export_run(r, dir / (name + ".csv"));
    io::render_chart(detail::run_chart("Scenario " + name, r, setup.data), dir / (name + ".svg"));
    out << "wrote " << (dir / (name + ".csv")).string() << " (" << r.times.size() << " rows)\n";
    out << "wrote " << (dir / (name + ".svg")).string() << "\n";
    return kOk;
}

inline int cmd_compare(const Invocation& inv, std::ostream& out, std::ostream& err) {
    if (inv.scenarios.size() < 2) throw engine::ConfigError("compare needs at least two scenarios");
    const auto setup = detail::prepare(inv);

    std::vector<model::Parameters> params;
    std::vector<std::string> labels;
    for (const auto& name : inv.scenarios) {
        params.push_back(model::build_scenario(setup.base, {detail::resolve_kind(name), setup.overrides}));
        detail::unique_label(name, labels);
    }

    std::vector<std::future<engine::RunResult>> jobs;
    for (const auto& p : params) {
        jobs.push_back(std::async(std::launch::async, [&setup, p] { return model::simulate(p, setup.config); }));
    }
    std::vector<engine::RunResult> runs;
    for (auto& j : jobs) runs.push_back(j.get());
    for (std::size_t k = 0; k < runs.size(); ++k) detail::report_warnings(runs[k], labels[k], err);

    const fs::path dir(inv.output_dir);
    const engine::RunResult& base = runs.front();
    std::vector<double> checkpoints{2017.0, setup.config.end_time};
    if (checkpoints.front() >= checkpoints.back()) checkpoints.pop_back();

    nlohmann::json findings;
    findings["base"] = labels.front();
    findings["comparisons"] = nlohmann::json::array();

    for (const auto& var : kCompareVariables) {
        engine::RunResult table;
        table.times = base.times;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            table.names.push_back(labels[k]);
            table.columns.push_back(runs[k].trace(var));
        }
        for (std::size_t k = 1; k < runs.size(); ++k) {
            std::vector<double> delta(base.times.size());
            for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = runs[k].trace(var)[i] - base.trace(var)[i];
            table.names.push_back("delta_" + labels[k]);
            table.columns.push_back(std::move(delta));
        }
        io::export_run(table, dir / ("compare_" + var + ".csv"));

        io::ChartPanel panel{var, var, {}};
        for (std::size_t k = 0; k < runs.size(); ++k) panel.series.push_back(io::series_from_run(runs[k], var, labels[k]));
        io::render_chart(io::Chart{"Scenario comparison: " + var, {panel}}, dir / ("compare_" + var + ".svg"));

        for (std::size_t k = 1; k < runs.size(); ++k) {
            const Comparison c = compare_traces(labels[k], var, base, runs[k], checkpoints);
            findings["comparisons"].push_back(to_json(c));
            out << var << ": " << labels[k] << " vs " << labels.front();
            if (c.crossings.empty()) {
                out << " no crossing";
            } else {
                for (const auto& x : c.crossings) {
                    out << " crosses " << io::format_time(x.year) << " (now " << side_name(x.side_after) << ")";
                }
            }
            for (const auto& cp : c.checkpoints) {
                out << "; " << io::format_time(cp.year) << " delta " << io::format_number(cp.scenario - cp.base);
            }
            out << "\n";
        }
    }
    io::write_text(dir / "findings.json", findings.dump(2) + "\n");
    out << "wrote comparison files to " << dir.string() << "\n";
    return kOk;
}

inline int cmd_calibrate(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const auto setup = detail::prepare(inv);
    if (!setup.data) throw engine::ConfigError("calibrate needs --data-dir or SD_DATA_DIR");
    try {
        setup.data->require_calibration_window();
    } catch (const io::DataError& e) {
        throw engine::ConfigError(e.what());
    }

    model::Parameters base = setup.base;
    model::apply_overrides(base, setup.overrides);

    calibration::CalibrationSpec spec;
    if (!inv.calibration_spec.empty()) {
        spec = calibration::calibration_spec_from_json(detail::read_json(inv.calibration_spec), base);
    } else {
        spec.free = calibration::default_free_parameters(base);
    }
    model::apply_overrides(base, spec.parameters);
    if (spec.free.empty()) throw engine::ConfigError("empty free set");

    calibration::FitOptions options;
    options.simplex = spec.simplex;
    options.window = calibration::calibration_window(setup.config.dt);
    const calibration::FitResult fit = calibration::fit(base, spec.free, *setup.data, spec.weights, options);

    const fs::path dir(inv.output_dir);
    io::write_text(dir / "fit.json", calibration::to_json(fit).dump(2) + "\n");
    const engine::RunResult r = model::simulate(fit.apply(base), setup.config);
    detail::report_warnings(r, "calibrated", err);
    io::export_run(r, dir / "calibrated.csv");
    io::render_chart(detail::run_chart("Calibrated run", r, setup.data), dir / "calibrated.svg");

    out << "objective " << io::format_number(fit.objective) << " after " << fit.iterations << " evaluations\n";
    for (const auto& [name, v] : fit.values) out << "  " << name << " = " << io::format_number(v) << "\n";
    for (const auto& [name, m] : fit.per_series) {
        out << "MAPE " << name << " = " << io::format_number(m.mape) << "%\n";
    }
    return kOk;
}

/// Entry point shared by the executable and the tests. Returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Invocation inv;
    CLI::App app{"Preterm-birth stock-and-flow simulator", "ptbsim"};
    app.require_subcommand(1);

    auto add_common = [&inv](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "JSON config (time window, dt, parameters)");
        sub->add_option("--data-dir", inv.data_dir, "Historical data directory (falls back to SD_DATA_DIR)");
        sub->add_option("--output-dir,-o", inv.output_dir, "Directory for CSV/SVG/JSON outputs");
        sub->add_option("--dt", inv.dt, "Integration step in years");
        sub->add_option("--start", inv.start_time, "Start year");
        sub->add_option("--end", inv.end_time, "End year");
        sub->add_option("--set", inv.sets, "Parameter override name=value (repeatable)");
        sub->add_option("--scenario-file", inv.scenario_file, "Flat JSON of parameter overrides");
    };

    auto* run = app.add_subcommand("run", "Simulate one scenario");
    add_common(run);
    std::string scenario = "base";
    run->add_option("--scenario,-s", scenario, "base, s1, s2 or custom");

    auto* compare = app.add_subcommand("compare", "Simulate several scenarios against the first");
    add_common(compare);
    compare->add_option("scenarios", inv.scenarios, "Scenario names; the first is the reference")->required();

    auto* calibrate = app.add_subcommand("calibrate", "Fit free parameters to historical data");
    add_common(calibrate);
    calibrate->add_option("--spec", inv.calibration_spec, "Calibration spec JSON");

    std::vector<const char*> argv{"ptbsim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (run->parsed()) {
            inv.subcommand = "run";
            inv.scenarios = {scenario};
            return cmd_run(inv, out, err);
        }
        if (compare->parsed()) {
            inv.subcommand = "compare";
            return cmd_compare(inv, out, err);
        }
        inv.subcommand = "calibrate";
        return cmd_calibrate(inv, out, err);
    } catch (const engine::SimulationError& e) {
        err << "error: " << e.what() << "\n";
        return kSimulationAbort;
    } catch (const calibration::OptimizerError& e) {
        err << "error: optimizer failed: " << e.what() << "\n";
        return kOptimizerFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const io::DataError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace ptbsim::cli
