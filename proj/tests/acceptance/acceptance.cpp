// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ptbsim/calibration/calibration.hpp"
#include "ptbsim/cli/app.hpp"
#include "ptbsim/engine/builtins.hpp"
#include "ptbsim/io/csv.hpp"
#include "ptbsim/io/series.hpp"
#include "ptbsim/model/model.hpp"
#include "ptbsim/model/scenario.hpp"

namespace fs = std::filesystem;
using namespace ptbsim;
using model::Parameters;
using model::ScenarioKind;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> check;
    double time_limit = 0.0;  // seconds, 0 = none
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

engine::RunResult run_scenario(ScenarioKind kind, engine::SimConfig cfg = {}) {
    return model::simulate(model::build_scenario(Parameters{}, {kind, {}}), cfg);
}

io::DataBundle shipped() { return io::load_bundle(PTBSIM_DATA_DIR); }

calibration::FitResult shipped_fit() {
    return calibration::fit(Parameters{}, calibration::default_free_parameters(), shipped());
}

Outcome builtin_oracle() {
    const double tau = 2.0, dt = 1.0 / 64.0;
    double worst = 0.0;
    for (auto kind : {engine::FirstOrderKind::MaterialDelay, engine::FirstOrderKind::InformationSmooth}) {
        auto s = engine::first_order_init(kind, 0.0, tau);
        const int steps = static_cast<int>(std::lround(10.0 * tau / dt));
        for (int i = 1; i <= steps; ++i) {
            s = engine::first_order_step(s, 1.0, dt).state;
            const double exact = 1.0 - std::exp(-i * dt / tau);
            // relative to the unit step amplitude
            worst = std::max(worst, std::abs(s.output() - exact) / 1.0);
        }
    }
    return {worst <= 2e-3, fmt("max error %.3g (limit 2e-3)", worst)};
}

Outcome euler_convergence() {
    engine::SimConfig fine;
    fine.dt = 1.0 / 64.0;
    const double a = model::simulate(Parameters{}).at("pbr", 2017.0);
    const double b = model::simulate(Parameters{}, fine).at("pbr", 2017.0);
    return {std::abs(a - b) < 0.05, fmt("|dPBR_2017| = %.4g pp (limit 0.05)", std::abs(a - b))};
}

Outcome base_not_below_1995() {
    const auto r = run_scenario(ScenarioKind::Base);
    const double p0 = r.at("pbr", 1995.0);
    double min_late = 1e300;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        if (r.times[i] >= 2017.0 && r.times[i] <= 2022.0) min_late = std::min(min_late, r.trace("pbr")[i]);
    }
    return {min_late >= p0, fmt("min PBR 2017-2022 = %.4f", min_late) + fmt(" vs PBR_1995 = %.4f", p0)};
}

Outcome population_trend() {
    const auto p = shipped_fit().apply(Parameters{});
    const auto r = model::simulate(p);
    const double pop0 = r.at("total_pop", 1995.0);
    const double pop = r.at("total_pop", 2017.0);
    const bool ok = std::abs(pop - 1.2e6) <= 0.1 * 1.2e6 && std::abs(pop0 - 1.42262e6) < 1e-6;
    return {ok, fmt("calibrated total_pop_2017 = %.0f", pop) + fmt(" (start %.0f)", pop0)};
}

Outcome s2_crossing() {
    const auto base = run_scenario(ScenarioKind::Base);
    const auto s2 = run_scenario(ScenarioKind::S2);
    const auto& b = base.trace("pbr");
    const auto& s = s2.trace("pbr");
    // 1995 is equal by construction (same initial stocks), so "below" is
    // checked from the first save after the start.
    std::vector<double> not_below;
    for (std::size_t i = 1; i < base.times.size(); ++i) {
        if (base.times[i] <= 2009.0 && !(s[i] < b[i])) not_below.push_back(base.times[i]);
    }
    const auto xs = cli::crossing_years(base.times, b, s);
    double flip = std::nan("");
    for (const auto& x : xs) {
        if (x.year >= 2009.0 && x.year <= 2014.0 && x.side_after == cli::Side::Above) flip = x.year;
    }
    bool above_after = !std::isnan(flip);
    for (std::size_t i = 0; above_after && i < base.times.size(); ++i) {
        if (base.times[i] >= flip && !(s[i] > b[i])) above_after = false;
    }
    std::string detail = std::isnan(flip) ? "no upward crossing in [2009, 2014]" : fmt("crossing at %.0f", flip);
    detail += above_after ? ", S2 above through 2022" : ", S2 not above through 2022";
    if (not_below.empty()) {
        detail += "; S2 below base for all saves <= 2009";
    } else {
        detail += fmt("; S2 not below base in %.0f saves <= 2009", static_cast<double>(not_below.size()));
        detail += fmt(" (%.0f", not_below.front()) + fmt("-%.0f)", not_below.back());
    }
    return {not_below.empty() && above_after, detail};
}

Outcome s2_healthcare() {
    const auto base = run_scenario(ScenarioKind::Base);
    const auto s2 = run_scenario(ScenarioKind::S2);
    double worst = 1e300;
    for (std::size_t i = 0; i < base.times.size(); ++i) {
        if (base.times[i] <= 2000.0) continue;
        worst = std::min(worst, s2.trace("resources_allocated_to_healthcare")[i] -
                                    base.trace("resources_allocated_to_healthcare")[i]);
    }
    return {worst >= 0.0, fmt("min (S2 - base) healthcare after 2000 = %.4g $/yr", worst)};
}

Outcome s1_direction() {
    const auto base = run_scenario(ScenarioKind::Base);
    const auto s1 = run_scenario(ScenarioKind::S1);
    const double dv = s1.at("vul_pop", 2017.0) - base.at("vul_pop", 2017.0);
    const double dr = s1.at("resources", 2017.0) - base.at("resources", 2017.0);
    return {dv > 0.0 && dr < 0.0, fmt("2017 dvul_pop = %+.0f", dv) + fmt(", dresources = %+.4g", dr)};
}

Outcome conservation() {
    Parameters p;
    p.switches = model::Switches::all_off();
    p.shock_magnitude = 0.0;
    engine::SimConfig every_step;
    every_step.save_interval = every_step.dt;
    const auto r = model::simulate(p, every_step);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        worst = std::max(worst, std::abs(r.trace("lal_pop")[i] - p.initial_lal_pop()) / p.initial_lal_pop());
        worst = std::max(worst, std::abs(r.trace("vul_pop")[i] - p.initial_vul_pop()) / p.initial_vul_pop());
    }
    return {worst <= 1e-9, fmt("max relative drift %.3g (limit 1e-9)", worst)};
}

Outcome bounds() {
    engine::SimConfig every_step;
    every_step.save_interval = every_step.dt;
    std::size_t violations = 0, checked = 0;
    for (auto kind : {ScenarioKind::Base, ScenarioKind::S1, ScenarioKind::S2}) {
        const auto r = run_scenario(kind, every_step);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            ++checked;
            const double f = r.trace("insured_frac")[i];
            const double pbr = r.trace("pbr")[i];
            const double crime = r.trace("community_crime_rate")[i];
            if (f < 0.0 || f > 1.0) ++violations;
            if (pbr < 10.4 - 1e-9 || pbr > 21.112 + 1e-9) ++violations;
            if (crime < 450.0 - 1e-9 || crime > 1800.0 + 1e-9) ++violations;
        }
    }
    return {violations == 0, fmt("%.0f steps checked", static_cast<double>(checked)) +
                                 fmt(", %.0f violations", static_cast<double>(violations))};
}

Outcome spot_values() {
    const Parameters p;
    const double vor0 = model::vulnerable_odds_ratio(0.0, p);
    const double vor1 = model::vulnerable_odds_ratio(1.0, p);
    const double pbr = model::preterm_block(0.015 * p.initial_lal_pop(), 0.015 * p.initial_vul_pop(), 0.5, p).pbr;
    const bool ok = vor0 == 2.03 && std::abs(vor1 - 1.7458) <= 1e-12 && std::abs(pbr - 12.99) <= 0.01;
    return {ok, fmt("VOR(0) = %.15g", vor0) + fmt(", VOR(1) = %.13g", vor1) + fmt(", first PBR = %.4f", pbr)};
}

Outcome calibration_consistency() {
    const Parameters truth;
    const auto r = model::simulate(truth, calibration::calibration_window());
    auto series = [&](const std::string& trace, const std::string& name) {
        io::TimeSeries s{name, {}};
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            s.points.push_back({static_cast<int>(std::lround(r.times[i])), r.trace(trace)[i]});
        }
        return s;
    };
    const std::vector<calibration::Target> targets{{"pbr", "pbr", series("pbr", "pbr")},
                                                   {"total_population", "total_pop", series("total_pop", "total_population")},
                                                   {"vulnerable_population", "vul_pop", series("vul_pop", "vulnerable_population")}};

    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> sign(0, 1);
    double worst_rel = 0.0, worst_obj = 0.0;
    const int trials = 3;
    for (int t = 0; t < trials; ++t) {
        auto free = calibration::default_free_parameters(truth);
        for (auto& fp : free) {
            fp.initial = std::clamp(fp.initial * (sign(rng) ? 1.2 : 0.8), fp.lower, fp.upper);
        }
        const auto fit = calibration::fit(Parameters{}, free, targets, calibration::default_weights());
        worst_obj = std::max(worst_obj, fit.objective);
        for (const auto& fp : free) {
            const double want = model::get_parameter(truth, fp.name);
            worst_rel = std::max(worst_rel, std::abs(fit.values.at(fp.name) - want) / std::abs(want));
        }
    }

    const auto hist = shipped_fit();
    const double mape_pbr = hist.per_series.at("pbr").mape;
    const double mape_pop = hist.per_series.at("total_population").mape;
    const bool ok = worst_rel <= 0.05 && worst_obj < 1e-8 && mape_pbr <= 10.0 && mape_pop <= 5.0;
    return {ok, fmt("synthetic: max rel err %.3g", worst_rel) + fmt(", max objective %.3g", worst_obj) +
                    fmt("; shipped: MAPE pbr %.2f%%", mape_pbr) + fmt(", total_pop %.2f%%", mape_pop)};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "ptbsim_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands{
        {"run", "--scenario", "base"},
        {"run", "--scenario", "s1", "--data-dir", PTBSIM_DATA_DIR},
        {"compare", "base", "s1", "s2"},
        {"calibrate", "--data-dir", PTBSIM_DATA_DIR},
    };
    std::size_t compared = 0, differing = 0;
    int failed_runs = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<fs::path> dirs;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / (std::to_string(c) + "_" + std::to_string(rep));
            auto args = commands[c];
            args.push_back("-o");
            args.push_back(dir.string());
            std::ostringstream out, err;
            if (cli::run_cli(args, out, err) != 0) ++failed_runs;
            dirs.push_back(dir);
        }
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            if (e.path().extension() != ".csv") continue;
            ++compared;
            const fs::path other = dirs[1] / e.path().filename();
            if (!fs::exists(other) || io::read_file(e.path()) != io::read_file(other)) ++differing;
        }
    }
    fs::remove_all(root);
    const bool ok = failed_runs == 0 && differing == 0 && compared > 0;
    return {ok, fmt("%.0f CSV files compared", static_cast<double>(compared)) +
                    fmt(", %.0f differ", static_cast<double>(differing)) +
                    fmt(", %.0f failed invocations", static_cast<double>(failed_runs))};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "builtin oracle", builtin_oracle, 1.0},
        {2, "euler convergence", euler_convergence, 1.0},
        {3, "base PBR not below 1995 in 2017-2022", base_not_below_1995},
        {4, "population trend", population_trend},
        {5, "S2 crossing", s2_crossing},
        {6, "S2 healthcare pressure", s2_healthcare},
        {7, "S1 direction", s1_direction},
        {8, "conservation", conservation},
        {9, "bounds", bounds},
        {10, "spot values", spot_values},
        {11, "calibration self-consistency", calibration_consistency, 60.0},
        {12, "determinism", determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0.0) {
            o.detail += fmt("; %.3f s", secs) + fmt(" (limit %.0f s)", c.time_limit);
            if (secs >= c.time_limit) o.pass = false;
        }
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
