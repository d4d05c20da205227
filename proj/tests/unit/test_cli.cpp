#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "ptbsim/cli/app.hpp"
#include "ptbsim/cli/findings.hpp"
#include "ptbsim/io/csv.hpp"
#include "ptbsim/model/model.hpp"

namespace fs = std::filesystem;
using ptbsim::cli::run_cli;

namespace {

struct Cli {
    int code = -1;
    std::string out;
    std::string err;
};

Cli invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    Cli c;
    c.code = run_cli(args, out, err);
    c.out = out.str();
    c.err = err.str();
    return c;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("ptbsim_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv("SD_DATA_DIR");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string out_dir() const { return (dir_ / "out").string(); }
    fs::path dir_;
};

// Writes the model's own 1995-2017 output as a data bundle.
void write_synthetic_bundle(const fs::path& dir, const ptbsim::model::Parameters& truth) {
    fs::create_directories(dir);
    const auto r = ptbsim::model::simulate(truth, ptbsim::engine::SimConfig{1995, 2017, 1.0 / 16, 1});
    auto dump = [&](const std::string& trace, const std::string& file, double scale) {
        ptbsim::io::TimeSeries s{trace, {}};
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            s.points.push_back({static_cast<int>(r.times[i]), r.trace(trace)[i] * scale});
        }
        ptbsim::io::export_series(s, dir / file);
    };
    dump("pbr", "pbr.csv", 1.0);
    dump("total_pop", "total_population.csv", 1.0);
    dump("vul_pop", "poverty_below_fpl.csv", 0.5);
}

}  // namespace

TEST_F(CliTest, RunBaseWritesTwentyEightRows) {
    const auto c = invoke({"run", "--scenario", "base", "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto run = ptbsim::io::load_run_csv(fs::path(out_dir()) / "base.csv");
    EXPECT_EQ(run.times.size(), 28u);
    EXPECT_EQ(run.times.front(), 1995.0);
    EXPECT_EQ(run.times.back(), 2022.0);
    EXPECT_TRUE(fs::exists(fs::path(out_dir()) / "base.svg"));
}

TEST_F(CliTest, RunS2HasDesiredPbrNine) {
    const auto c = invoke({"run", "-s", "s2", "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto run = ptbsim::io::load_run_csv(fs::path(out_dir()) / "s2.csv");
    for (double v : run.trace("desired_pbr")) EXPECT_EQ(v, 9.0);
}

TEST_F(CliTest, UnknownScenarioIsConfigError) {
    const auto c = invoke({"run", "--scenario", "bogus", "-o", out_dir()});
    EXPECT_EQ(c.code, 1);
    EXPECT_NE(c.err.find("bogus"), std::string::npos);
    EXPECT_FALSE(fs::exists(fs::path(out_dir()) / "bogus.csv"));
}

TEST_F(CliTest, BadArgumentsAreConfigErrors) {
    EXPECT_EQ(invoke({}).code, 1);
    EXPECT_EQ(invoke({"run", "--set", "nope=1", "-o", out_dir()}).code, 1);
    EXPECT_EQ(invoke({"run", "--set", "desired_pbr", "-o", out_dir()}).code, 1);
    EXPECT_EQ(invoke({"run", "--dt", "0.3", "-o", out_dir()}).code, 1);
    EXPECT_EQ(invoke({"run", "--config", (dir_ / "missing.json").string(), "-o", out_dir()}).code, 1);
    EXPECT_EQ(invoke({"run", "--data-dir", (dir_ / "nodata").string(), "-o", out_dir()}).code, 1);
    EXPECT_EQ(invoke({"compare", "base", "-o", out_dir()}).code, 1);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, SetOverridesAndConfigFile) {
    const auto cfg = dir_ / "cfg.json";
    ptbsim::io::write_text(cfg, R"({"start_time": 1995, "end_time": 2005, "dt": 0.125, "parameters": {"desired_pbr": 10}})");
    const auto c = invoke({"run", "--config", cfg.string(), "--set", "shock_magnitude=0", "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto run = ptbsim::io::load_run_csv(fs::path(out_dir()) / "base.csv");
    EXPECT_EQ(run.times.size(), 11u);
    for (double v : run.trace("desired_pbr")) EXPECT_EQ(v, 10.0);
    for (double v : run.trace("financial_shock")) EXPECT_EQ(v, 0.0);
}

TEST_F(CliTest, ScenarioFileAcceptsFitOutput) {
    const auto file = dir_ / "fit.json";
    ptbsim::io::write_text(file, R"({"values": {"frac_becoming_vulnerable": 0.22}, "objective": 1})");
    const auto c = invoke({"run", "-s", "custom", "--scenario-file", file.string(), "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    ptbsim::model::Parameters p;
    p.frac_becoming_vulnerable = 0.22;
    const auto expected = ptbsim::model::simulate(p);
    const auto run = ptbsim::io::load_run_csv(fs::path(out_dir()) / "custom.csv");
    EXPECT_EQ(run.trace("vul_pop"), expected.trace("vul_pop"));
}

TEST_F(CliTest, CompareBaseS2CrossesInWindow) {
    const auto c = invoke({"compare", "base", "s2", "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto findings = nlohmann::json::parse(ptbsim::io::read_file(fs::path(out_dir()) / "findings.json"));
    bool found = false;
    for (const auto& cmp : findings.at("comparisons")) {
        if (cmp.at("variable") != "pbr") continue;
        bool in_window = false;
        for (const auto& x : cmp.at("crossings")) {
            const double year = x.at("year").get<double>();
            if (year >= 2009.0 && year <= 2014.0 && x.at("scenario_is") == "above") in_window = true;
        }
        EXPECT_TRUE(in_window) << cmp.dump();
        ASSERT_FALSE(cmp.at("crossings").empty());
        EXPECT_EQ(cmp.at("crossings").back().at("scenario_is"), "above");
        found = true;
    }
    EXPECT_TRUE(found);
    for (const auto& var : ptbsim::cli::kCompareVariables) {
        EXPECT_TRUE(fs::exists(fs::path(out_dir()) / ("compare_" + var + ".csv"))) << var;
        EXPECT_TRUE(fs::exists(fs::path(out_dir()) / ("compare_" + var + ".svg"))) << var;
    }
}

TEST_F(CliTest, CompareBaseS1RaisesVulnerable) {
    const auto c = invoke({"compare", "base", "s1", "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto table = ptbsim::io::load_run_csv(fs::path(out_dir()) / "compare_vul_pop.csv");
    EXPECT_GT(table.at("s1", 2017.0), table.at("base", 2017.0));
    EXPECT_GT(table.at("delta_s1", 2017.0), 0.0);
}

TEST_F(CliTest, CompareBaseWithItselfHasZeroDeltas) {
    const auto c = invoke({"compare", "base", "base", "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    for (const auto& var : ptbsim::cli::kCompareVariables) {
        const auto table = ptbsim::io::load_run_csv(fs::path(out_dir()) / ("compare_" + var + ".csv"));
        for (double v : table.trace("delta_base_2")) EXPECT_EQ(v, 0.0);
    }
    const auto findings = nlohmann::json::parse(ptbsim::io::read_file(fs::path(out_dir()) / "findings.json"));
    for (const auto& cmp : findings.at("comparisons")) EXPECT_TRUE(cmp.at("crossings").empty());
}

TEST_F(CliTest, CalibrateRecoversSyntheticData) {
    ptbsim::model::Parameters truth;
    truth.shock_magnitude = 0.3;
    truth.initial_percent_vul = 0.25;
    write_synthetic_bundle(dir_ / "data", truth);
    const auto spec = dir_ / "spec.json";
    ptbsim::io::write_text(spec, R"({"free": [{"name": "shock_magnitude", "lower": 0, "upper": 0.7},
                                              {"name": "initial_percent_vul", "lower": 0.15, "upper": 0.4}]})");
    const auto c = invoke({"calibrate", "--data-dir", (dir_ / "data").string(), "--spec", spec.string(), "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto fit = nlohmann::json::parse(ptbsim::io::read_file(fs::path(out_dir()) / "fit.json"));
    EXPECT_LT(fit.at("objective").get<double>(), 1e-10);
    EXPECT_NEAR(fit.at("values").at("shock_magnitude").get<double>(), 0.3, 1e-3);
    EXPECT_TRUE(fs::exists(fs::path(out_dir()) / "calibrated.csv"));
    EXPECT_TRUE(fs::exists(fs::path(out_dir()) / "calibrated.svg"));
}

TEST_F(CliTest, CalibrateEmptyFreeSet) {
    const auto spec = dir_ / "spec.json";
    ptbsim::io::write_text(spec, R"({"free": []})");
    const auto c = invoke({"calibrate", "--data-dir", PTBSIM_DATA_DIR, "--spec", spec.string(), "-o", out_dir()});
    EXPECT_EQ(c.code, 1);
    EXPECT_NE(c.err.find("empty free set"), std::string::npos);
}

TEST_F(CliTest, CalibrateWithoutDataIsConfigError) {
    const auto c = invoke({"calibrate", "-o", out_dir()});
    EXPECT_EQ(c.code, 1);
}

TEST_F(CliTest, CalibrateShippedBundle) {
    const auto c = invoke({"calibrate", "--data-dir", PTBSIM_DATA_DIR, "-o", out_dir()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto fit = nlohmann::json::parse(ptbsim::io::read_file(fs::path(out_dir()) / "fit.json"));
    EXPECT_LE(fit.at("per_series").at("pbr").at("mape").get<double>(), 10.0);
    EXPECT_NE(c.out.find("MAPE pbr = "), std::string::npos);
}

TEST_F(CliTest, SimulationAbortExitCode) {
    const auto c = invoke({"run", "--set", "tax_contribution_lal=1e308", "-o", out_dir()});
    EXPECT_EQ(c.code, 2);
    EXPECT_NE(c.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, OptimizerFailureExitCode) {
    const auto c = invoke({"calibrate", "--data-dir", PTBSIM_DATA_DIR, "--set", "tax_contribution_lal=1e308", "-o",
                           out_dir()});
    EXPECT_EQ(c.code, 3);
}

TEST_F(CliTest, DataDirFromEnvironment) {
    setenv("SD_DATA_DIR", PTBSIM_DATA_DIR, 1);
    const auto c = invoke({"run", "-o", out_dir()});
    unsetenv("SD_DATA_DIR");
    ASSERT_EQ(c.code, 0) << c.err;
    const auto svg = ptbsim::io::read_file(fs::path(out_dir()) / "base.svg");
    EXPECT_NE(svg.find("class=\"historical\""), std::string::npos);
}

TEST_F(CliTest, OutputsAreByteIdentical) {
    const std::string a = (dir_ / "a").string(), b = (dir_ / "b").string();
    ASSERT_EQ(invoke({"compare", "base", "s1", "s2", "-o", a}).code, 0);
    ASSERT_EQ(invoke({"compare", "base", "s1", "s2", "-o", b}).code, 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        EXPECT_EQ(ptbsim::io::read_file(e.path()), ptbsim::io::read_file(fs::path(b) / e.path().filename()))
            << e.path().filename();
    }
    EXPECT_EQ(files, 9u);
}

TEST(Crossings, Examples) {
    using ptbsim::cli::crossing_years;
    const std::vector<double> t{1, 2, 3, 4, 5, 6};
    const std::vector<double> base{0, 0, 0, 0, 0, 0};
    auto xs = crossing_years(t, base, {-1, -1, 1, 1, 1, 1});
    ASSERT_EQ(xs.size(), 1u);
    EXPECT_EQ(xs[0].year, 3.0);
    EXPECT_EQ(xs[0].side_after, ptbsim::cli::Side::Above);
    // a one-sample blip does not count
    EXPECT_TRUE(crossing_years(t, base, {-1, -1, 1, -1, -1, -1}).empty());
    // zero deltas carry no sign
    xs = crossing_years(t, base, {-1, 0, 0, 1, 1, 1});
    ASSERT_EQ(xs.size(), 1u);
    EXPECT_EQ(xs[0].year, 4.0);
    EXPECT_TRUE(crossing_years(t, base, base).empty());
}
