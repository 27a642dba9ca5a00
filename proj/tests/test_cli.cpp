#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "eitmem/cli.hpp"

using namespace eitmem;
namespace fs = std::filesystem;

namespace {

json base_config() {
    return json::parse(R"({
      "scheme": {"F_g": 2, "F_gp": 3, "F_e": 3},
      "polarization": {"alpha": 1, "beta": 1},
      "geometry": {"length_m": 0.003},
      "d_alpha": 8,
      "control": {"omega_over_gamma_e": 1.5, "t_off_ns": 0, "ramp_ns": 20, "t_on_ns": 1000},
      "signal": {"fwhm_ns": 120, "peak_entry_ns": -60},
      "bfield": {"larmor_period_us": 8, "theta_rad": 0},
      "grid": {"nz": 40, "dt_ns": 0.5, "retrieval_window_ns": 600}
    })");
}

std::string error_of(const json& j) {
    try {
        experiment_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("eitmem_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EITMEM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesUnitsAndDefaults) {
    const auto ex = experiment_from_json(base_config());
    EXPECT_EQ(ex.scheme.F_g.twice, 4);
    EXPECT_NEAR(ex.control.Omega_on, 1.5 * ex.scheme.Gamma_e, 1e-6);
    EXPECT_NEAR(ex.control.t_on, 1e-6, 1e-18);
    EXPECT_NEAR(ex.bfield.larmor_period(ex.scheme.g_g), 8e-6, 1e-18);
    EXPECT_NEAR(ex.geometry.area, 1e-6, 1e-20);
    EXPECT_EQ(ex.grid.nz, 40);
    EXPECT_TRUE(ex.field_during_storage_only);
}

TEST(Config, SpinForms) {
    auto j = base_config();
    j["scheme"] = {{"F_g", "1/2"}, {"F_gp", 1.5}, {"F_e", "3/2"}};
    const auto ex = experiment_from_json(j);
    EXPECT_EQ(ex.scheme.F_g.twice, 1);
    EXPECT_EQ(ex.scheme.F_gp.twice, 3);
    EXPECT_EQ(ex.scheme.F_e.twice, 3);
    j["scheme"]["F_g"] = 0.3;
    EXPECT_NE(error_of(j).find("scheme.F_g"), std::string::npos);
}

TEST(Config, RejectsUnknownKeys) {
    auto j = base_config();
    j["control"]["omega"] = 1.0;
    EXPECT_NE(error_of(j).find("unknown key 'control.omega'"), std::string::npos);
    j = base_config();
    j["extra"] = 1;
    EXPECT_NE(error_of(j).find("unknown key 'extra'"), std::string::npos);
}

TEST(Config, NamesMissingKeys) {
    auto j = base_config();
    j["scheme"].erase("F_e");
    EXPECT_NE(error_of(j).find("missing required key 'scheme.F_e'"), std::string::npos);
    j = base_config();
    j.erase("d_alpha");
    EXPECT_NE(error_of(j).find("'d_alpha'"), std::string::npos);
}

TEST(Config, ExactlyOneFieldForm) {
    auto j = base_config();
    j["bfield"]["b_gauss"] = 0.267;
    EXPECT_NE(error_of(j).find("exactly one"), std::string::npos);
    j["bfield"].erase("b_gauss");
    j["bfield"].erase("larmor_period_us");
    EXPECT_NE(error_of(j).find("exactly one"), std::string::npos);
}

TEST(Config, TypeAndRangeErrors) {
    auto j = base_config();
    j["d_alpha"] = "eight";
    EXPECT_NE(error_of(j).find("'d_alpha' must be a number"), std::string::npos);
    j = base_config();
    j["grid"]["nz"] = 1;
    EXPECT_NE(error_of(j).find("grid.nz"), std::string::npos);
    j = base_config();
    j["polarization"]["alpha"] = 0;
    EXPECT_FALSE(error_of(j).empty());
    j = base_config();
    j["bfield"]["storage_only"] = 1;
    EXPECT_NE(error_of(j).find("storage_only"), std::string::npos);
}

TEST(Config, EchoIncludesDerivedQuantities) {
    const auto ex = experiment_from_json(base_config());
    const auto e = experiment_echo(ex);
    EXPECT_TRUE(e["derived"]["eit_feasible"].get<bool>());
    EXPECT_NEAR(e["derived"]["larmor_period_s"].get<double>(), 8e-6, 1e-18);
    EXPECT_NEAR(e["derived"]["collapse_rate_eta"].get<double>(), 2.898740, 1e-6);
    EXPECT_EQ(e["scheme"]["F_g"], 2);
}

TEST(Config, SampleConfigLoads) {
    const auto ex = load_experiment(std::string(EITMEM_CONFIG_DIR) + "/rb85_storage.json");
    EXPECT_NEAR(ex.bfield.gauss(), 0.267, 1e-12);
    EXPECT_THROW(load_experiment("/nonexistent/x.json"), ConfigError);
}

TEST(Cli, ListAndRangeParsing) {
    EXPECT_EQ(cli::parse_list_or_range("0.5,1,1.5"), (std::vector<double>{0.5, 1.0, 1.5}));
    const auto r = cli::parse_list_or_range("0:1:5");
    ASSERT_EQ(r.size(), 5u);
    EXPECT_DOUBLE_EQ(r[1], 0.25);
    EXPECT_DOUBLE_EQ(r.back(), 1.0);
    EXPECT_THROW(cli::parse_list_or_range("0:1"), ConfigError);
    EXPECT_THROW(cli::parse_list_or_range("a,b"), ConfigError);
    EXPECT_THROW(cli::parse_list_or_range("0:1:0"), ConfigError);
}

TEST(Cli, CheckReportsInfeasibleScheme) {
    auto j = base_config();
    j["scheme"] = {{"F_g", 2}, {"F_gp", 2}, {"F_e", 2}};
    j["polarization"] = {{"alpha", 1}, {"beta", -1}};
    std::ostringstream os;
    EXPECT_EQ(cli::cmd_check(experiment_from_json(j), os), cli::kConfigError);
    EXPECT_NE(os.str().find("unconnected"), std::string::npos);
    std::ostringstream ok;
    EXPECT_EQ(cli::cmd_check(experiment_from_json(base_config()), ok), cli::kOk);
    EXPECT_NE(ok.str().find("larmor_period_us: 8.00000000e+00"), std::string::npos);
}

TEST(Cli, RevivalCurveAndSurface) {
    const auto dir = scratch_dir("revival");
    const auto ex = experiment_from_json(base_config());
    const auto curve = cli::cmd_revival(ex, {0.0}, 5, dir);
    EXPECT_EQ(curve.filename(), "revival_curve.csv");
    const auto text = slurp(curve);
    EXPECT_EQ(text.rfind("t_over_TL,f\n", 0), 0u);
    EXPECT_NE(text.find("5.00000000e-01,1.00000000e+00"), std::string::npos);

    const auto surf = cli::cmd_revival(ex, {0.0, constants::pi / 2}, 3, dir);
    EXPECT_EQ(surf.filename(), "revival_surface.csv");
    EXPECT_NE(slurp(surf).find("5.00000000e-01,1.00000000e+00,3.30294623e-01"), std::string::npos);
}

TEST(Cli, SpectrumFiles) {
    const auto dir = scratch_dir("spectrum");
    const auto ex = experiment_from_json(base_config());
    const auto files = cli::cmd_spectrum(ex, {0.0, 1.5}, 5.0, 11, dir);
    ASSERT_EQ(files.size(), 2u);
    EXPECT_EQ(files[1].filename(), "spectrum_omega_1.5.csv");
    const auto text = slurp(files[0]);
    EXPECT_EQ(text.rfind("delta_rad_s,re_chi,im_chi,transmittance\n", 0), 0u);
    EXPECT_THROW(cli::cmd_spectrum(ex, {-1.0}, 5.0, 11, dir), ConfigError);
}

TEST(Cli, SimulationOutputsAreDeterministic) {
    const auto ex = experiment_from_json(base_config());
    const auto a = scratch_dir("sim_a"), b = scratch_dir("sim_b");
    cli::cmd_simulate(ex, a);
    cli::cmd_simulate(ex, b);
    EXPECT_EQ(slurp(a / "timeseries.csv"), slurp(b / "timeseries.csv"));
    EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
    const auto header = slurp(a / "timeseries.csv").substr(0, 50);
    EXPECT_EQ(header.rfind("t_s,omega_rabi,intensity_transmittance,p_D,p_B\n", 0), 0u);
    const auto summary = json::parse(slurp(a / "summary.json"));
    for (const char* key : {"E_in", "E_leaked", "E_retrieved", "efficiency", "config_echo"})
        EXPECT_TRUE(summary.contains(key)) << key;
}

TEST(Binary, ExitCodes) {
    const auto dir = scratch_dir("binary");
    const std::string cfg = std::string(EITMEM_CONFIG_DIR) + "/rb85_storage.json";
    EXPECT_EQ(run_cli("check --config " + cfg), 0);
    EXPECT_EQ(run_cli("check --config /nonexistent.json"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("check --config " + cfg + " --b-gauss 0.3 --larmor-period-us 8"), 2);

    auto j = base_config();
    j["scheme"] = {{"F_g", 2}, {"F_gp", 2}, {"F_e", 2}};
    j["polarization"] = {{"alpha", 1}, {"beta", -1}};
    std::ofstream(dir / "bad.json") << j.dump();
    EXPECT_EQ(run_cli("check --config " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("revival --config " + (dir / "bad.json").string() + " --out " + dir.string()), 2);

    j = base_config();
    j["signal"]["amplitude"] = 1e300;
    std::ofstream(dir / "overflow.json") << j.dump();
    EXPECT_EQ(run_cli("simulate --config " + (dir / "overflow.json").string() + " --out " + dir.string()), 3);

    EXPECT_EQ(run_cli("revival --config " + cfg + " --theta 0 --t-points 9 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "revival_curve.csv"));
}
