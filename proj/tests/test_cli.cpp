#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dtdob_cli/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(DTDOB_FIXTURE_DIR) + "/" + name + ".json"; }

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> lines(const fs::path& p) {
    std::vector<std::string> out;
    std::ifstream f(p);
    for (std::string l; std::getline(f, l);) out.push_back(l);
    return out;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               ("dtdob_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the installed tool with stdout and stderr captured under the scratch directory.
    int run(const std::string& cmd, const std::string& config, const std::string& extra = "",
            const std::string& outdir = "out") {
        fs::create_directories(dir_ / outdir);
        const std::string line = std::string(DTDOB_CLI_PATH) + " " + cmd + " --config '" + config + "' --out '" +
                                 (dir_ / outdir).string() + "' " + extra + " >'" + (dir_ / "stdout.txt").string() +
                                 "' 2>'" + (dir_ / "stderr.txt").string() + "'";
        const int status = std::system(line.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    // Fixture with a JSON patch applied, written into the scratch directory.
    std::string patched(const std::string& name, const json& patch) {
        json j = load_json(fixture(name));
        j.merge_patch(patch);
        const fs::path p = dir_ / (name + "_patched.json");
        std::ofstream(p) << j.dump(2);
        return p.string();
    }

    fs::path out(const std::string& file, const std::string& outdir = "out") const { return dir_ / outdir / file; }
    std::string err() const { return slurp(dir_ / "stderr.txt"); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DiscretizeDoubleIntegratorZoh) {
    ASSERT_EQ(run("discretize", fixture("double_integrator"), "--method zoh"), 0);
    const json j = load_json(out("discretize.json"));
    EXPECT_EQ(j["method"], "zoh");
    ASSERT_EQ(j["sampling_zeros"].size(), 1u);
    EXPECT_NEAR(j["sampling_zeros"][0][0].get<double>(), -1.0, 1e-12);
    EXPECT_TRUE(j["intrinsic_zeros"].empty());
    const auto num_w = j["num_w"].get<std::vector<double>>();
    const double lead = j["den_w"].back().get<double>();
    ASSERT_EQ(num_w.size(), 2u);
    EXPECT_NEAR(num_w[0] / lead, 0.01, 1e-15);
    EXPECT_NEAR(num_w[1] / lead, 0.005, 1e-15);
}

TEST_F(CliTest, DiscretizeFirstOrderLagFdm) {
    ASSERT_EQ(run("discretize", fixture("first_order_lag"), "--method fdm --delta 0.1"), 0);
    const json j = load_json(out("discretize.json"));
    EXPECT_NEAR(j["poles"][0][0].get<double>(), 0.9, 1e-14);
    EXPECT_FALSE(j.contains("sampling_zeros"));
}

TEST_F(CliTest, MalformedConfigsExitTwo) {
    EXPECT_EQ(run("discretize", fixture("malformed_unknown_key")), 2);
    EXPECT_NE(err().find("sampling_time"), std::string::npos);
    EXPECT_EQ(run("discretize", fixture("malformed_syntax")), 2);
    EXPECT_EQ(run("discretize", (dir_ / "missing.json").string()), 2);
    EXPECT_EQ(run("discretize", fixture("double_integrator"), "--method euler"), 2);
    EXPECT_EQ(run("discretize", fixture("double_integrator"), "--delta -1"), 2);
    EXPECT_EQ(run("design", fixture("benchmark_proposed")), 2);
}

TEST_F(CliTest, MissingConfigOrSubcommandExitsTwo) {
    std::ostringstream o, e;
    const char* no_config[] = {"dtdob", "check"};
    EXPECT_EQ(dtdob::cli::run(2, no_config, o, e), dtdob::cli::kConfigError);
    const char* no_sub[] = {"dtdob", "--config", "x.json"};
    EXPECT_EQ(dtdob::cli::run(3, no_sub, o, e), dtdob::cli::kConfigError);
    const char* help[] = {"dtdob", "--help"};
    EXPECT_EQ(dtdob::cli::run(2, help, o, e), dtdob::cli::kOk);
    EXPECT_NE(o.str().find("simulate"), std::string::npos);
}

TEST_F(CliTest, CheckVerdicts) {
    // the benchmark family reaches g = 4.8, where the proposed filter's fast polynomial leaves the disk
    EXPECT_EQ(run("check", fixture("benchmark_proposed")), 1);
    json v = load_json(out("verdict.json"));
    EXPECT_EQ(v["item_a"]["verdict"], "pass");
    EXPECT_EQ(v["item_b"]["verdict"], "pass");
    EXPECT_EQ(v["item_c"]["verdict"], "fail");
    EXPECT_EQ(v["grid_points"], 101);
    EXPECT_TRUE(v["sampling_period"]["valid"].get<bool>());

    EXPECT_EQ(run("check", fixture("benchmark_bt_a0_0.15")), 1);
    EXPECT_EQ(run("check", fixture("marginal")), 4);
    EXPECT_EQ(load_json(out("verdict.json"))["overall"], "inconclusive");

    // the proposed filter passes once the gain range stops short of the failing region
    const std::string narrow = patched("benchmark_proposed", {{"plant_family", {{"K", {0.8, 1.0}}, {"M1", {0.6, 2.0}}, {"M2", {0.6, 2.0}}}}});
    EXPECT_EQ(run("check", narrow), 0);
    EXPECT_EQ(load_json(out("verdict.json"))["item_c"]["note"], "pass (grid)");
}

TEST_F(CliTest, DesignDirectAndIndirect) {
    ASSERT_EQ(run("design", fixture("design_direct_fdm")), 0);
    const json d = load_json(out("design.json"));
    EXPECT_NEAR(d["k_bar"].get<double>(), 0.8709426578213982, 1e-8);
    EXPECT_NEAR(d["a0"].get<double>(), 0.8 / 4.8 * 0.8709426578213982, 1e-8);

    ASSERT_EQ(run("design", fixture("design_direct_bdm")), 0);
    EXPECT_NEAR(load_json(out("design.json"))["k_bar"].get<double>(), 0.5481378084552923, 1e-8);

    EXPECT_EQ(run("design", fixture("design_direct_bt")), 3);
    EXPECT_NE(err().find("MethodNotSchur"), std::string::npos);

    EXPECT_EQ(run("design", fixture("design_indirect_psi_10_3")), 3);
    EXPECT_NE(err().find("CtDesignInvalid"), std::string::npos);
}

TEST_F(CliTest, ContourRowsAndDegenerateDelta) {
    ASSERT_EQ(run("contour", fixture("benchmark_proposed")), 0);
    const auto rows = lines(out("contour.csv"));
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0], "delta,kind,re_z,im_z,re_gamma,im_gamma,partition");
    int fast = 0, slow = 0, ref = 0, ambiguous = 0;
    for (size_t i = 1; i < rows.size(); ++i) {
        fast += rows[i].find(",fast,") != std::string::npos;
        slow += rows[i].find(",slow,") != std::string::npos;
        ref += rows[i].rfind("0,ref_", 0) == 0;
        ambiguous += rows[i].find("ambiguous") != std::string::npos;
    }
    EXPECT_EQ(fast, 50 * 4);
    EXPECT_EQ(slow, 50 * 6);
    EXPECT_EQ(ref, 4 + 6);
    EXPECT_EQ(ambiguous, 0);

    ASSERT_EQ(run("contour", fixture("benchmark_proposed"), "--delta 0.01", "single"), 0);
    EXPECT_EQ(lines(out("contour.csv", "single")).size(), 1u + 10u + 10u);

    EXPECT_EQ(run("contour", fixture("benchmark_proposed"), "--delta 3"), 3);
    EXPECT_NE(err().find("DegenerateSamplingPeriod"), std::string::npos);
}

TEST_F(CliTest, SimulateBoundedAndDivergent) {
    ASSERT_EQ(run("simulate", fixture("benchmark_proposed")), 0);
    json m = load_json(out("metadata.json"));
    EXPECT_FALSE(m["divergent"].get<bool>());
    EXPECT_EQ(m["samples"], 10000);
    EXPECT_TRUE(m["out_of_family"].get<bool>());
    EXPECT_FALSE(m["parameters_in_box"].get<bool>());
    const auto trace = lines(out("trace.csv"));
    EXPECT_EQ(trace.size(), 10001u);
    EXPECT_EQ(trace[0], "t,y,u,d");
    EXPECT_FALSE(fs::exists(out("trace_ct.csv")));

    ASSERT_EQ(run("simulate", fixture("benchmark_indirect_tau_0.025"), "", "div"), 0);
    m = load_json(out("metadata.json", "div"));
    EXPECT_TRUE(m["divergent"].get<bool>());
    EXPECT_LT(m["samples"].get<int>(), 10000);
}

TEST_F(CliTest, SimulateZeroHorizonAndContinuousTrace) {
    const std::string zero = patched("benchmark_proposed", {{"simulation", {{"horizon", 0.0}}}});
    ASSERT_EQ(run("simulate", zero), 0);
    EXPECT_EQ(load_json(out("metadata.json"))["samples"], 0);
    EXPECT_EQ(lines(out("trace.csv")), std::vector<std::string>{"t,y,u,d"});

    const std::string ct = patched("benchmark_proposed", {{"simulation", {{"horizon", 0.15}, {"record_ct", true}}}});
    ASSERT_EQ(run("simulate", ct, "--substeps 4", "ct"), 0);
    EXPECT_EQ(lines(out("trace_ct.csv", "ct")).size(), 1u + 41u);
}

TEST_F(CliTest, FrequencyResponses) {
    ASSERT_EQ(run("freq", fixture("benchmark_proposed")), 0);
    const auto q = lines(out("freq_q.csv"));
    ASSERT_EQ(q.size(), 201u);
    EXPECT_EQ(q[0], "omega,re,im,mag_db,phase_deg,pole_proximity");
    // |Q| -> 0 dB at low frequency
    std::stringstream row(q[1]);
    std::vector<double> cells;
    for (std::string c; std::getline(row, c, ',');) cells.push_back(std::stod(c));
    EXPECT_NEAR(cells[3], 0.0, 1e-3);
    EXPECT_EQ(cells[5], 0.0);
    EXPECT_TRUE(fs::exists(out("freq_sensitivity.csv")));

    const std::string empty = patched("benchmark_proposed", {{"freq", {{"log_range", nullptr}, {"omegas", json::array()}}}});
    ASSERT_EQ(run("freq", empty, "", "empty"), 0);
    EXPECT_EQ(lines(out("freq_q.csv", "empty")), std::vector<std::string>{"omega,re,im,mag_db,phase_deg,pole_proximity"});
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRuns) {
    for (const char* cmd : {"check", "contour", "simulate", "freq"}) {
        ASSERT_LE(run(cmd, fixture("benchmark_bdm_a0_0.15"), "", "a"), 1) << cmd;
        ASSERT_LE(run(cmd, fixture("benchmark_bdm_a0_0.15"), "", "b"), 1) << cmd;
    }
    size_t compared = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "a")) {
        const fs::path other = dir_ / "b" / e.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
        ++compared;
    }
    EXPECT_GE(compared, 6u);
}
