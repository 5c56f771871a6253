#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cellwave_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("cellwave_cli_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json reference_config() {
    return json::parse(R"({"params": {"gamma": 1, "chi": 2.5, "a": 1, "M": 3.141592653589793, "R0": 1, "p1": 6,
                                      "force": {"kind": "hill", "L": 2, "alpha": 1}}})");
}

struct Result {
    int code;
    std::string out, err;
};

class Cli : public ::testing::Test {
protected:
    TempDir dir;

    fs::path write_config(const json& cfg, const std::string& name = "config.json") {
        const auto p = dir.path() / name;
        std::ofstream(p) << cfg.dump();
        return p;
    }

    Result run(std::vector<std::string> args) {
        args.insert(args.begin(), "cellwave");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cellwave::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }
};

}  // namespace

TEST_F(Cli, ThresholdReportsCertificate) {
    const auto cfg = write_config(reference_config());
    auto r = run({"threshold", "--config", cfg.string(), "--chi", "1", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_DOUBLE_EQ(doc["chi_star"].get<double>(), 2.0);
    EXPECT_TRUE(doc["nonexistence_certificate"]["holds"].get<bool>());
    EXPECT_DOUBLE_EQ(doc["nonexistence_certificate"]["sup_value"].get<double>(), 0.5);

    r = run({"threshold", "--config", cfg.string(), "--out", dir.path().string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("chi_star"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir.path() / "threshold.json"));
}

TEST_F(Cli, UsageErrors) {
    auto bad = reference_config();
    bad["params"].erase("gamma");
    auto r = run({"threshold", "--config", write_config(bad).string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("gamma"), std::string::npos);

    r = run({"threshold", "--config", (dir.path() / "absent.json").string()});
    EXPECT_EQ(r.code, 2);

    r = run({"threshold"});
    EXPECT_EQ(r.code, 2);

    r = run({"frobnicate", "--config", "x"});
    EXPECT_EQ(r.code, 2);

    auto unknown = reference_config();
    unknown["tolerance"] = 1;
    EXPECT_EQ(run({"threshold", "--config", write_config(unknown).string()}).code, 2);

    auto table = reference_config();
    table["params"]["force"] = json::parse(R"({"kind": "table", "rows": [[0, 0, 1, 0, 0], [1, 0.5, 1, 0, 0]]})");
    EXPECT_EQ(run({"threshold", "--config", write_config(table).string()}).code, 2);

    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, TravelingWavePreconditionAndNegativeResult) {
    const auto cfg = write_config(reference_config());
    auto r = run({"tw", "--config", cfg.string(), "--p1", "4"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("p1"), std::string::npos);

    const auto out = dir.path() / "none";
    r = run({"tw", "--config", cfg.string(), "--chi", "1.5", "--out", out.string(), "--json"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.out)["status"], "no_traveling_wave");
    EXPECT_FALSE(fs::exists(out / "wave.json"));
}

TEST_F(Cli, TravelingWaveWritesOutputs) {
    const auto cfg = write_config(reference_config());
    const auto out = dir.path() / "wave";
    auto r = run({"tw", "--config", cfg.string(), "--chi", "2.9", "--out", out.string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_NEAR(doc["V"].get<double>(), 4.538263305531, 1e-8);
    EXPECT_TRUE(doc["diagnostics"]["passed"].get<bool>());
    for (const char* f : {"boundary.csv", "shape.svg", "wave.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_EQ(slurp(out / "boundary.csv").rfind("x,y,nx,ny\n", 0), 0u);
    const auto wave = json::parse(slurp(out / "wave.json"));
    EXPECT_EQ(wave["grid"]["x"].size(), wave["grid"]["Y"].size());
}

TEST_F(Cli, OutputsAreDeterministic) {
    const auto cfg = write_config(reference_config());
    const auto a = dir.path() / "a", b = dir.path() / "b";
    ASSERT_EQ(run({"tw", "--config", cfg.string(), "--chi", "2.9", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"tw", "--config", cfg.string(), "--chi", "2.9", "--out", b.string()}).code, 0);
    for (const char* f : {"boundary.csv", "shape.svg", "wave.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST_F(Cli, SpectrumMatchesUncoupledValues) {
    const auto cfg = write_config(reference_config());
    auto r = run({"spectrum", "--config", cfg.string(), "--kappa", "0", "--modes", "0,1,2,3", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    ASSERT_EQ(doc["modes"].size(), 4u);
    EXPECT_FALSE(doc["unstable"].get<bool>());
    EXPECT_TRUE(doc["leading_eigenvalue_approx"].is_null());
    const double x11 = 3.8317059702075125;  // first zero of J_1
    EXPECT_NEAR(doc["modes"][0]["eigenvalues"][0].get<double>(), -x11 * x11, 1e-8);
    EXPECT_NEAR(doc["modes"][2]["eigenvalues"][0].get<double>(), -6.0, 1e-8);
}

TEST_F(Cli, SpectrumStabilityAcrossThreshold) {
    const auto cfg = write_config(reference_config());
    const auto out = dir.path() / "spec";
    auto r = run({"spectrum", "--config", cfg.string(), "--kappa", "1.1", "--out", out.string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["unstable"].get<bool>());
    EXPECT_GT(doc["modes"][1]["leading"].get<double>(), 0.0);
    EXPECT_NEAR(doc["leading_eigenvalue_approx"].get<double>(), 0.8 / 1.9, 1e-12);
    EXPECT_TRUE(fs::exists(out / "spectrum.json"));
    EXPECT_TRUE(fs::exists(out / "dispersion_m1.csv"));

    r = run({"spectrum", "--config", cfg.string(), "--kappa", "0.8", "--json"});
    doc = json::parse(r.out);
    EXPECT_FALSE(doc["unstable"].get<bool>());
    for (const auto& m : doc["modes"])
        for (const auto& l : m["eigenvalues"]) EXPECT_LE(l.get<double>(), 0.0);

    r = run({"spectrum", "--config", cfg.string(), "--json"});
    doc = json::parse(r.out);
    EXPECT_DOUBLE_EQ(doc["kappa_act"].get<double>(), 1.25);
    EXPECT_DOUBLE_EQ(doc["chi_star"].get<double>(), 2.0);
}

TEST_F(Cli, BifurcationClassification) {
    auto r = run({"bifurcate", "--config", write_config(reference_config()).string(), "--json"});
    ASSERT_EQ(r.code, 0);
    auto doc = json::parse(r.out);
    EXPECT_EQ(doc["classification"], "supercritical");
    EXPECT_NEAR(doc["eta"].get<double>(), std::numbers::pi / 8, 1e-10);

    auto degenerate = reference_config();
    degenerate["params"]["force"]["alpha"] = 0.5;
    r = run({"bifurcate", "--config", write_config(degenerate).string(), "--json"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["classification"], "degenerate");
}

TEST_F(Cli, SweepReportsFailuresPerRow) {
    const auto cfg = write_config(reference_config());
    const auto out = dir.path() / "sweep";
    auto r = run({"sweep", "--config", cfg.string(), "--chis", "2.9,1.5", "--out", out.string()});
    EXPECT_EQ(r.code, 1);
    const auto csv = slurp(out / "branch.csv");
    EXPECT_EQ(csv, r.out);
    std::istringstream in(csv);
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    EXPECT_EQ(header, "chi,V,xL,xR,area,c1,errors");
    EXPECT_EQ(first.rfind("1.5,,,,,,\"", 0), 0u) << first;
    EXPECT_EQ(second.rfind("2.9,4.5382633", 0), 0u) << second;

    EXPECT_EQ(run({"sweep", "--config", cfg.string()}).code, 2);
}

TEST_F(Cli, BuiltBinaryExitCodes) {
    const auto cfg = write_config(reference_config());
    auto status = [&](const std::string& args) {
        const std::string cmd = std::string(CELLWAVE_EXE) + " " + args + " > " + (dir.path() / "log").string() + " 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("threshold --config " + cfg.string()), 0);
    EXPECT_EQ(status("tw --config " + cfg.string() + " --p1 4"), 2);
    EXPECT_EQ(status("tw --config " + cfg.string() + " --chi 1.5"), 1);
    EXPECT_EQ(status("bogus"), 2);
}
