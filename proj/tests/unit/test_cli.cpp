#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("gevrey_ns_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Result run_cli(const std::string& args, const fs::path& dir)
{
    const fs::path log = dir / "cli.log";
    const std::string cmd = std::string("\"") + GEVREY_NS_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string config(const std::string& name) { return std::string(GEVREY_NS_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, StokesVerifySingleMode)
{
    const fs::path dir = scratch_dir("stokes");
    const Result r = run_cli("stokes-verify --config " + config("single_mode.json") + " --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(j.at("command"), "stokes-verify");
    EXPECT_EQ(j.at("verdict"), "pass");
    for (const auto& row : j.at("rows")) {
        EXPECT_LE(std::abs(row.at("residual").get<double>()), 1e-10);
    }
}

TEST(Cli, AuditLemmasPasses)
{
    const fs::path dir = scratch_dir("audit");
    const Result r = run_cli("audit-lemmas --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir / "audit_ccc0.csv"));
    EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Cli, MissingConfigExitsTwo)
{
    const fs::path dir = scratch_dir("missing");
    const Result r = run_cli("check-thm1 --config /nonexistent/x.json --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("cannot open config"), std::string::npos) << r.output;
}

TEST(Cli, UnknownFlagExitsTwoWithUsage)
{
    const fs::path dir = scratch_dir("flag");
    const Result r = run_cli("stokes-verify --frobnicate", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("stokes-verify"), std::string::npos) << r.output;
    EXPECT_EQ(run_cli("", dir).code, 2);
    EXPECT_EQ(run_cli("no-such-command", dir).code, 2);
}

TEST(Cli, InvalidConfigExitsTwo)
{
    const fs::path dir = scratch_dir("invalid");
    std::ofstream(dir / "bad.json") << R"({"grid": 32, "colour": "blue"})";
    const Result r = run_cli("ns-run --config " + (dir / "bad.json").string() + " --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("colour"), std::string::npos) << r.output;
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns)
{
    const fs::path a = scratch_dir("repeat_a");
    const fs::path b = scratch_dir("repeat_b");
    const std::string args = " --config " + config("single_mode.json") + " --seed 11 --out ";
    ASSERT_EQ(run_cli("stokes-verify" + args + a.string(), a).code, 0);
    ASSERT_EQ(run_cli("stokes-verify" + args + b.string(), b).code, 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    const std::string audit = " --alpha 0.5 1 --out ";
    ASSERT_EQ(run_cli("audit-lemmas" + audit + a.string(), a).code, 0);
    ASSERT_EQ(run_cli("audit-lemmas" + audit + b.string(), b).code, 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "audit_ccc0.csv"), slurp(b / "audit_ccc0.csv"));
}

TEST(Cli, NsRunWritesTrajectory)
{
    const fs::path dir = scratch_dir("nsrun");
    std::ofstream(dir / "tg.json") << R"({"grid": 16, "dt": 0.001, "t_end": 0.1,
        "snapshots": {"schedule": [{"until": 0.1, "stride": 10}]},
        "initial": {"type": "taylor_green", "amplitude": 1.0}})";
    const Result r = run_cli("ns-run --json --config " + (dir / "tg.json").string() + " --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string csv = slurp(dir / "trajectory.csv");
    EXPECT_EQ(csv.rfind("t,", 0), 0u) << csv.substr(0, 80);
    int lines = 0;
    for (char c : csv) {
        lines += c == '\n' ? 1 : 0;
    }
    EXPECT_EQ(lines, 12);
}
