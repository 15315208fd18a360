#include <gtest/gtest.h>

#include <islm/cli.hpp>

#include "support.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <string>

using namespace islm;
using support::run_cli;

namespace {

std::string cfg(const std::string& rel) { return support::config_path(rel).string(); }

// Writes a config that pulls in the shipped reference model.
std::string write_config(const support::TempDir& dir, const std::string& body) {
    const auto path = dir / "run.yaml";
    write_file(path, "model: " + cfg("models/reference.yaml") + "\n" + body);
    return path.string();
}

int run_binary(const std::string& args, const std::filesystem::path& stderr_path, const std::string& env = "") {
    const std::string cmd = env + " \"" ISLM_CLI_PATH "\" " + args + " >/dev/null 2>\"" + stderr_path.string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ValidateWritesResultAndProvenance) {
    support::TempDir out("cli_validate");
    EXPECT_EQ(run_cli({"validate", "--config", cfg("reference.yaml"), "--out", out.path().string(), "--quiet"}),
              cli::kOk);
    EXPECT_TRUE(std::filesystem::exists(out / "validation.json"));
    const auto prov = nlohmann::json::parse(read_file(out / "provenance.json"));
    EXPECT_EQ(prov.at("command"), "validate");
    EXPECT_EQ(prov.at("outputs"), nlohmann::json::array({"validation.json"}));
}

TEST(Cli, IsoclineHonoursTheFormatList) {
    support::TempDir out("cli_iso");
    EXPECT_EQ(run_cli({"isocline", "--config", cfg("reference.yaml"), "--out", out.path().string(), "--format", "csv",
                       "--quiet"}),
              cli::kOk);
    EXPECT_TRUE(std::filesystem::exists(out / "isocline.csv"));
    EXPECT_FALSE(std::filesystem::exists(out / "isocline.json"));
    EXPECT_FALSE(std::filesystem::exists(out / "portrait.svg"));
}

TEST(Cli, ZeroHorizonGivesAHeaderOnlyTrajectory) {
    support::TempDir out("cli_t0");
    const auto path = write_config(out, "simulate: {t_end: 0, branch: A1}\n");
    EXPECT_EQ(run_cli({"simulate", "--config", path, "--out", (out / "o").string(), "--quiet"}), cli::kOk);
    EXPECT_EQ(read_file(out / "o/trajectory.csv"), "t,Y,R,regime\n");
}

TEST(Cli, FullModeReportsSlowTime) {
    support::TempDir out("cli_full");
    const auto path = write_config(out, "simulate: {t_end: 5, y0: 5.5, branch: A1, stride: 0.01}\n");
    EXPECT_EQ(run_cli({"simulate", "--config", path, "--out", (out / "o").string(), "--mode", "full", "--epsilon",
                       "0.01", "--quiet"}),
              cli::kOk);
    const auto tr = parse_trajectory_csv(read_file(out / "o/trajectory.csv"));
    ASSERT_FALSE(tr.samples.empty());
    EXPECT_NEAR(tr.samples.back().t, 5.0, 1e-9);
    const auto doc = parse_result(read_file(out / "o/simulate.json"));
    EXPECT_EQ(doc.mode, "full-epsilon");
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    support::TempDir a("cli_det_a"), b("cli_det_b");
    for (const auto* d : {&a, &b})
        ASSERT_EQ(run_cli({"simulate", "--config", cfg("reference.yaml"), "--out", d->path().string(), "--quiet"}),
                  cli::kOk);
    EXPECT_EQ(read_file(a / "trajectory.csv"), read_file(b / "trajectory.csv"));
    EXPECT_EQ(read_file(a / "simulate.json"), read_file(b / "simulate.json"));
}

TEST(Cli, ValidationFailuresExitOne) {
    support::TempDir out("cli_bad");
    const auto o = out.path().string();
    EXPECT_EQ(run_cli({"validate", "--config", cfg("reference.yaml"), "--out", o, "--epsilon", "-1", "--quiet"}),
              cli::kValidation);
    EXPECT_EQ(run_cli({"validate", "--config", cfg("reference.yaml"), "--out", o, "--format", "pdf", "--quiet"}),
              cli::kValidation);
    EXPECT_EQ(run_cli({"validate", "--config", (out / "missing.yaml").string(), "--quiet"}), cli::kValidation);
    EXPECT_EQ(run_cli({"frobnicate", "--config", cfg("reference.yaml")}), cli::kValidation);
    EXPECT_EQ(run_cli({"scenario", "--config", cfg("reference.yaml"), "--out", o, "--quiet"}), cli::kValidation);

    support::TempDir bad("cli_bad_cfg");
    const auto broken = bad / "run.yaml";
    std::string model = read_file(support::config_path("models/reference.yaml"));
    model.replace(model.find("i_y: 0.3"), 8, "i_y: 1.2");
    write_file(bad / "model.yaml", model);
    write_file(broken, "model: model.yaml\n");
    EXPECT_EQ(run_cli({"validate", "--config", broken.string(), "--out", o, "--quiet"}), cli::kValidation);
}

TEST(Cli, UnsolvablePlanExitsTwo) {
    support::TempDir out("cli_plan");
    EXPECT_EQ(run_cli({"stabilize", "--config", cfg("scenarios/stabilize_money.yaml"), "--out", out.path().string(),
                       "--quiet"}),
              cli::kNumerical);
    const auto doc = parse_result(read_file(out / "stabilize.json"));
    ASSERT_TRUE(doc.plan.has_value());
    EXPECT_FALSE(doc.plan->solvable);
}

TEST(Cli, LockedOutputDirectoryIsRefused) {
    support::TempDir out("cli_lock");
    DirectoryLock held(out.path());
    EXPECT_EQ(run_cli({"validate", "--config", cfg("reference.yaml"), "--out", out.path().string(), "--quiet"}),
              cli::kValidation);
    EXPECT_FALSE(std::filesystem::exists(out / "validation.json"));
}

TEST(CliBinary, ExitCodes) {
    support::TempDir out("bin");
    const auto err = out / "stderr.txt";
    const auto o = " --out \"" + (out / "o").string() + "\"";
    EXPECT_EQ(run_binary("validate --config \"" + cfg("reference.yaml") + "\"" + o + " --quiet", err), 0);
    EXPECT_EQ(run_binary("validate --config \"" + cfg("reference.yaml") + "\"" + o + " --epsilon 0", err), 1);
    EXPECT_EQ(run_binary("stabilize --config \"" + cfg("scenarios/stabilize_money.yaml") + "\"" + o + " --quiet", err),
              2);
    EXPECT_NE(read_file(err).find("numerical failure"), std::string::npos);
}

TEST(CliBinary, LogLevelFromTheEnvironment) {
    support::TempDir out("binlog");
    const auto err = out / "stderr.txt";
    const auto args = "isocline --config \"" + cfg("reference.yaml") + "\" --out \"" + (out / "o").string() + "\"";
    ASSERT_EQ(run_binary(args, err, "ISLM_LOG=info"), 0);
    EXPECT_NE(read_file(err).find("islm: info: 3 branches, 2 folds"), std::string::npos) << read_file(err);
    ASSERT_EQ(run_binary(args, err, "ISLM_LOG=warn"), 0);
    EXPECT_EQ(read_file(err).find("info"), std::string::npos);
    ASSERT_EQ(run_binary(args + " --quiet", err, "ISLM_LOG=debug"), 0);
    EXPECT_TRUE(read_file(err).empty()) << read_file(err);
}
