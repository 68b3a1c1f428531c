#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <set>

#include "iavns/rng.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace iavns;

namespace {

struct Outcome {
    int code = -1;
    std::string output;  // stdout and stderr interleaved
};

Outcome run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + IAVNS_CLI_PATH + "' " + args + " 2>&1";
    Outcome o;
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) return o;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), p) != nullptr) o.output += buf.data();
    const int status = pclose(p);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

// A short straight flight that keeps each CLI invocation under a second.
fs::path tiny_config(const fs::path& dir, const std::string& extra = "") {
    const fs::path p = dir / "tiny.toml";
    test::write_file(p, "maneuver = []\n"
                        "[scenario]\n"
                        "name = \"tiny\"\n"
                        "kind = \"scenario2\"\n"
                        "t_end = 160.0\n"
                        "[campaign]\n"
                        "runs = 2\n" +
                            extra);
    return p;
}

std::set<std::string> files_in(const fs::path& dir) {
    std::set<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
    return out;
}

}  // namespace

TEST(Cli, HelpAndUnknownSubcommand) {
    EXPECT_EQ(run_cli("--help").code, 0);
    EXPECT_EQ(run_cli("").code, 1);
    EXPECT_EQ(run_cli("fly").code, 1);
    EXPECT_EQ(run_cli("run --bogus").code, 1);
}

TEST(Cli, MissingConfigNamesThePath) {
    const Outcome o = run_cli("run --config /nonexistent/dir/x.toml");
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.output.find("/nonexistent/dir/x.toml"), std::string::npos) << o.output;
}

TEST(Cli, BadFieldReportsLineAndField) {
    const auto dir = test::fresh_dir("cli_bad");
    const auto cfg = tiny_config(dir, "[noise]\nobs_noise_px = -1.0\n");
    const Outcome o = run_cli("run --config " + cfg.string());
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.output.find("obs_noise_px"), std::string::npos) << o.output;
    EXPECT_NE(o.output.find("tiny.toml:9:"), std::string::npos) << o.output;
}

TEST(Cli, BadFlagValues) {
    EXPECT_EQ(run_cli("montecarlo --runs 0").code, 1);
    EXPECT_EQ(run_cli("montecarlo --threads -1").code, 1);
    const Outcome o = run_cli("run --estimators vns,gps");
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.output.find("--estimators"), std::string::npos) << o.output;
    EXPECT_EQ(run_cli("run --preset XX").code, 1);
}

TEST(Cli, EstimatorSubsetControlsFiles) {
    const auto dir = test::fresh_dir("cli_subset");
    const auto cfg = tiny_config(dir);
    const Outcome o = run_cli("run --config " + cfg.string() + " --estimators vns,iavns --out " + (dir / "out").string());
    ASSERT_EQ(o.code, 0) << o.output;
    std::set<std::string> want = {"summary.txt"};
    for (const char* e : {"vns", "iavns"}) {
        for (const char* v : {"psi_deg", "theta_deg", "xi_deg", "attitude_deg", "altitude_m", "horizontal_m"}) {
            want.insert(std::string(e) + "_" + v + ".csv");
        }
    }
    EXPECT_EQ(files_in(dir / "out" / "tiny"), want);
}

TEST(Cli, OneRunCampaignEqualsSingleRun) {
    const auto dir = test::fresh_dir("cli_equiv");
    const auto cfg = tiny_config(dir);
    const Outcome mc = run_cli("montecarlo --config " + cfg.string() + " --runs 1 --seed 42 --out " + (dir / "a").string());
    ASSERT_EQ(mc.code, 0) << mc.output;
    const std::string seed = std::to_string(derive_run_seed(42, 0));
    const Outcome run = run_cli("run --config " + cfg.string() + " --seed " + seed + " --out " + (dir / "b").string());
    ASSERT_EQ(run.code, 0) << run.output;
    const auto names = files_in(dir / "a" / "tiny");
    ASSERT_EQ(names.size(), 19u);
    EXPECT_EQ(names, files_in(dir / "b" / "tiny"));
    for (const auto& n : names) {
        EXPECT_EQ(test::read_file(dir / "a" / "tiny" / n), test::read_file(dir / "b" / "tiny" / n)) << n;
    }
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const auto dir = test::fresh_dir("cli_repeat");
    const auto cfg = tiny_config(dir);
    for (const char* sub : {"a", "b"}) {
        const Outcome o = run_cli("montecarlo --config " + cfg.string() + " --threads 2 --out " + (dir / sub).string());
        ASSERT_EQ(o.code, 0) << o.output;
    }
    for (const auto& n : files_in(dir / "a" / "tiny")) {
        EXPECT_EQ(test::read_file(dir / "a" / "tiny" / n), test::read_file(dir / "b" / "tiny" / n)) << n;
    }
}

TEST(Cli, CheckPassesOnShippedConfigs) {
    for (const char* name : {"scenario1.toml", "scenario2.toml"}) {
        const Outcome o = run_cli(std::string("check --config ") + IAVNS_CONFIG_DIR + "/" + name);
        EXPECT_EQ(o.code, 0) << o.output;
        EXPECT_EQ(o.output.find("FAIL"), std::string::npos) << o.output;
    }
    EXPECT_EQ(run_cli("check").code, 0);
}

TEST(Cli, CorruptedTableFailsCheck) {
    const auto dir = test::fresh_dir("cli_corrupt");
    const auto cfg = tiny_config(dir, "[adjustment]\ndtheta1_max = 0.001\n");
    const Outcome o = run_cli("check --config " + cfg.string());
    EXPECT_EQ(o.code, 3) << o.output;
    EXPECT_NE(o.output.find("FAIL activation_table"), std::string::npos) << o.output;
}

TEST(Cli, OutputDirectoryPrecedence) {
    const auto dir = test::fresh_dir("cli_outdir");
    const auto cfg = tiny_config(dir, "[output]\ndir = \"" + (dir / "from_file").string() + "\"\n");
    test::write_file(dir / "with_dir.toml", test::read_file(cfg));
    const auto plain = tiny_config(dir);
    const std::string env = "IAVNS_OUT_DIR='" + (dir / "from_env").string() + "'";

    ASSERT_EQ(run_cli("run --config " + plain.string(), env).code, 0);
    EXPECT_TRUE(fs::exists(dir / "from_env" / "tiny" / "summary.txt"));

    ASSERT_EQ(run_cli("run --config " + (dir / "with_dir.toml").string(), env).code, 0);
    EXPECT_TRUE(fs::exists(dir / "from_file" / "tiny" / "summary.txt"));

    ASSERT_EQ(run_cli("run --config " + (dir / "with_dir.toml").string() + " --out " + (dir / "from_flag").string(), env)
                  .code,
              0);
    EXPECT_TRUE(fs::exists(dir / "from_flag" / "tiny" / "summary.txt"));
}

TEST(Cli, FlagsOverrideConfig) {
    const auto dir = test::fresh_dir("cli_override");
    const auto cfg = tiny_config(dir);
    const Outcome o = run_cli("montecarlo --config " + cfg.string() + " --runs 5 --seed 9 --preset UR --print-config");
    ASSERT_EQ(o.code, 0) << o.output;
    EXPECT_NE(o.output.find("runs = 5"), std::string::npos) << o.output;
    EXPECT_NE(o.output.find("master_seed = 9"), std::string::npos);
    EXPECT_NE(o.output.find("t_end = 160"), std::string::npos);
}

TEST(Cli, UnwritableOutputIsARuntimeError) {
    const auto dir = test::fresh_dir("cli_unwritable");
    const auto cfg = tiny_config(dir);
    test::write_file(dir / "blocker", "not a directory");
    const Outcome o = run_cli("run --config " + cfg.string() + " --out " + (dir / "blocker" / "sub").string());
    EXPECT_EQ(o.code, 2) << o.output;
    EXPECT_NE(o.output.find("blocker"), std::string::npos) << o.output;
}
