#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace gencs::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("gencs_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

const std::vector<std::string> kSmall = {"--k", "3", "--layers", "20,40", "--m", "15",
                                         "--trials", "2", "--max-iters", "200"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST_F(CliTest, RhoTable) {
  ASSERT_EQ(run({"rho-table", "--max-d", "3", "--out", dir("o")}), kExitOk) << err_.str();
  const std::string csv = slurp(root_ / "o" / "rho_table.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "d,rho_d,one_minus_rho_bound");
  EXPECT_NE(csv.find("\n2,3.18309886184e-01,8.33333333333e+01\n"), std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(root_ / "o" / "run_manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "rho-table");
  EXPECT_EQ(manifest["max_d"], 3);
}

TEST_F(CliTest, MissingConfigIsUsageErrorWithoutOutputs) {
  EXPECT_EQ(run({"sweep-success", "--config", dir("absent.json"), "--out", dir("o")}), kExitUsage);
  EXPECT_FALSE(fs::exists(root_ / "o"));
  EXPECT_NE(err_.str().find("config"), std::string::npos);
}

TEST_F(CliTest, ParseErrors) {
  EXPECT_EQ(run({}), kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run({"trace", "--bogus"}), kExitUsage);
  EXPECT_EQ(run({"trace", "--snr", "loud", "--out", dir("o")}), kExitUsage);
  EXPECT_EQ(run({"check-wdc", "--layer", "3", "--out", dir("o")}), kExitUsage);
  EXPECT_FALSE(fs::exists(root_ / "o"));
}

TEST_F(CliTest, Help) {
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("sweep-success"), std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfig) {
  {
    std::ofstream cfg(root_ / "c.json");
    cfg << R"({"k": [4], "layers": [20, 40], "m": 15, "trials": 5, "base_seed": 9,
              "solver": {"max_iters": 100}})";
  }
  ASSERT_EQ(run({"sweep-success", "--config", dir("c.json"), "--trials", "2", "--out", dir("o")}),
            kExitOk)
      << err_.str();
  const auto manifest = nlohmann::json::parse(slurp(root_ / "o" / "run_manifest.json"));
  EXPECT_EQ(manifest["config"]["trials"], 2);
  EXPECT_EQ(manifest["config"]["base_seed"], 9);
  EXPECT_EQ(manifest["config"]["k"][0], 4);
  EXPECT_TRUE(fs::exists(root_ / "o" / "sweep_success.csv"));
  EXPECT_TRUE(fs::exists(root_ / "o" / "sweep_success_trials.csv"));
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const std::vector<std::vector<std::string>> commands = {
      with({"recover"}, kSmall),
      with({"sweep-success", "--svg"}, kSmall),
      with({"sweep-noise", "--snr", "40,inf"}, kSmall),
      with({"trace", "--snr", "40,80,inf", "--svg"}, kSmall),
      with({"check-wdc", "--samples", "30"}, kSmall),
      with({"check-rric", "--samples", "30"}, kSmall),
      {"rho-table", "--max-d", "10"},
  };
  for (const auto& cmd : commands) {
    ASSERT_EQ(run(with(cmd, {"--out", dir("a")})), kExitOk) << cmd[0] << ": " << err_.str();
    ASSERT_EQ(run(with(cmd, {"--out", dir("b")})), kExitOk) << cmd[0] << ": " << err_.str();
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(root_ / "a")) {
      const auto name = entry.path().filename();
      if (name == "run_manifest.json") continue;  // records the output directory
      EXPECT_EQ(slurp(entry.path()), slurp(root_ / "b" / name)) << cmd[0] << " " << name;
      ++compared;
    }
    EXPECT_GT(compared, 0) << cmd[0];
    fs::remove_all(root_ / "a");
    fs::remove_all(root_ / "b");
  }
}

TEST_F(CliTest, DivergenceIsRuntimeErrorWithoutOutputs) {
  EXPECT_EQ(run(with({"recover", "--step-size", "1e300", "--out", dir("o")}, kSmall)), kExitRuntime);
  EXPECT_FALSE(fs::exists(root_ / "o"));
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  const fs::path cwd = fs::current_path();
  fs::current_path(root_);
  ::setenv("GENCS_OUT_DIR", dir("env_out").c_str(), 1);
  const int code = run({"rho-table", "--max-d", "2"});
  ::unsetenv("GENCS_OUT_DIR");
  fs::current_path(cwd);
  EXPECT_EQ(code, kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "env_out" / "rho_table.csv"));
}

TEST_F(CliTest, RecoverWritesResult) {
  ASSERT_EQ(run(with({"recover", "--out", dir("o")}, kSmall)), kExitOk) << err_.str();
  const auto result = nlohmann::json::parse(slurp(root_ / "o" / "recover_result.json"));
  EXPECT_EQ(result["k"], 3);
  EXPECT_EQ(result["x_hat"].size(), 3u);
  EXPECT_EQ(result["network"]["dims"], nlohmann::json({3, 20, 40}));
  const std::string trace = slurp(root_ / "o" / "recover_trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "iter,f,grad_norm,negated,rel_err");
}

TEST_F(CliTest, ConditionSummaries) {
  ASSERT_EQ(run(with({"check-wdc", "--samples", "10", "--layer", "2", "--out", dir("o")}, kSmall)),
            kExitOk)
      << err_.str();
  const auto wdc = nlohmann::json::parse(slurp(root_ / "o" / "wdc_summary.json"));
  EXPECT_EQ(wdc["kind"], "WDC");
  EXPECT_EQ(wdc["samples"], 10);
  ASSERT_EQ(run(with({"check-rric", "--samples", "10", "--out", dir("o")}, kSmall)), kExitOk);
  const auto rric = nlohmann::json::parse(slurp(root_ / "o" / "rric_summary.json"));
  EXPECT_EQ(rric["kind"], "RRIC");
  EXPECT_TRUE(fs::exists(root_ / "o" / "rric_samples.csv"));
}

}  // namespace
}  // namespace gencs::cli
