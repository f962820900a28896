#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccembed/errors.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace ccembed::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json tiny_config() { return json::parse(read_file(fs::path(CCEMBED_CONFIG_DIR) / "tiny.json")); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("ccembed_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  RunConfig config(const json& j) {
    Overrides ov;
    ov.out_dir = dir;
    return parse_run_config(j.dump(), ov);
  }

  fs::path dir;
  std::ostringstream log;
};

TEST(RunConfigParse, ShippedConfigsLoad) {
  for (const char* name : {"acceptance.json", "full_scale.json", "tiny.json"}) {
    const RunConfig cfg = load_run_config(fs::path(CCEMBED_CONFIG_DIR) / name);
    EXPECT_EQ(cfg.dataset.horizon, 15u) << name;
    EXPECT_EQ(cfg.scenario.dt, 0.1);
    EXPECT_EQ(cfg.digest.size(), 16u);
  }
  const RunConfig full = load_run_config(fs::path(CCEMBED_CONFIG_DIR) / "full_scale.json");
  EXPECT_EQ(full.dataset.sample_count, 2500u);
  EXPECT_EQ(full.deltas.size(), 4u);
  EXPECT_EQ(full.x0(0), -0.5);
}

TEST(RunConfigParse, MissingSectionIsNamed) {
  json j = tiny_config();
  j.erase("library");
  try {
    parse_run_config(j.dump());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("library"), std::string::npos);
  }
}

TEST(RunConfigParse, SyntaxErrorReportsLine) {
  const std::string text = "{\n  \"seed\": 1,\n  \"system\": {,\n}\n";
  try {
    parse_run_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(RunConfigParse, RejectsBadValues) {
  json j = tiny_config();
  j["scenario"]["deltas"] = json::array({1.5});
  EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
  j = tiny_config();
  j["scenario"]["deltas"] = json::array();
  EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
  j = tiny_config();
  j["kernel"]["state"]["family"] = "laplace";
  EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
  j = tiny_config();
  j["embedding"]["lambda"] = "small";
  EXPECT_THROW(parse_run_config(j.dump()), ConfigError);
}

TEST(RunConfigParse, OverridesApplyAndChangeDigest) {
  const json j = tiny_config();
  const RunConfig base = parse_run_config(j.dump());
  Overrides ov;
  ov.seed = 99;
  ov.delta = 0.2;
  ov.x0 = std::vector<double>{0, 0, 0, 0};
  const RunConfig over = parse_run_config(j.dump(), ov);
  EXPECT_EQ(over.seed, 99u);
  EXPECT_EQ(over.deltas, std::vector<double>{0.2});
  EXPECT_EQ(over.x0(0), 0.0);
  EXPECT_NE(over.digest, base.digest);
  Overrides dir_only;
  dir_only.out_dir = "/tmp/elsewhere";
  EXPECT_EQ(parse_run_config(j.dump(), dir_only).digest, base.digest);
}

TEST_F(CliTest, GenerateWritesHeaders) {
  const RunConfig cfg = config(tiny_config());
  EXPECT_EQ(cmd_generate(cfg, log), kOk);
  const OutputPaths paths{dir};
  std::ifstream in(paths.dataset());
  std::string first;
  std::getline(in, first);
  const json h = json::parse(first);
  EXPECT_EQ(h["M"], 60);
  EXPECT_EQ(h["N"], 15);
  EXPECT_EQ(h["n"], 4);
  EXPECT_EQ(h["config_digest"], cfg.digest);
  EXPECT_EQ(h["master_seed"], cfg.seed);
  std::ifstream lin(paths.library());
  std::getline(lin, first);
  EXPECT_EQ(json::parse(first)["P"], 1);
  EXPECT_NE(log.str().find("seed="), std::string::npos);
}

TEST_F(CliTest, SolveBeforeGenerateIsIoError) {
  const RunConfig cfg = config(tiny_config());
  std::ostringstream err;
  EXPECT_EQ(guarded([&] { return cmd_solve(cfg, log); }, err), kIoError);
}

TEST_F(CliTest, InfeasibleSolveStillWritesResult) {
  json j = tiny_config();
  j["scenario"]["goal"]["radius"] = 0.01;
  const RunConfig cfg = config(j);
  cmd_generate(cfg, log);
  EXPECT_EQ(cmd_solve(cfg, log), kInfeasible);
  const json policy = json::parse(read_file(OutputPaths{dir}.policy(cfg.deltas[0])));
  EXPECT_EQ(policy["status"], "infeasible");
  EXPECT_TRUE(policy["objective"].is_null());
}

TEST_F(CliTest, SolveIsRepeatable) {
  const RunConfig cfg = config(tiny_config());
  cmd_generate(cfg, log);
  ASSERT_EQ(cmd_solve(cfg, log), kOk);
  const std::string first = read_file(OutputPaths{dir}.policy(0.3));
  ASSERT_EQ(cmd_solve(cfg, log), kOk);
  EXPECT_EQ(read_file(OutputPaths{dir}.policy(0.3)), first);
  const json policy = json::parse(first);
  EXPECT_EQ(policy["status"], "optimal");
  EXPECT_LE(policy["weights"].size(), 2u);
  EXPECT_EQ(policy["config_digest"], cfg.digest);
}

TEST_F(CliTest, ValidateSingleTrial) {
  json j = tiny_config();
  j["montecarlo"]["trials"] = 1;
  const RunConfig cfg = config(j);
  cmd_generate(cfg, log);
  ASSERT_EQ(cmd_solve(cfg, log), kOk);
  ASSERT_EQ(cmd_validate(cfg, OutputPaths{dir}.policy(0.3), log), kOk);
  const json report = json::parse(read_file(OutputPaths{dir}.report(0.3)));
  const double rate = report["success_rate"];
  EXPECT_TRUE(rate == 0.0 || rate == 1.0);
  EXPECT_EQ(report["wilson_95"].size(), 2u);
  const std::string csv = read_file(OutputPaths{dir}.trajectories(0.3));
  EXPECT_EQ(csv.rfind("# config_digest=" + cfg.digest, 0), 0u);
}

TEST_F(CliTest, ValidateRefusesLibraryMismatch) {
  const RunConfig cfg = config(tiny_config());
  cmd_generate(cfg, log);
  ASSERT_EQ(cmd_solve(cfg, log), kOk);
  json policy = json::parse(read_file(OutputPaths{dir}.policy(0.3)));
  policy["library_digest"] = "0000000000000000";
  const fs::path tampered = dir / "tampered.json";
  std::ofstream(tampered) << policy.dump();
  std::ostringstream err;
  EXPECT_EQ(guarded([&] { return cmd_validate(cfg, tampered, log); }, err), kDataError);
  EXPECT_NE(err.str().find("library"), std::string::npos);
}

TEST_F(CliTest, ExperimentSummaryAndCaching) {
  json j = tiny_config();
  j["scenario"]["deltas"] = json::array({0.3, 0.4});
  const RunConfig cfg = config(j);
  ASSERT_EQ(cmd_experiment(cfg, log), kOk);
  const OutputPaths paths{dir};
  const json summary = json::parse(read_file(paths.summary_json()));
  EXPECT_EQ(summary["rows"].size(), 2u);
  const std::string csv = read_file(paths.summary_csv());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

  const std::string report = read_file(paths.report(0.4));
  std::ostringstream second;
  ASSERT_EQ(cmd_experiment(cfg, second), kOk);
  EXPECT_NE(second.str().find("dataset: cached, skipped"), std::string::npos);
  EXPECT_NE(second.str().find("delta=0.4: cached, skipped"), std::string::npos);
  EXPECT_EQ(read_file(paths.report(0.4)), report);
  EXPECT_EQ(read_file(paths.summary_csv()), csv);
}

TEST_F(CliTest, ExperimentSingleDelta) {
  const RunConfig cfg = config(tiny_config());
  ASSERT_EQ(cmd_experiment(cfg, log), kOk);
  EXPECT_EQ(json::parse(read_file(OutputPaths{dir}.summary_json()))["rows"].size(), 1u);
}

TEST_F(CliTest, ChangedConfigInvalidatesCache) {
  const RunConfig cfg = config(tiny_config());
  ASSERT_EQ(cmd_experiment(cfg, log), kOk);
  json j = tiny_config();
  j["embedding"]["lambda"] = 1e-5;
  std::ostringstream second;
  ASSERT_EQ(cmd_experiment(config(j), second), kOk);
  EXPECT_EQ(second.str().find("cached"), std::string::npos);
}

TEST(ExitCodes, Distinct) {
  std::ostringstream err;
  EXPECT_EQ(guarded([]() -> int { throw ConfigError("x"); }, err), kConfigError);
  EXPECT_EQ(guarded([]() -> int { throw LoadError(1, "x"); }, err), kIoError);
  EXPECT_EQ(guarded([]() -> int { throw InputError("x"); }, err), kDataError);
  EXPECT_EQ(guarded([] { return kInfeasible; }, err), kInfeasible);
  EXPECT_EQ(delta_label(0.05), "0.05");
}

}  // namespace
}  // namespace ccembed::cli
