#include "censaudit/cli/cli.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

namespace fs = std::filesystem;
using namespace censaudit;
using namespace censaudit::test;
using censaudit::cli::run_cli;

namespace {

constexpr const char* kSecretVar = "CENSAUDIT_CLI_TEST_KEY";
constexpr const char* kSecretValue = "sk-test-7f3a9c1e55d04b2a";

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "censaudit");
  return run_cli(args);
}

std::vector<fs::path> manifests(const fs::path& out) {
  std::vector<fs::path> v;
  if (!fs::exists(out / "manifests")) return v;
  for (const auto& e : fs::directory_iterator(out / "manifests")) v.push_back(e.path());
  std::sort(v.begin(), v.end());
  return v;
}

json manifest_for(const fs::path& out, const std::string& command) {
  for (const auto& p : manifests(out)) {
    if (p.filename().string().rfind(command + "-", 0) == 0) return read_json(p);
  }
  ADD_FAILURE() << "no manifest for " << command;
  return json::object();
}

// Fixture config plus a comparison judge, a base corpus and a live model that
// must never be contacted.
fs::path write_cli_workspace(const TempDir& dir, bool with_live_model) {
  auto f = make_curation_fixture();
  f.config["mock_scripts"]["cmpjudge"] =
      constant_script(R"({"choice": 1, "justification": "The first answer names the relevant dates."})");
  f.config["models"].push_back({{"id", "cmpjudge"}, {"role", "judge"}, {"endpoint", "mock:cmpjudge"}});
  if (with_live_model) {
    f.config["models"].push_back({{"id", "remote"},
                                  {"role", "generator"},
                                  {"endpoint", "https://127.0.0.1:9/v1/chat/completions"},
                                  {"auth_ref", kSecretVar}});
  }
  f.config["audit"] = {{"target", "target"}};
  f.config["jailbreak"] = {{"target", "target"}, {"max_iterations", 3}};
  f.config["compare"] = {{"judge", "cmpjudge"}};
  f.config["distill"] = {{"base", "base.jsonl"}, {"pool", "out/journals/audit.jsonl"}, {"strategy", "random"}, {"n", 5}};
  f.config["report"] = {{"generated_at", "2024-06-01T00:00:00Z"}};
  std::ofstream base(dir / "base.jsonl");
  for (int i = 0; i < 20; ++i) {
    base << json{{"prompt", "Explain photosynthesis step " + std::to_string(i) + "."},
                 {"response", "<think>\nPlants convert light.\n</think>\n\nLight becomes chemical energy."}}
                .dump()
         << "\n";
  }
  return f.write_to(dir.path());
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_EQ(run({"curate", "--help"}), 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"curate"}), 2);
  EXPECT_EQ(run({"audit", "--config"}), 2);
  EXPECT_EQ(run({"compare", "--config", "x.json", "--a", "a.jsonl"}), 2);
  EXPECT_EQ(run({"inject", "--config", "x.json", "--strategy", "bogus"}), 2);
  EXPECT_EQ(run({"jailbreak", "--config", "x.json", "--k", "0"}), 2);
}

TEST(Cli, MissingConfigFileExitsOne) {
  TempDir dir("cli");
  EXPECT_EQ(run({"curate", "--config", (dir / "absent.json").string()}), 1);
}

TEST(Cli, MissingCredentialExitsOneAndNamesVariable) {
  TempDir dir("cli");
  ::unsetenv(kSecretVar);
  const auto cfg = write_cli_workspace(dir, true);
  const auto out = dir / "out";
  ::testing::internal::CaptureStderr();
  const int rc = run({"curate", "--config", cfg.string(), "--out", out.string()});
  const std::string err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(rc, 1);
  EXPECT_NE(err.find(kSecretVar), std::string::npos) << err;
  EXPECT_FALSE(fs::exists(out / "dataset.jsonl"));
}

TEST(Cli, CurateWritesDatasetAndManifest) {
  TempDir dir("cli");
  const auto cfg = write_cli_workspace(dir, false);
  const auto out = dir / "out";
  ASSERT_EQ(run({"curate", "--config", cfg.string(), "--out", out.string()}), 0);
  EXPECT_TRUE(fs::exists(out / "dataset.jsonl"));
  const auto m = manifest_for(out, "curate");
  EXPECT_EQ(m.at("exit_code"), 0);
  EXPECT_EQ(m.at("network_requests"), 0);
  EXPECT_EQ(m.at("root_seed"), 7);
  EXPECT_EQ(m.at("dataset_size"), 155);
  EXPECT_FALSE(m.at("config_hash").get<std::string>().empty());
  EXPECT_TRUE(m.at("inputs").contains((dir / "corpus.jsonl").string()));
}

TEST(Cli, OperationalFailureStillWritesManifest) {
  TempDir dir("cli");
  const auto cfg = write_cli_workspace(dir, false);
  const auto out = dir / "out";
  EXPECT_EQ(run({"audit", "--config", cfg.string(), "--out", out.string(), "--dataset", (dir / "nope.jsonl").string()}),
            1);
  const auto m = manifest_for(out, "audit");
  EXPECT_EQ(m.at("exit_code"), 1);
  EXPECT_NE(m.at("error").get<std::string>().find("nope.jsonl"), std::string::npos);
}

TEST(Cli, FullChainStaysOfflineConfinedAndSecretFree) {
  TempDir dir("cli");
  ::setenv(kSecretVar, kSecretValue, 1);
  const auto cfg = write_cli_workspace(dir, true);
  const auto out = dir / "out";
  const auto before = list_files(dir.path());

  const std::string c = cfg.string();
  const std::string o = out.string();
  const std::string journal = (out / "journals" / "audit.jsonl").string();
  ASSERT_EQ(run({"curate", "--config", c, "--out", o}), 0);
  ASSERT_EQ(run({"audit", "--config", c, "--out", o}), 0);
  ASSERT_EQ(run({"jailbreak", "--config", c, "--out", o}), 0);
  ASSERT_EQ(run({"inject", "--config", c, "--out", o, "--seed", "11"}), 0);
  ASSERT_EQ(run({"compare", "--config", c, "--out", o, "--a", journal, "--b", journal, "--per-source", "2"}), 0);
  ASSERT_EQ(run({"report", "--config", c, "--out", o}), 0);
  ::unsetenv(kSecretVar);

  EXPECT_TRUE(fs::exists(out / "tables" / "audit_by_category.csv"));
  EXPECT_TRUE(fs::exists(out / "jailbreak" / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "distill" / "corpus_random_n5_s11.jsonl"));
  EXPECT_TRUE(fs::exists(out / "tables" / "compare_factuality.csv"));
  EXPECT_EQ(manifests(out).size(), 6u);

  for (const auto& p : manifests(out)) {
    const auto m = read_json(p);
    EXPECT_EQ(m.at("network_requests"), 0) << p;
    EXPECT_EQ(m.at("exit_code"), 0) << p;
  }

  const auto after = list_files(dir.path());
  std::set<std::string> old(before.begin(), before.end());
  for (const auto& rel : after) {
    if (old.count(rel)) continue;
    EXPECT_EQ(rel.rfind("out/", 0), 0u) << "written outside the output directory: " << rel;
  }
  for (const auto& rel : after) {
    EXPECT_EQ(read_file(dir / rel).find(kSecretValue), std::string::npos) << "credential value leaked into " << rel;
  }
  // The config names the variable, never its value.
  EXPECT_NE(read_file(cfg).find(kSecretVar), std::string::npos);
}

TEST(Cli, JailbreakSummaryMatchesTargetScript) {
  TempDir dir("cli");
  const auto cfg = write_cli_workspace(dir, false);
  const auto out = dir / "out";
  ASSERT_EQ(run({"curate", "--config", cfg.string(), "--out", out.string()}), 0);
  ASSERT_EQ(run({"jailbreak", "--config", cfg.string(), "--out", out.string(), "--k", "2"}), 0);
  const auto s = read_json(out / "jailbreak" / "summary.json");
  // The fixture target never yields to the attack, so nothing is bypassed.
  EXPECT_EQ(s.at("total"), 155);
  EXPECT_EQ(s.at("bypassed_uncensored"), 0);
}
