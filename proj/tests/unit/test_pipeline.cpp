#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

#include "optrend/pipeline.hpp"

using namespace optrend;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OPTREND_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// One synthetic fixture world shared by every test in the suite.
class Pipeline : public ::testing::Test {
 protected:
  static fs::path root;

  static void SetUpTestSuite() {
    root = fs::temp_directory_path() / ("optrend_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(root);
    ASSERT_EQ(run_cli("synth --preset fixture --out " + (root / "world").string()), 0);
  }
  static void TearDownTestSuite() { fs::remove_all(root); }

  static PipelineConfig config(const std::string& out) {
    PipelineConfig c;
    c.corpus = (root / "world/corpus.jsonl").string();
    c.polls = (root / "world/polls.csv").string();
    c.seeds = (root / "world/seeds.txt").string();
    c.decisions = (root / "world/decisions.csv").string();
    c.output_dir = (root / out).string();
    c.seed = 11;
    c.lambdas = "1e-3,1e-2";
    c.folds = 3;
    return c;
  }
};

fs::path Pipeline::root;

std::map<std::string, std::string> artifact_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      out[e.path().filename().string()] = read_file(e.path().string());
  return out;
}

}  // namespace

TEST_F(Pipeline, RunAllTwiceGivesIdenticalArtifacts) {
  const auto conf = (root / "world/optrend.toml").string();
  ASSERT_EQ(run_cli("--config " + conf + " run-all --output-dir " + (root / "a").string()), 0);
  ASSERT_EQ(run_cli("--config " + conf + " run-all --output-dir " + (root / "b").string()), 0);
  const auto a = artifact_files(root / "a"), b = artifact_files(root / "b");
  EXPECT_GT(a.size(), 20u);
  EXPECT_EQ(a, b);
  const auto ma = nlohmann::json::parse(read_file((root / "a/manifest.json").string()));
  const auto mb = nlohmann::json::parse(read_file((root / "b/manifest.json").string()));
  EXPECT_EQ(ma["stages"], mb["stages"]);
  for (const auto& st : ma["stages"]) EXPECT_EQ(st["status"], "ok") << st["stage"];
  // Names embed the digest of the content.
  for (const auto& st : ma["stages"])
    for (const auto& art : st["artifacts"]) {
      const std::string path = art["path"], sha = art["sha256"];
      EXPECT_NE(path.find("." + sha.substr(0, 16)), std::string::npos);
      EXPECT_EQ(sha256_hex(read_file((root / "a" / path).string())), sha);
    }
}

TEST_F(Pipeline, LibraryRunProducesEveryProduct) {
  const auto p = run_pipeline(config("lib"));
  EXPECT_GT(p.corpus.size(), 8000u);
  EXPECT_TRUE(p.propagation.stable);
  EXPECT_GT(p.training.examples.size(), 100u);
  ASSERT_TRUE(p.fit);
  EXPECT_GT(*p.fit->pearson_r, 0.5);
  EXPECT_EQ(p.sweep.size(), 21u);
  EXPECT_TRUE(p.forecast || p.forecast_skipped);
  EXPECT_EQ(p.metrics.size(), 4u);
  EXPECT_TRUE(p.baseline_fits.contains("mentions"));
  EXPECT_TRUE(manifest_artifact(root / "lib", "opinion_whole.csv"));
  EXPECT_TRUE(manifest_artifact(root / "lib", "baselines.json"));
  EXPECT_EQ((*manifest_stage_parameters(root / "lib", "train"))["folds"], 3);
}

TEST_F(Pipeline, MissingPollsFailAtTheFitStage) {
  auto c = config("nopolls");
  c.polls = (root / "absent.csv").string();
  try {
    run_pipeline(c);
    FAIL() << "expected a fit failure";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage, "fit");
    EXPECT_NE(std::string(e.what()).find("poll file does not exist"), std::string::npos);
  }
  const auto m = nlohmann::json::parse(read_file((root / "nopolls/manifest.json").string()));
  std::vector<std::string> ok;
  for (const auto& st : m["stages"])
    if (st["status"] == "ok") ok.push_back(st["stage"]);
  EXPECT_EQ(ok, (std::vector<std::string>{"corpus", "graphs", "cooccur", "propagate", "trainset", "train", "opinion"}));
  EXPECT_EQ(m["stages"].back()["stage"], "fit");
  EXPECT_EQ(m["stages"].back()["status"], "failed");
  EXPECT_TRUE(manifest_artifact(root / "nopolls", "opinion_whole.csv"));
  EXPECT_FALSE(manifest_artifact(root / "nopolls", "fit.json"));
  // The CLI reports stage failures with their own exit code.
  EXPECT_EQ(run_cli("--config " + (root / "world/optrend.toml").string() + " run-all --polls " + c.polls +
                    " --output-dir " + (root / "nopolls_cli").string()),
            3);
}

TEST_F(Pipeline, ValidationRejectsBadParameters) {
  auto bad = [&](auto mutate) {
    auto c = config("never");
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  bad([](PipelineConfig& c) { c.corpus = "/nonexistent"; });
  bad([](PipelineConfig& c) { c.curation = "maybe"; });
  bad([](PipelineConfig& c) { c.p0 = 0; });
  bad([](PipelineConfig& c) { c.window = 4; });
  bad([](PipelineConfig& c) { c.td_min = 5, c.td_max = 2; });
  bad([](PipelineConfig& c) { c.lambdas = "1,-1"; });
  bad([](PipelineConfig& c) { c.scope = "everyone"; });
  bad([](PipelineConfig& c) { c.folds = 1; });
  auto c = config("never");
  c.decisions.clear();
  c.curation = "auto";
  EXPECT_NO_THROW(c.validate());
  EXPECT_FALSE(fs::exists(root / "never"));
}

TEST(ArtifactStore, ContentAddressedNames) {
  const auto dir = fs::temp_directory_path() / ("optrend_store_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  {
    ArtifactStore s(dir);
    s.begin_stage("demo", {{"k", 1}});
    const auto p = s.put("table.csv", "abc");
    EXPECT_EQ(p.filename().string(), "table." + sha256_hex("abc").substr(0, 16) + ".csv");
    s.end_stage("ok");
  }
  EXPECT_EQ(*manifest_artifact(dir, "table.csv"), dir / ("table." + sha256_hex("abc").substr(0, 16) + ".csv"));
  EXPECT_FALSE(manifest_artifact(dir, "other.csv"));
  EXPECT_EQ((*manifest_stage_parameters(dir, "demo"))["k"], 1);
  fs::remove_all(dir);
}
