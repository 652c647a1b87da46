#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "sparsenav/cli.hpp"

using namespace sparsenav;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sparsenav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sparsenav_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { ::unsetenv("SPARSENAV_SEED"); }
};

TEST_F(Cli, TrialWritesArtifactsAndIsReproducible) {
  const fs::path dir = fresh_dir("trial");
  write(dir / "c.json", R"({"trial": {"n_kc": 500, "max_test_time": 3}})");
  const Result a = run({"trial", "--config", (dir / "c.json").string(), "--out", (dir / "a").string(), "--seed", "4"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  for (const char* f : {"train.csv", "test.csv", "novelty.csv", "record.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
  }
  const Result b = run({"trial", "--config", (dir / "c.json").string(), "--out", (dir / "b").string(), "--seed", "4"});
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_EQ(slurp(dir / "a" / "record.json"), slurp(dir / "b" / "record.json"));

  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 4);
  EXPECT_EQ(manifest["command"], "trial");
  EXPECT_EQ(manifest["config"]["trial"]["n_kc"], 500);
  EXPECT_TRUE(manifest.contains("arena"));
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_EQ(slurp(dir / "a" / "test.csv").substr(0, 14), "t,x,y,heading\n");
}

TEST_F(Cli, SeedFromEnvironmentUnlessFlagGiven) {
  const fs::path dir = fresh_dir("seed");
  write(dir / "c.json", R"({"seed": 1, "trial": {"n_kc": 300, "max_test_time": 1}})");
  ::setenv("SPARSENAV_SEED", "77", 1);
  ASSERT_EQ(run({"trial", "--config", (dir / "c.json").string(), "--out", (dir / "e").string()}).code, 0);
  ASSERT_EQ(run({"trial", "--config", (dir / "c.json").string(), "--out", (dir / "f").string(), "--seed", "8"}).code, 0);
  ::unsetenv("SPARSENAV_SEED");
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "e" / "manifest.json"))["seed"], 77);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "f" / "manifest.json"))["seed"], 8);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  const fs::path dir = fresh_dir("errors");
  write(dir / "missing_arena.json", R"({"arena": "nope.json"})");
  EXPECT_EQ(run({"trial", "--config", (dir / "missing_arena.json").string(), "--out", dir.string()}).code, kExitConfig);
  write(dir / "broken.json", "{ not json");
  EXPECT_EQ(run({"trial", "--config", (dir / "broken.json").string(), "--out", dir.string()}).code, kExitConfig);
  write(dir / "empty_grid.json", R"({"sweep": {"models": []}})");
  EXPECT_EQ(run({"sweep", "--config", (dir / "empty_grid.json").string(), "--out", dir.string()}).code, kExitConfig);
  EXPECT_EQ(run({"trial", "--config", (dir / "absent.json").string()}).code, kExitConfig);
  EXPECT_EQ(run({"bogus"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
}

TEST_F(Cli, TrainingCollisionExitsThree) {
  const fs::path dir = fresh_dir("collision");
  write(dir / "r.json", R"({"start": {"x": 0, "y": -1.5, "heading": -1.57}, "segments": [{"duration": 12.5}]})");
  write(dir / "c.json", R"({"route": "r.json"})");
  const Result r = run({"trial", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitTrainingCollision);
  EXPECT_NE(r.err.find("collides"), std::string::npos);
}

TEST_F(Cli, SweepShapes) {
  const fs::path dir = fresh_dir("sweep");
  write(dir / "c.json",
        R"({"trial": {"max_test_time": 2}, "sweep": {"models": ["flyhash"], "n_kc": [200, 300, 400],
            "kappa": [0.1], "n_trials": 5}})");
  const Result r = run({"sweep", "--config", (dir / "c.json").string(), "--out", dir.string(), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string sweep = slurp(dir / "sweep.csv");
  const std::string trials = slurp(dir / "trials.csv");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 1 + 3);
  EXPECT_EQ(std::count(trials.begin(), trials.end(), '\n'), 1 + 15);
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')),
            "model,n_kc,kappa,n_trials,success_rate,mean_final_distance,entropy_bits_per_item");
}

TEST_F(Cli, FixedFanoutFlagReachesManifest) {
  const fs::path dir = fresh_dir("fanout");
  write(dir / "c.json", R"({"trial": {"n_kc": 200, "max_test_time": 1}})");
  ASSERT_EQ(run({"trial", "--config", (dir / "c.json").string(), "--out", dir.string(), "--fixed-fanout"}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "manifest.json"))["config"]["trial"]["fixed_fanout"], true);
}

TEST_F(Cli, Tables) {
  const Result r = run({"tables", "--n-pn", "726", "--n-kc", "32000", "--kappa", "0.05"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("5808"), std::string::npos);
  EXPECT_NE(r.out.find("32000"), std::string::npos);
  EXPECT_NE(r.out.find("288000"), std::string::npos);
  EXPECT_EQ(run({"tables", "--kappa", "1.5"}).code, kExitConfig);
  EXPECT_EQ(run({"tables", "--n-kc", "abc"}).code, kExitConfig);
}
