#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("atmfg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of the binary; stdout and stderr go to files in the temp dir.
  int run(const std::string& args) {
    const std::string cmd = std::string(ATMFG_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

} // namespace

TEST_F(Cli, VersionAndHelp) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_NE(read("stdout.txt").find("0.1.0"), std::string::npos);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, PlanarThenGmrfThenBuild) {
  ASSERT_EQ(run("gen planar --n 100 --seed 1 --out " + path("truth.tsv")), 0);
  EXPECT_EQ(count_lines(read("truth.tsv")), 294u);
  ASSERT_EQ(run("gen gmrf --graph " + path("truth.tsv") + " --alpha 0.25 --samples 300 --seed 2 --out " + path("y.atmf")),
            0);
  ASSERT_EQ(run("build --input " + path("y.atmf") + " --k 20 --seed 3 --out " + path("a.tsv")), 0);
  EXPECT_EQ(count_lines(read("a.tsv")), 294u);

  const auto stats = nlohmann::json::parse(read("a.stats.json"));
  for (const char* key : {"n", "edges", "rescues", "lazy_discards", "faces_pruned", "peak_universe", "wall_seconds"})
    EXPECT_TRUE(stats.contains(key)) << key;
  EXPECT_EQ(stats["edges"], 294);
  const auto manifest = nlohmann::json::parse(read("a.manifest.json"));
  EXPECT_EQ(manifest["command"], "build");

  ASSERT_EQ(run("eval --graph " + path("a.tsv") + " --truth " + path("truth.tsv") + " --out " + path("eval.json")), 0);
  const auto eval = nlohmann::json::parse(read("eval.json"));
  EXPECT_EQ(eval["audit"]["edges"], 294);
  EXPECT_EQ(eval["audit"]["components"], 1);
  EXPECT_GT(eval["jaccard"].get<double>(), 0.5);
}

TEST_F(Cli, BuildIsByteIdentical) {
  ASSERT_EQ(run("gen planar --n 80 --seed 4 --out " + path("t.tsv")), 0);
  ASSERT_EQ(run("gen gmrf --graph " + path("t.tsv") + " --samples 200 --seed 5 --out " + path("y.csv")), 0);
  ASSERT_EQ(run("build --input " + path("y.csv") + " --out " + path("a.tsv")), 0);
  ASSERT_EQ(run("build --input " + path("y.csv") + " --out " + path("b.tsv")), 0);
  EXPECT_EQ(read("a.tsv"), read("b.tsv"));
  ASSERT_EQ(run("--simd scalar build --input " + path("y.csv") + " --out " + path("c.tsv")), 0);
  EXPECT_FALSE(read("c.tsv").empty());
}

TEST_F(Cli, ExactWithTraceAndPaths) {
  ASSERT_EQ(run("gen factor --n 60 --k 3 --g 0.5 --samples 200 --seed 1 --out " + path("f.atmf")), 0);
  EXPECT_EQ(count_lines(read("f.labels.txt")), 60u);
  ASSERT_EQ(run("build-exact --input " + path("f.atmf") + " --out " + path("e.tsv") + " --bins 10"), 0);
  EXPECT_EQ(count_lines(read("e.tsv")), 174u);
  EXPECT_EQ(count_lines(read("e.trace.csv")), 57u);
  EXPECT_EQ(count_lines(read("e.locations.csv")), 11u);
  EXPECT_EQ(nlohmann::json::parse(read("e.manifest.json"))["valid"], true);

  ASSERT_EQ(run("eval " + path("e.tsv") + " --labels " + path("f.labels.txt")), 0);
  const auto j = nlohmann::json::parse(read("stdout.txt"));
  EXPECT_GE(j["l_weighted"].get<double>(), 1.0);
  EXPECT_EQ(j["per_cluster"].size(), 3u);
}

TEST_F(Cli, PairwiseJaccard) {
  for (int s = 0; s < 3; ++s)
    ASSERT_EQ(run("gen planar --n 30 --seed " + std::to_string(s) + " --out " + path("g" + std::to_string(s) + ".tsv")), 0);
  ASSERT_EQ(run("eval --pairwise " + path("g0.tsv") + " " + path("g1.tsv") + " " + path("g2.tsv")), 0);
  const auto j = nlohmann::json::parse(read("stdout.txt"));
  EXPECT_EQ(j["pairwise"]["count"], 3);
}

TEST_F(Cli, ExitCodes) {
  ASSERT_EQ(run("gen planar --n 20 --out " + path("t.tsv")), 0);
  ASSERT_EQ(run("gen gmrf --graph " + path("t.tsv") + " --samples 50 --out " + path("y.atmf")), 0);
  // Bad parameters.
  EXPECT_EQ(run("build --input " + path("y.atmf") + " --k 2 --out " + path("a.tsv")), 2);
  EXPECT_EQ(run("bench --preset nope"), 2);
  EXPECT_EQ(run("build --nonsense"), 2);
  // Too few nodes.
  EXPECT_EQ(run("gen planar --n 3 --out " + path("small.tsv")), 3);
  // Malformed or mismatched input.
  std::ofstream(path("bad.csv")) << "1,2,3\n4,5\n";
  EXPECT_EQ(run("build --input " + path("bad.csv") + " --out " + path("b.tsv")), 4);
  ASSERT_EQ(run("gen planar --n 25 --out " + path("t25.tsv")), 0);
  EXPECT_EQ(run("eval --graph " + path("t25.tsv") + " --truth " + path("t.tsv")), 4);
  EXPECT_FALSE(read("stderr.txt").empty());
}
