#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "roesser/io.hpp"

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("roesser_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(ROESSER_CLI) + " -q " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, GenRealizeVerify) {
  ASSERT_EQ(run("gen kernel -r 2 2 --cin 2 --cout 2 --seed 3 -o " + path("k.json")), 0);
  ASSERT_EQ(run("realize -k " + path("k.json") + " -o " + path("r.json")), 0);
  EXPECT_EQ(run("verify -k " + path("k.json") + " -r " + path("r.json")), 0);
  EXPECT_EQ(run("analyze -k " + path("k.json") + " -r " + path("r.json") + " -o " + path("a.json")), 0);
  const auto report = roesser::io::read_file(path("a.json"));
  EXPECT_TRUE(report.contains("dims"));
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen signal -d 2 -N 4 5 -c 2 --seed 9 -o " + path("a.json")), 0);
  ASSERT_EQ(run("gen signal -d 2 -N 4 5 -c 2 --seed 9 -o " + path("b.json")), 0);
  ASSERT_EQ(run("gen signal -d 2 -N 4 5 -c 2 --seed 10 -o " + path("c.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, CorruptedRealizationExitsOne) {
  ASSERT_EQ(run("gen kernel -r 1 2 --seed 4 -o " + path("k.json")), 0);
  ASSERT_EQ(run("realize -k " + path("k.json") + " -o " + path("r.json")), 0);
  auto j = roesser::io::read_file(path("r.json"));
  j["D"]["data"][0] = j["D"]["data"][0].get<double>() + 1.0;
  roesser::io::write_file(path("r.json"), j);
  EXPECT_EQ(run("verify -k " + path("k.json") + " -r " + path("r.json")), 1);
}

TEST_F(Cli, StridedPipeline) {
  ASSERT_EQ(run("gen kernel -r 4 4 --seed 5 -o " + path("k.json")), 0);
  ASSERT_EQ(run("realize -k " + path("k.json") + " --stride 2 2 -o " + path("r.json")), 0);
  EXPECT_EQ(run("verify -k " + path("k.json") + " -r " + path("r.json")), 0);
  ASSERT_EQ(run("gen signal -d 2 -N 7 6 --seed 1 -o " + path("u.json")), 0);
  EXPECT_EQ(run("simulate -r " + path("r.json") + " -s " + path("u.json") + " -o " + path("y.json")), 0);
}

TEST_F(Cli, ExitCodes) {
  ASSERT_EQ(run("gen kernel -r 1 1 1 --seed 1 -o " + path("k3.json")), 0);
  EXPECT_EQ(run("realize -k " + path("k3.json") + " --stride 2 2 2"), 3);
  EXPECT_EQ(run("realize -k " + path("missing.json")), 2);
  std::ofstream(path("bad.json")) << "{not json";
  EXPECT_EQ(run("realize -k " + path("bad.json")), 2);
  EXPECT_EQ(run("convolve -k " + path("k3.json") + " -s " + path("k3.json")), 2);
  EXPECT_EQ(run("nonsense"), 2);
  ASSERT_EQ(run("gen kernel -r 2 2 --seed 1 -o " + path("k.json")), 0);
  ASSERT_EQ(run("gen signal -d 2 -N 2 2 --seed 1 -o " + path("u.json")), 0);
  EXPECT_EQ(run("convolve -k " + path("k.json") + " -s " + path("u.json") + " --padding none"), 2);
}

}  // namespace
