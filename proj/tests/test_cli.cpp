#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "freeinv/io.hpp"

namespace {

const std::string kCli = FREEINV_CLI;
const std::string kSpecs = FREEINV_SPECS;

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "freeinv_cli_" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout sent to `out` and stderr discarded; returns the exit status.
int run(const std::string& args, const std::string& out = "/dev/null") {
  const int raw = std::system((kCli + " " + args + " > " + out + " 2>/dev/null").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST(Cli, MomentsExact) {
  const auto laws = write_temp("rad.json", R"({"kind": "rademacher"})");
  const auto out = temp_path("moments.json");
  ASSERT_EQ(run("moments " + kSpecs + "/star3.json --laws " + laws + " -m 2", out), 0);
  const auto j = freeinv::json::parse(slurp(out));
  EXPECT_NEAR(j.at("rows")[0].at("value").get<double>(), 1.0, 1e-15);
  EXPECT_EQ(j.at("all_pass"), true);
}

TEST(Cli, MomentsMixedLawsAndCsv) {
  const auto out = temp_path("moments.csv");
  ASSERT_EQ(run("moments " + kSpecs + "/star3.json --laws " + kSpecs + "/laws_mixed.json -m 4 --format csv", out), 0);
  const auto text = slurp(out);
  EXPECT_EQ(text.substr(0, text.find('\n')), "N,d,m,value,patterns");
}

TEST(Cli, AnalyzeAndOutFile) {
  const auto out = temp_path("analyze.json");
  ASSERT_EQ(run("analyze " + kSpecs + "/mirror10.json --out " + out), 0);
  const auto j = freeinv::json::parse(slurp(out));
  EXPECT_EQ(j.at("rows")[0].at("mirror_symmetric"), true);
  EXPECT_NEAR(j.at("rows")[0].at("tau_free").get<double>(), 1.0, 1e-12);
}

TEST(Cli, FailedCheckExitsOne) {
  const auto spec = write_temp("tight.json", R"({"N": [2, 4], "moments": [6], "bands": {"6": 1.0}})");
  EXPECT_EQ(run("clt --spec " + spec), 1);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto bad_grid = write_temp("grid.json", R"({"N": [4, 2]})");
  EXPECT_EQ(run("clt --spec " + bad_grid), 2);
  const auto malformed = write_temp("malformed.json", "{ nope");
  EXPECT_EQ(run("clt --spec " + malformed), 2);
  EXPECT_EQ(run("clt --spec /nonexistent/spec.json"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("clt --format xml"), 2);
  EXPECT_EQ(run("moments " + kSpecs + "/star3.json --laws " + kSpecs + "/star3.json -m 2"), 2);
  const auto cap = write_temp("cap.json", R"({"tuple_cap": 10})");
  EXPECT_EQ(run("clt --spec " + cap), 2);
}

TEST(Cli, ExperimentsWithShippedSpecs) {
  EXPECT_EQ(run("clt --spec " + kSpecs + "/clt_sliding.json"), 0);
  EXPECT_EQ(run("invariance --spec " + kSpecs + "/invariance_mirror.json"), 0);
  EXPECT_EQ(run("hyper --spec " + kSpecs + "/hyper_quick.json --seed 5"), 0);
  EXPECT_EQ(run("defaults rmt"), 0);
}

TEST(Cli, SeedDeterminesOutput) {
  const auto spec = kSpecs + "/hyper_quick.json";
  const auto a = temp_path("h1.json");
  const auto b = temp_path("h2.json");
  const auto c = temp_path("h3.json");
  ASSERT_EQ(run("hyper --spec " + spec + " --seed 11", a), 0);
  ASSERT_EQ(run("hyper --spec " + spec + " --seed 11 --threads 2", b), 0);
  ASSERT_EQ(run("hyper --spec " + spec + " --seed 12", c), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
}
