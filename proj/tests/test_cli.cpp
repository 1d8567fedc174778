#include <gtest/gtest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(CORRCOH_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  CliRun r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("corrcoh_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kBell = R"({"dims":[2,2],"labels":["A","B"],"matrix":[
  [[0.5,0],[0,0],[0,0],[0.5,0]],[[0,0],[0,0],[0,0],[0,0]],
  [[0,0],[0,0],[0,0],[0,0]],[[0.5,0],[0,0],[0,0],[0.5,0]]]})";

}  // namespace

TEST_F(Cli, CoherenceOfBell) {
  const CliRun r = run("coherence " + write("bell.json", kBell));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("C").get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j.at("C_A").get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(j.at("C_B").get<double>(), 0.0, 1e-12);
}

TEST_F(Cli, CoherenceOfDiagonal) {
  const CliRun r = run("--measure relent coherence " +
                    write("d.json", R"({"dims":[2,2],"matrix":[[0.1,0,0,0],[0,0.2,0,0],[0,0,0.3,0],[0,0,0,0.4]]})"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out).at("C").get<double>(), 0.0, 1e-14);
}

TEST_F(Cli, ErrorsAndExitCodes) {
  EXPECT_EQ(run("coherence " + write("bad.json", R"({"dims":[2],"matrix":[[1.02,0],[0,-0.02]]})")).code, 1);
  EXPECT_EQ(run("coherence " + write("broken.json", "{\"dims\": [2,")).code, 1);
  EXPECT_EQ(run("coherence " + path("missing.json")).code, 1);
  EXPECT_EQ(run("--measure robustness coherence " + write("bell.json", kBell)).code, 2);
  EXPECT_EQ(run("validate --suites nonexistent").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--format csv coherence " + write("bell2.json", kBell)).code, 2);
}

TEST_F(Cli, ErrorMessagesOnStderr) {
  const std::string bad = write("bad.json", R"({"dims":[2],"matrix":[[1.02,0],[0,-0.02]]})");
  const std::string cmd = std::string(CORRCOH_CLI) + " coherence " + bad + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_TRUE(pipe);
  std::string all;
  std::array<char, 512> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) all.append(buf.data(), n);
  pclose(pipe);
  EXPECT_NE(all.find("validation error"), std::string::npos) << all;
  EXPECT_NE(all.find("min eigenvalue -0.02"), std::string::npos) << all;
}

TEST_F(Cli, EntanglementPureIsExact) {
  const std::string f = write("p.json", R"({"dims":[2,2],"vector":[0.9486832980505138,0,0,0.31622776601683794]})");
  const CliRun r = run("entanglement " + f);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("value").get<double>(), 0.6, 1e-9);
  EXPECT_EQ(j.at("kind"), "exact");
}

TEST_F(Cli, EntanglementWernerWithDecomposition) {
  const std::string w = path("w.json");
  ASSERT_EQ(run("sample werner --p 0.2 --out " + w).code, 0);
  const CliRun r = run("entanglement " + w + " --decomposition " + w);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("value").get<double>(), 0.0, 1e-8);
  EXPECT_EQ(j.at("kind"), "exact");
}

TEST_F(Cli, EntanglementWernerEntangledIsBound) {
  const std::string w = path("w.json");
  ASSERT_EQ(run("sample werner --p 0.8 --out " + w).code, 0);
  const CliRun r = run("entanglement " + w);
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("kind"), "upper_bound");
  EXPECT_TRUE(j.contains("diagnostics"));
  EXPECT_GE(j.at("value").get<double>(), 0.5);
}

TEST_F(Cli, ClassifyLabels) {
  // 0.5 |0><0| (x) |0><0| + 0.5 |1><1| (x) |+><+|
  json cq{{"dims", {2, 2}},
          {"matrix", {{0.5, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0.25, 0.25}, {0, 0, 0.25, 0.25}}}};
  json cc{{"dims", {2, 2}}, {"matrix", {{0.25, 0.25, 0, 0}, {0.25, 0.25, 0, 0}, {0, 0, 0.25, -0.25}, {0, 0, -0.25, 0.25}}}};
  EXPECT_EQ(json::parse(run("classify " + write("cq.json", cq.dump())).out).at("label"), "CQ");
  EXPECT_EQ(json::parse(run("classify " + write("cc.json", cc.dump())).out).at("label"), "CC");
  EXPECT_EQ(json::parse(run("classify " + write("bell.json", kBell)).out).at("label"), "neither");
}

TEST_F(Cli, DiscordOfBell) {
  const CliRun r = run("discord " + write("bell.json", kBell));
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out).at("value").get<double>(), 1.0, 1e-8);
}

TEST_F(Cli, CminAndCorrcoh) {
  const std::string f = write("bell.json", kBell);
  const CliRun c = run("cmin " + f + " --restarts 4");
  ASSERT_EQ(c.code, 0);
  EXPECT_NEAR(json::parse(c.out).at("value").get<double>(), 1.0, 1e-6);
  const CliRun k = run("corrcoh " + f);
  ASSERT_EQ(k.code, 0);
  EXPECT_NEAR(json::parse(k.out).at("value").get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, ValidateMonotonicity1000) {
  const CliRun r = run("validate --suites monotonicity --n 1000 --seed 3");
  EXPECT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("passed"), true);
  for (const auto& rep : j.at("reports")) EXPECT_EQ(rep.at("trials"), 1000);
}

TEST_F(Cli, ValidateCsvAndDeterminism) {
  const CliRun a = run("validate --suites convexity,local_unitary --n 5 --seed 9 --format csv");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "suite,measure,seed,trials,checks,failures,passed");
  const CliRun x = run("validate --suites convexity --n 5 --seed 9");
  const CliRun y = run("validate --suites convexity --n 5 --seed 9");
  EXPECT_EQ(x.out, y.out);
  const std::string out = path("v.json");
  ASSERT_EQ(run("validate --suites convexity --n 5 --seed 9 --out " + out).code, 0);
  std::ifstream in(out);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, x.out);
}

TEST_F(Cli, SampleKinds) {
  for (const std::string kind : {"haar_ket", "ginibre_mixed", "random_product_basis", "random_separable"}) {
    const CliRun r = run("--seed 4 sample " + kind + " --dims 2,3");
    ASSERT_EQ(r.code, 0) << kind;
    EXPECT_EQ(r.out, run("--seed 4 sample " + kind + " --dims 2,3").out);
  }
  const std::string f = path("k.json");
  ASSERT_EQ(run("sample haar_ket --dims 2,2 --out " + f).code, 0);
  EXPECT_EQ(run("entanglement " + f).code, 0);
}
