// End-to-end checks of the rieszcap executable: exit codes, file outputs
// and determinism.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(RIESZCAP_CLI) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rieszcap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

std::string fixture(const std::string& name) { return std::string(RIESZCAP_FIXTURES) + "/" + name; }

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

/// Balanced-tag check that is enough to catch truncated or interleaved SVG.
bool tags_balanced(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = xml.find('<', i)) != std::string::npos) {
    const std::size_t j = xml.find('>', i);
    if (j == std::string::npos) return false;
    std::string tag = xml.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

}  // namespace

TEST_F(Cli, GenWritesDeterministicFile) {
  ASSERT_EQ(run("gen --n 2 --lambda 0.25 --depth 3 --out " + path("a.json")).code, 0);
  ASSERT_EQ(run("gen --n 2 --lambda 0.25 --depth 3 --out " + path("b.json")).code, 0);
  const std::string a = slurp(path("a.json"));
  EXPECT_EQ(a, slurp(path("b.json")));
  EXPECT_NE(a.find("\"delta\""), std::string::npos);
  const Outcome e = run("energy " + path("a.json"));
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(count_lines(e.out), 2);
  EXPECT_NE(e.out.find(",64,"), std::string::npos);
}

TEST_F(Cli, GenOverCapIsSizeError) {
  EXPECT_EQ(run("gen --depth 9").code, 2);
  EXPECT_EQ(run("gen --depth 9 --max-atoms 300000 --out " + path("big.json")).code, 0);
}

TEST_F(Cli, EnergyOnFixture) {
  const Outcome r = run("energy " + fixture("three_collinear.json") + " --alpha 0.5 --eps 0.5");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2,0.5,0.5,3,2.48528"), std::string::npos) << r.out;
  const Outcome sweep =
      run("energy " + fixture("three_collinear.json") + " --alpha 0.5 --eps 0.5 1.5 --json");
  ASSERT_EQ(sweep.code, 0);
  EXPECT_EQ(sweep.out.front(), '[');
  EXPECT_NE(sweep.out.find("\"p_alpha\": 0"), std::string::npos) << sweep.out;
}

TEST_F(Cli, BadInputsExitThree) {
  write("empty.json", "");
  write("bad.json", "{\"n\": 2, \"atoms\": [[0, 0]], \"weights\": [1], \"extra\": 1}");
  write("cfg.json", "{\"depht\": 3}");
  EXPECT_EQ(run("energy " + path("empty.json")).code, 3);
  EXPECT_EQ(run("energy " + path("bad.json")).code, 3);
  EXPECT_EQ(run("gen --config " + path("cfg.json")).code, 3);
  EXPECT_EQ(run("energy " + fixture("three_collinear.json") + " --alpha 1.5").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
}

TEST_F(Cli, IoErrorsExitFour) {
  EXPECT_EQ(run("energy " + path("missing.json")).code, 4);
  EXPECT_EQ(run("gen --out " + path("no/such/dir/x.json")).code, 4);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  write("cfg.json", "{\"depth\": 2, \"lambda\": 0.25}");
  const Outcome cfg = run("gen --config " + path("cfg.json") + " --out " + path("c.json"));
  ASSERT_EQ(cfg.code, 0);
  EXPECT_NE(cfg.out.find("atoms: 16"), std::string::npos) << cfg.out;
  const Outcome flag = run("gen --config " + path("cfg.json") + " --depth 1");
  ASSERT_EQ(flag.code, 0);
  EXPECT_NE(flag.out.find("0.25"), std::string::npos);
  EXPECT_EQ(flag.out.find("0.0625"), std::string::npos);
}

TEST_F(Cli, CapacitySweepAndPlot) {
  const Outcome r = run("capacity --dim 0.5 --depth 1 2 3 --alpha 0.5 --plot " + path("p.svg"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 4);
  EXPECT_EQ(r.out.rfind("set_id,n,alpha,dim,depth,eps,method,value,energy,iters,status", 0), 0u);
  const std::string svg = slurp(path("p.svg"));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_TRUE(tags_balanced(svg));
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST_F(Cli, CompareAndBilip) {
  ASSERT_EQ(run("gen --dim 0.75 --depth 2 --out " + path("k.json")).code, 0);
  const Outcome c = run("compare " + path("k.json"));
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(count_lines(c.out), 2);
  const Outcome b = run("bilip " + path("k.json") + " --map identity dilate2");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(count_lines(b.out), 3);
  EXPECT_NE(b.out.find("identity"), std::string::npos);
  EXPECT_EQ(run("bilip " + path("k.json") + " --map fold").code, 3);
}

TEST_F(Cli, VerifyQuickPassesAndIsDeterministic) {
  ASSERT_EQ(run("verify --quick --out " + path("a.json")).code, 0);
  ASSERT_EQ(run("verify --quick --out " + path("b.json")).code, 0);
  const std::string a = slurp(path("a.json"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.json")));
  EXPECT_NE(a.find("\"failed\": 0"), std::string::npos);
}

TEST_F(Cli, VerifyJsonCounts) {
  const Outcome r = run("verify --quick --json --suite sandwich menger");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"suites\": 2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"passed\": 2"), std::string::npos);
}

TEST_F(Cli, InjectedFaultFailsSandwich) {
  const std::string cmd = std::string(RIESZCAP_CLI) + " verify --quick --inject-fault 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  const int status = pclose(p);
  EXPECT_EQ(WEXITSTATUS(status), 1);
  EXPECT_NE(out.find("FAIL sandwich"), std::string::npos) << out;
  EXPECT_NE(out.find("verification failed: sandwich"), std::string::npos) << out;
}

TEST_F(Cli, HelpAndVersion) {
  EXPECT_EQ(run("--help").code, 0);
  const Outcome v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}
