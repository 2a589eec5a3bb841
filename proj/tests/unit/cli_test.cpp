#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CASPER_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("casper_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("verify --kernel jacobi1d --extents 4096"), 0);
  EXPECT_EQ(run("verify --kernel jacobi1d --extents 4096 --corrupt-constant 0=0.5"), 1);
  EXPECT_EQ(run("verify --kernel pt7_1d --extents 3"), 2);
  EXPECT_EQ(run("run --kernel nope --extents 64"), 2);
  EXPECT_EQ(run("run --kernel jacobi1d --extents 64 --mode sideways"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, RunWritesReport) {
  const auto out = dir_ / "r.json";
  ASSERT_EQ(run("run --kernel jacobi2d --extents 64x64 --mode both --out " + out.string()), 0);
  const auto text = slurp(out);
  EXPECT_NE(text.find("\"speedup\""), std::string::npos);
  EXPECT_NE(text.find("\"baseline\""), std::string::npos);
}

TEST_F(Cli, BadConfigNamesLine) {
  const auto cfg = dir_ / "bad.ini";
  std::ofstream(cfg) << "[llc]\nhit_latency = 8\nwidth = 3\n";
  EXPECT_EQ(run("run --kernel jacobi1d --extents 64 --config " + cfg.string()), 2);
}

TEST_F(Cli, SweepCsv) {
  const auto m = dir_ / "m.json";
  const auto csv = dir_ / "out.csv";
  std::ofstream(m) << R"({"kernels": ["jacobi1d", "pt7_1d"], "extents": ["4096"], "modes": ["casper", "baseline"]})";
  ASSERT_EQ(run("sweep " + m.string() + " -j 2 --out " + csv.string()), 0);
  std::istringstream in(slurp(csv));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0].rfind("schema_version,", 0), 0u);
  EXPECT_NE(lines[1].find("jacobi1d"), std::string::npos);
  EXPECT_NE(lines[1].find("casper"), std::string::npos);
  EXPECT_NE(lines[4].find("pt7_1d"), std::string::npos);
  EXPECT_NE(lines[4].find("baseline"), std::string::npos);
}

TEST_F(Cli, AsmRoundTrip) {
  const auto bin = dir_ / "j.cspr";
  ASSERT_EQ(run("asm --kernel jacobi2d --out " + bin.string()), 0);
  EXPECT_EQ(fs::file_size(bin), 16u + 5 * 2 + 8);
  EXPECT_EQ(run("asm --from " + bin.string()), 0);
  std::ofstream(dir_ / "junk.cspr") << "junk";
  EXPECT_NE(run("asm --from " + (dir_ / "junk.cspr").string()), 0);
}

TEST_F(Cli, CommittedInstructionCount) {
  const auto out = dir_ / "j.json";
  ASSERT_EQ(run("run --kernel jacobi1d --extents 64 --mode casper --out " + out.string()), 0);
  EXPECT_NE(slurp(out).find("\"committed_instructions\": 24"), std::string::npos);
}
