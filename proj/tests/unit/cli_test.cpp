#include "cli_app.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bteb");
  std::ostringstream out;
  std::ostringstream err;
  const int code = bteb::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bteb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out() const { return dir_.string(); }
  fs::path dir_;
};

const std::string kStudyConfig = std::string(BTEB_SOURCE_DIR) + "/configs/study.conf";

TEST_F(CliTest, DistSingleRow) {
  const Result r = run({"dist", "--theta", "0.6", "--r", "3", "--x-from", "3", "--x-to", "3", "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = read_lines(dir_ / "dist.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0].rfind("# bteb ", 0), 0u);
  EXPECT_NE(lines[0].find("command=dist"), std::string::npos);
  EXPECT_EQ(lines[1], "x,pmf,cdf");
  std::istringstream row(lines[2]);
  std::string x, pmf, cdf;
  std::getline(row, x, ',');
  std::getline(row, pmf, ',');
  std::getline(row, cdf, ',');
  EXPECT_EQ(x, "3");
  EXPECT_NEAR(std::stod(pmf), std::exp(-1.8), 1e-16);
  EXPECT_EQ(pmf, cdf);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, bteb::cli::kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, bteb::cli::kExitUsage);
  EXPECT_EQ(run({"dist", "--out", out()}).code, bteb::cli::kExitUsage);
  EXPECT_EQ(run({"dist", "--theta", "1.5", "--out", out()}).code, bteb::cli::kExitUsage);
  EXPECT_EQ(run({"reproduce-study", "--out", out()}).code, bteb::cli::kExitUsage);
  const Result missing = run({"reproduce-study", "--config", (dir_ / "absent.conf").string(), "--out", out()});
  EXPECT_EQ(missing.code, bteb::cli::kExitUsage);
  EXPECT_FALSE(missing.err.empty());
  EXPECT_EQ(run({"bayes-table", "--prior", "uniform", "--prior-a", "0", "--prior-b", "1", "--out", out()}).code,
            bteb::cli::kExitUsage);
}

TEST_F(CliTest, UnknownConfigKeyRejected) {
  std::ofstream(dir_ / "bad.conf") << "r = 3\nbogus = 1\n";
  EXPECT_EQ(run({"bayes-table", "--config", (dir_ / "bad.conf").string(), "--out", out()}).code,
            bteb::cli::kExitUsage);
}

TEST_F(CliTest, StudyWritesTableAndIsReproducible) {
  const std::vector<std::string> args{"reproduce-study", "--config", kStudyConfig, "--reps", "2",
                                      "--grid-m", "500", "--out", out()};
  const Result first = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("bayes_risk"), std::string::npos);
  const auto lines = read_lines(dir_ / "table1.csv");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1], "r,n,reps,S_eb_mean,S_eb_se,S_mono_mean,S_mono_se,S_mle");
  EXPECT_EQ(lines[2].rfind("3,100,2,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("3,500,2,", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "replications.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "study_summary.txt"));

  const std::string table = slurp(dir_ / "table1.csv");
  const std::string reps = slurp(dir_ / "replications.csv");
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--threads", "2"});
  ASSERT_EQ(run(threaded).code, 0);
  EXPECT_EQ(slurp(dir_ / "table1.csv"), table);
  EXPECT_EQ(slurp(dir_ / "replications.csv"), reps);
}

TEST_F(CliTest, Figure1Columns) {
  const Result r = run({"figure1", "--config", kStudyConfig, "--grid-m", "500", "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = read_lines(dir_ / "estimates.csv");
  ASSERT_GT(lines.size(), 20u);
  EXPECT_EQ(lines[1], "x,count_n,theta_eb,theta_monotone,theta_bayes");
  EXPECT_EQ(lines[2].rfind("3,", 0), 0u);
  double prev = -1;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::vector<std::string> cells;
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 5u) << lines[i];
    const double mono = std::stod(cells[3]);
    EXPECT_GE(mono, prev);
    prev = mono;
  }
}

TEST_F(CliTest, HistoryFileDrivesEbAndMonotonize) {
  {
    std::ofstream h(dir_ / "history.txt");
    for (int x : {3, 3, 4, 5, 5, 5, 7, 9, 12, 4, 6, 3}) h << x << '\n';
  }
  const std::string hist = (dir_ / "history.txt").string();
  const Result eb = run({"eb", "--history", hist, "--cap", "20", "--out", out()});
  ASSERT_EQ(eb.code, 0) << eb.err;
  const auto lines = read_lines(dir_ / "eb_table.csv");
  EXPECT_EQ(lines[1], "x,count,psi,q,theta_eb");
  EXPECT_EQ(lines.size(), 2u + 18u);

  const Result mono =
      run({"monotonize", "--history", hist, "--cap", "20", "--dstar-x", "3,5", "--grid-m", "200", "--out", out()});
  ASSERT_EQ(mono.code, 0) << mono.err;
  // metadata, max_cdf_adjustment comment, header, rows
  EXPECT_EQ(read_lines(dir_ / "monotone.csv").size(), 3u + 18u);
  EXPECT_EQ(read_lines(dir_ / "alpha.csv").size(), 2u + 201u);
  const auto dstar = read_lines(dir_ / "dstar.csv");
  EXPECT_EQ(dstar[1], "a,dstar_x3,dstar_x5");
}

TEST_F(CliTest, OutDirFromEnvironment) {
  ::setenv("BTEB_OUT_DIR", out().c_str(), 1);
  const Result r = run({"dist", "--theta", "0.3"});
  ::unsetenv("BTEB_OUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_lines(dir_ / "dist.csv").size(), 2u + 21u);
}

}  // namespace
