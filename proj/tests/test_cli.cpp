// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(COVDIFF_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("covdiff_cli_" + name);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("solve --nx 12 --precond nc2 --alpha 0.01"), 0);
  EXPECT_EQ(run("solve --nx 12 --max-outer 2"), 1);
  EXPECT_EQ(run("solve --nx 12 --max-outer 2 --allow-nonconverged"), 0);
  EXPECT_EQ(run("solve --nx 12 --ell 7"), 2);
  EXPECT_EQ(run("solve --nx 12 --precond ilu"), 2);
  EXPECT_EQ(run("solve --nx 12 --precond nc2 --alpha 50"), 2);
  EXPECT_EQ(run("solve --nx 12 --inner-precond amg"), 2);
  EXPECT_EQ(run("solve --bogus"), 2);
  EXPECT_EQ(run("table 9"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("verify"), 0);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, SolveJson) {
  const auto out = tmp("solve.json");
  ASSERT_EQ(run("solve --nx 12 --precond sp --alpha 0.01 --format json --amg-matvec-equiv 50 --out " +
                out.string()),
            0);
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["nx"], 12);
  EXPECT_EQ(j["precond"], "sp");
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_DOUBLE_EQ(j["equivalent_matvecs"].get<double>(),
                   j["matvecs"].get<double>() + 50.0 * j["amg_setups"].get<double>());
  EXPECT_EQ(j["amg_setups"].get<int>(), 10 * j["outer_iterations"].get<int>());
  std::filesystem::remove(out);
}

TEST(Cli, TableAndSweepCsvAreDeterministic) {
  const auto a = tmp("a.csv"), b = tmp("b.csv");
  const std::string args = "table 3 --nx 16 --alpha 0.01 --eta 0.2,0.3 --threads 2 --out ";
  ASSERT_EQ(run(args + a.string()), 0);
  ASSERT_EQ(run(args + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a).substr(0, 20), "alpha,nx,precond,eta");
  ASSERT_EQ(run("sweep-alpha --nx 16 --alpha 1,0.01 --precond exact,nc2 --out " + a.string()), 0);
  int lines = 0;
  for (char ch : slurp(a)) lines += ch == '\n';
  EXPECT_EQ(lines, 5);
  ASSERT_EQ(run("trace --nx 16 --precond nc2 --alpha 0.01 --format json --out " + a.string()), 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(a)).is_array());
  ASSERT_EQ(run("trace --nx 16 --alpha 1 --inner-block 3 --out " + a.string()), 0);
  EXPECT_EQ(slurp(a).substr(0, 24), "iteration,residual,bound");
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

}  // namespace
