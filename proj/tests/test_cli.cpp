#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef IIA_CLI
#error "IIA_CLI must name the built CLI"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(IIA_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("iia_cli_" + std::to_string(::getpid()) + "_" + name);
}

TEST(Cli, FeasibilityVerdictsAndExitCodes) {
  const auto four = run("feasibility --K 4 --reciprocal --trials 2 --seed 3");
  EXPECT_EQ(four.code, 0);
  const auto j = nlohmann::json::parse(four.out);
  EXPECT_EQ(j.at("consensus"), "feasible");
  EXPECT_EQ(run("feasibility --K 5 --trials 2 --seed 3").code, 2);
  EXPECT_EQ(run("feasibility --K 3 --reciprocal --neutralization --trials 2 --seed 3").code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("feasibility --K 4").code, 1);  // no seed
  EXPECT_EQ(run("simulate --K 3 --snr 0:5:40").code, 1);
  EXPECT_EQ(run("feasibility --K 4 --seed 1 --backend gpu").code, 1);
  EXPECT_EQ(run("simulate --K 3 --snr x --seed 1").code, 1);
  EXPECT_EQ(run("bogus").code, 1);
}

TEST(Cli, ReRunsAreByteIdentical) {
  const std::string f = "feasibility --K 4 --trials 3 --seed 11";
  EXPECT_EQ(run(f).out, run(f + " --jobs 2").out);
  const std::string c = "construct --sample --K 3 --reciprocal --seed 9";
  const auto a = run(c), b = run(c);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConstructAllOnes) {
  const auto r = run("construct --family all-ones --K 3");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("verification").at("ok").get<bool>());
}

TEST(Cli, ChannelFileRoundTrip) {
  const auto path = temp("ch.json");
  ASSERT_EQ(run("channel --K 3 --reciprocal --seed 4 --out " + path.string()).code, 0);
  EXPECT_EQ(run("feasibility --neutralization --channel " + path.string()).code, 2);
  EXPECT_EQ(run("construct --channel " + path.string()).code, 0);
  std::filesystem::remove(path);
}

TEST(Cli, SimulateCsv) {
  const std::string s =
      "simulate --K 3 --snr 0:5:40 --trials 2 --seed 7 --restarts 1 --iterations 20";
  const auto a = run(s);
  ASSERT_EQ(a.code, 0);
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "snr_db,ia_sum_rate,ts_sum_rate,trials");
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  EXPECT_EQ(rows, 9);
  EXPECT_EQ(run(s + " --jobs 2").out, a.out);
}

TEST(Cli, PlanTable) {
  const auto r = run("plan --K-min 3 --K-max 9");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("K,N,N_v,N_e,dof,conjectural\n", 0), 0U);
  EXPECT_NE(r.out.find("\n9,3,"), std::string::npos);
}

}  // namespace
