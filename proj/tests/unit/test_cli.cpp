#include "golden.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kSource = OBSLAB_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("obslab_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OBSLAB_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string cfg(const std::string& name) { return kSource + "/scenarios/" + name; }

}  // namespace

TEST(Cli, RunReferenceScenarioExitsZero) {
  const fs::path out = scratch("run");
  EXPECT_EQ(cli("run " + cfg("paper_fig4.cfg") + " --out " + out.string(), out / "log"), 0);
  for (const char* f : {"run.csv", "run.svg", "summary.txt"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string summary = obslab::testing::read_file((out / "summary.txt").string());
  EXPECT_NE(summary.find("verdict = converged"), std::string::npos);
  fs::remove_all(out);
}

TEST(Cli, DivergedRunExitsTwo) {
  const fs::path out = scratch("diverged");
  std::string text = obslab::testing::read_file(cfg("paper_fig4.cfg"));
  text.replace(text.find("delay_s = 1"), 11, "delay_s = 1.2");
  std::ofstream(out / "d12.cfg") << text;
  EXPECT_EQ(cli("run " + (out / "d12.cfg").string() + " --observer standard --out " + out.string(), out / "log"), 2);
  fs::remove_all(out);
}

TEST(Cli, UsageAndInputErrorsExitOne) {
  const fs::path out = scratch("usage");
  EXPECT_EQ(cli("run /nonexistent.cfg --out " + out.string(), out / "log"), 1);
  EXPECT_EQ(cli("run " + cfg("paper_fig4.cfg") + " --observer sideways", out / "log"), 1);
  EXPECT_EQ(cli("frobnicate", out / "log"), 1);
  EXPECT_EQ(cli("", out / "log"), 1);
  std::ofstream(out / "bad.cfg") << "schema = obslab-scenario/1\ndelay_s = 1\nspeed = 3\n";
  EXPECT_EQ(cli("run " + (out / "bad.cfg").string() + " --out " + out.string(), out / "log"), 1);
  const std::string log = obslab::testing::read_file((out / "log").string());
  EXPECT_NE(log.find("bad.cfg:3"), std::string::npos) << log;
  EXPECT_EQ(cli("--help", out / "log"), 0);
  fs::remove_all(out);
}

TEST(Cli, CollinearLandmarksWarn) {
  const fs::path out = scratch("collinear");
  std::string text = obslab::testing::read_file(cfg("paper_fig4.cfg"));
  text.replace(text.find("landmarks_m = 1 3; 3 1; 4 4"), 27, "landmarks_m = 0 0; 1 1; 2 2");
  text.replace(text.find("t_end_s = 100"), 13, "t_end_s = 5");
  std::ofstream(out / "col.cfg") << text;
  const int code = cli("run " + (out / "col.cfg").string() + " --out " + out.string(), out / "log");
  EXPECT_TRUE(code == 0 || code == 2) << code;
  const std::string summary = obslab::testing::read_file((out / "summary.txt").string());
  EXPECT_NE(summary.find("observability: FAILED"), std::string::npos);
  fs::remove_all(out);
}

TEST(Cli, MarginExitCodes) {
  const fs::path out = scratch("margin");
  EXPECT_EQ(cli("margin " + cfg("constant_turn.cfg") + " --out " + out.string(), out / "log"), 0);
  const std::string report = obslab::testing::read_file((out / "margin.txt").string());
  EXPECT_NE(report.find("d_max_status = unbounded"), std::string::npos);
  EXPECT_NE(report.find("eps_status = unbounded"), std::string::npos);
  EXPECT_EQ(cli("margin " + cfg("noise_study.cfg") + " --out " + out.string(), out / "log"), 3);
  EXPECT_EQ(cli("margin " + cfg("constant_turn.cfg") + " --kappa1 0.001 --out " + out.string(), out / "log"), 0);
  EXPECT_EQ(cli("margin " + cfg("constant_turn.cfg") + " --kappa1 nope", out / "log"), 1);
  fs::remove_all(out);
}

TEST(Cli, SweepWritesTableAndHalvedRun) {
  const fs::path out = scratch("sweep");
  std::string text = obslab::testing::read_file(cfg("paper_fig4.cfg"));
  text.replace(text.find("t_end_s = 100"), 13, "t_end_s = 4");
  std::ofstream(out / "short.cfg") << text;
  EXPECT_EQ(cli("sweep " + (out / "short.cfg").string() + " --delays 0.5,1 --gains 2 --dt-halving --out " +
                    out.string(),
                out / "log"),
            0);
  const std::string table = obslab::testing::read_file((out / "sweep.csv").string());
  EXPECT_NE(table.find("0.5,2,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "sweep_half_dt.csv"));
  fs::remove_all(out);
}
