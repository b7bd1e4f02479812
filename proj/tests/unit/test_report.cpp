#include "golden.hpp"
#include "obslab/config.hpp"
#include "obslab/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace obslab;

namespace {

ScenarioConfig golden_config() { return load_config(OBSLAB_GOLDEN_DIR "/short_noisy.cfg"); }

std::string run_csv(const std::vector<RunRecord>& recs) {
  std::ostringstream os;
  write_run_csv(os, recs);
  return os.str();
}

}  // namespace

TEST(RunCsv, GoldenFile) {
  const auto recs = run(golden_config().scenario, ObserverSelection::both);
  const std::string csv = run_csv(recs);
  EXPECT_TRUE(obslab::testing::matches_golden("short_noisy_run.csv", csv))
      << "regenerate with OBSLAB_UPDATE_GOLDEN=1 only after an intended change";
  EXPECT_EQ(csv, run_csv(run(golden_config().scenario, ObserverSelection::both)));
}

TEST(RunCsv, SchemaAndColumns) {
  const auto recs = run(golden_config().scenario, ObserverSelection::predictive);
  std::istringstream in(run_csv(recs));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema = obslab-run-csv/1");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("observer,t_s,x_tilde_norm,y_tilde_norm,eq_norm,pde_gap,lambda_min_P,lambda_max_P,x1,", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 19);
  }
  EXPECT_EQ(rows, static_cast<int>(recs.front().t.size()));
}

TEST(SweepCsv, Format) {
  SweepResult r;
  r.cells = {{1.0, 0.6, Verdict::converged, 1e-3, -1.0}, {1.0, 2.0, Verdict::diverged, 50.0, 12.5}};
  r.thresholds = {{1.0, 0.6}, {1.2, std::nan("")}};
  std::ostringstream os;
  write_sweep_csv(os, r);
  EXPECT_EQ(os.str(),
            "# schema = obslab-sweep-csv/1\n"
            "# observer = predictive\n"
            "delay_s,epsilon_per_s,verdict,final_error,divergence_time_s\n"
            "1,0.59999999999999998,converged,0.001,\n"
            "1,2,diverged,50,12.5\n"
            "# threshold delay_s=1 epsilon_per_s=0.59999999999999998\n"
            "# threshold delay_s=1.2 epsilon_per_s=none\n");
}

TEST(Svg, DeterministicAndSelfContained) {
  const auto recs = run(golden_config().scenario, ObserverSelection::both);
  const std::string a = render_error_svg(recs, "demo <run>");
  EXPECT_EQ(a, render_error_svg(recs, "demo <run>"));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("demo &lt;run&gt;"), std::string::npos);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n') > 10, true);
  EXPECT_EQ(a.find("href"), std::string::npos);
  EXPECT_EQ(a.find("2026"), std::string::npos);
  EXPECT_TRUE(obslab::testing::matches_golden("short_noisy_run.svg", a));
}

TEST(Summary, CarriesVerdictsAndConfigEcho) {
  const ScenarioConfig cfg = golden_config();
  const auto recs = run(cfg.scenario, ObserverSelection::both);
  const std::string s = format_run_summary(recs, cfg);
  EXPECT_EQ(s.rfind("observability: ok (rank 6 of 6)\n", 0), 0u);
  EXPECT_NE(s.find("[predictive]\nverdict = bounded_noise"), std::string::npos);
  EXPECT_NE(s.find("[standard]"), std::string::npos);
  EXPECT_NE(s.find("max_pde_gap = "), std::string::npos);
  EXPECT_NE(s.find("noise_algorithm = mt19937_64 + Marsaglia polar"), std::string::npos);
  EXPECT_NE(s.find(format_config(cfg)), std::string::npos);
}
