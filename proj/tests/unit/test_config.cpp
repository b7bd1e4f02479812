#include "obslab/config.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace obslab;

namespace {

const std::string kMinimal =
    "schema = obslab-scenario/1\n"
    "landmarks_m = 1 3; 3 1; 4 4\n"
    "omega_rad_s = sine 2 0.02\n"
    "vx_m_s = const 1\n"
    "delay_s = 1\n"
    "dt_s = 0.001\n"
    "t_end_s = 100\n"
    "epsilon_per_s = 0.6\n";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Profile, ParseAndFormat) {
  const SignalProfile p = parse_profile("const 0.5; sine 2 0.02; sine -1 0.1 0.3");
  EXPECT_EQ(p.offset(), 0.5);
  ASSERT_EQ(p.terms().size(), 2u);
  EXPECT_EQ(p.terms()[1].amplitude, -1.0);
  EXPECT_EQ(p.terms()[1].phase_rad, 0.3);
  const SignalProfile q = parse_profile(format_profile(p));
  EXPECT_EQ(q.offset(), p.offset());
  EXPECT_EQ(q.terms().size(), p.terms().size());
  EXPECT_EQ(q.value(3.7), p.value(3.7));
  EXPECT_THROW(parse_profile("cosine 1 2"), Error);
  EXPECT_THROW(parse_profile("sine 1"), Error);
  EXPECT_THROW(parse_profile("const x"), Error);
}

TEST(Config, ShippedReferenceScenario) {
  const ScenarioConfig c = load_config(OBSLAB_SOURCE_DIR "/scenarios/paper_fig4.cfg");
  const Scenario& s = c.scenario;
  EXPECT_EQ(s.landmarks.size(), 3u);
  EXPECT_EQ(s.delay, 1.0);
  EXPECT_EQ(s.dt, 1e-3);
  EXPECT_EQ(s.epsilon, 0.6);
  EXPECT_EQ(s.phi_window, PhiWindow::literal);
  EXPECT_FALSE(s.noise.has_value());
  const Scenario ref = wheeled_robot_scenario();
  EXPECT_LT((s.x0 - ref.x0).norm(), 1e-15);
  EXPECT_EQ(s.profile.omega.value(12.5), ref.profile.omega.value(12.5));
}

TEST(Config, NoiseScenario) {
  const ScenarioConfig c = load_config(OBSLAB_SOURCE_DIR "/scenarios/noise_study.cfg");
  ASSERT_TRUE(c.scenario.noise.has_value());
  EXPECT_EQ(c.scenario.noise->sigma_landmark, 0.04);
  EXPECT_EQ(c.scenario.noise->sigma_velocity, 0.04);
  EXPECT_EQ(c.scenario.noise->seed, 20240607u);
  EXPECT_FALSE(c.margin.kappa1.has_value());
}

TEST(Config, DefaultsFillMissingKeys) {
  const ScenarioConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.scenario.sigma_scale, 0.5);
  EXPECT_EQ(c.scenario.x_hat0, StateVector::Zero());
  EXPECT_EQ(c.margin.rule, UpperBoundRule::max);
}

TEST(Config, RoundTrip) {
  ScenarioConfig c = load_config(OBSLAB_SOURCE_DIR "/scenarios/noise_study.cfg");
  c.scenario.x_hat0 << 0.1, -0.2, 1.0 / 3.0, 0, 0, 1;
  c.margin.kappa1 = 0.0123;
  const std::string text = format_config(c);
  const ScenarioConfig d = parse_config(text);
  EXPECT_EQ(format_config(d), text);
  EXPECT_EQ(d.scenario.x_hat0, c.scenario.x_hat0);
  EXPECT_EQ(*d.margin.kappa1, 0.0123);
}

TEST(Config, CommentsAndBlankLines) {
  const ScenarioConfig c = parse_config("# leading\n\n" + kMinimal + "   # trailing\npde_cells = 100  # inline\n");
  EXPECT_EQ(c.scenario.pde_cells, 100);
}

TEST(Config, LineNumberedErrors) {
  EXPECT_EQ(error_line(kMinimal + "bogus_key = 1\n"), 9);
  EXPECT_EQ(error_line(kMinimal + "delay_s = 2\n"), 9);
  EXPECT_EQ(error_line("landmarks_m = 1 3\nschema = obslab-scenario/1\n"), 1);
  EXPECT_EQ(error_line("schema = obslab-scenario/9\n"), 1);
  EXPECT_EQ(error_line(kMinimal + "dt_s\n"), 9);
  EXPECT_EQ(error_line("\n\nschema = obslab-scenario/1\nepsilon_per_s = fast\n"), 4);
  EXPECT_EQ(error_line("schema = obslab-scenario/1\nphi_window = sideways\n"), 2);
  EXPECT_EQ(error_line("# nothing\n"), 0);
}

TEST(Config, ScenarioInvariantsChecked) {
  // dt must be at most D/100.
  std::string text = kMinimal;
  text.replace(text.find("dt_s = 0.001"), 12, "dt_s = 0.02 ");
  EXPECT_THROW(parse_config(text), ConfigError);
  EXPECT_THROW(parse_config(kMinimal + "x_hat0_embedded = 1, 2, 3\n"), ConfigError);
}

TEST(Config, MessageCarriesSourceAndLine) {
  try {
    parse_config(kMinimal + "typo = 3\n", "demo.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("demo.cfg:9"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("typo"), std::string::npos);
  }
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/file.cfg"), ConfigError);
}
