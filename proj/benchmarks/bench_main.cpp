#include "obslab/delay_line.hpp"
#include "obslab/lambert_w.hpp"
#include "obslab/landmarks.hpp"
#include "obslab/margins.hpp"
#include "obslab/riccati.hpp"
#include "obslab/sim.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace obslab;

void BM_RiccatiStep(benchmark::State& state) {
  const LandmarkSet lm{{Vec2(1, 3), Vec2(3, 1), Vec2(4, 4)}};
  const OutputMatrix c = build_output_matrix(lm);
  GainState g = make_gain_state(3, 0.6, 0.5, 0.5);
  const Mat6 info = information_matrix(c, g.sigma);
  VelocityInput u;
  u.omega = 0.3;
  u.v = Vec2(1.0, 0.0);
  for (auto _ : state) {
    g = step_riccati(g, u, u, u, info, 1e-3);
    benchmark::DoNotOptimize(g.p.data());
  }
}
BENCHMARK(BM_RiccatiStep);

// One convolution over the full delay window, m = D/dt taps.
void BM_ConvolveHistory(benchmark::State& state) {
  const double dt = 1e-3;
  const double delay = static_cast<double>(state.range(0)) * dt;
  const auto window = state.range(1) ? PhiWindow::sliding : PhiWindow::literal;
  DelayLine line(dt, delay + dt, VecX::Zero(6));
  OmegaIntegralHistory omega(dt, delay);
  const std::size_t steps = static_cast<std::size_t>(state.range(0)) + 1;
  double prev = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double w = std::sin(t);
    omega.advance(t, prev, w);
    prev = w;
    line.push(t, VecX::Constant(6, std::cos(t)));
  }
  const double t = static_cast<double>(steps) * dt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(convolve_history(line, omega, t, delay, window));
  }
}
BENCHMARK(BM_ConvolveHistory)->Args({100, 0})->Args({1000, 0})->Args({1000, 1});

void BM_ObserverRun(benchmark::State& state) {
  Scenario s = wheeled_robot_scenario(0.5, 0.6);
  s.t_end = 5.0;
  const auto kind = state.range(0) ? ObserverKind::standard : ObserverKind::predictive;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_one(s, kind).final_error);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.t_end / s.dt));
}
BENCHMARK(BM_ObserverRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LambertW(benchmark::State& state) {
  const auto branch = state.range(0) ? LambertBranch::minus_one : LambertBranch::principal;
  double z = -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w(z, branch));
    z = z < -0.01 ? z + 1e-6 : -0.3;
  }
}
BENCHMARK(BM_LambertW)->Arg(0)->Arg(1);

void BM_ComputeGamma(benchmark::State& state) {
  const SignalProfile omega = SignalProfile::sine(2.0, 0.02);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_gamma(omega, 1.0, 100.0, 1e-3));
  }
}
BENCHMARK(BM_ComputeGamma)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
