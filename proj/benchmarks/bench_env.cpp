// Environment benchmarks: full step cost (service assignment, overlap Monte
// Carlo, reward) at the reference and smoke scenario scales.
#include <benchmark/benchmark.h>

#include <vector>

#include "quav/config.hpp"
#include "quav/uav_env.hpp"

namespace {

quav::env::Environment make_env(int num_uavs, int num_users, double map_m,
                                bool noise) {
  quav::env::ScenarioConfig scenario;
  scenario.num_uavs = num_uavs;
  scenario.num_users = num_users;
  scenario.map_size_m = map_m;
  scenario.observe_threshold_m = map_m;
  scenario.episode_steps = 1000000;  // never ends inside the benchmark loop
  quav::env::NoiseOptions options;
  options.state_noise = noise;
  options.action_noise = noise;
  // A default battery dies after ~41 hover steps, which would flip the loop
  // onto the trivial dead-fleet path; scale it so every iteration measures a
  // live step.
  quav::env::UavEnergyParams energy;
  energy.battery_capacity_ah *= 1e6;
  return quav::env::Environment(scenario, {}, {}, options, energy, 42);
}

void run_steps(benchmark::State& state, quav::env::Environment& env) {
  env.reset();
  const std::vector<int> joint(
      static_cast<std::size_t>(env.scenario().num_uavs), 4);  // hover
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.step(joint));
  }
}

void BM_StepSmokeScale(benchmark::State& state) {
  auto env = make_env(2, 6, 2000.0, false);
  run_steps(state, env);
}
BENCHMARK(BM_StepSmokeScale);

void BM_StepReferenceScale(benchmark::State& state) {
  auto env = make_env(4, 25, 6000.0, false);
  run_steps(state, env);
}
BENCHMARK(BM_StepReferenceScale);

void BM_StepReferenceScaleDualNoise(benchmark::State& state) {
  auto env = make_env(4, 25, 6000.0, true);
  run_steps(state, env);
}
BENCHMARK(BM_StepReferenceScaleDualNoise);

void BM_OverlapFactor(benchmark::State& state) {
  auto env = make_env(4, 25, 6000.0, false);
  env.reset();
  const auto& world = env.world();
  const double radius = env.service_radius_m();
  for (auto _ : state) {
    benchmark::DoNotOptimize(quav::env::overlap_factor(world, radius));
  }
}
BENCHMARK(BM_OverlapFactor);

}  // namespace

BENCHMARK_MAIN();
