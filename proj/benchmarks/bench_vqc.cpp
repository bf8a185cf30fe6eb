// Variational-circuit benchmarks: one forward pass and one full shift-rule
// gradient at the reference actor and critic shapes.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "quav/vqc.hpp"

namespace {

quav::vqc::CircuitModel reference_model(int num_qubits, int num_blocks,
                                        int input_dim, int readouts) {
  std::vector<int> wires;
  for (int w = 0; w < readouts; ++w) wires.push_back(w);
  auto model = quav::vqc::CircuitModel::make("bench", num_qubits, num_blocks,
                                             input_dim, std::move(wires));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  for (double& p : model.params) p = angle(rng);
  return model;
}

std::vector<double> reference_input(int dim) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::vector<double> x(dim);
  for (double& v : x) v = value(rng);
  return x;
}

// Reference actor: 5 qubits, 4 blocks, 5 action readouts.
void BM_ActorForward(benchmark::State& state) {
  const auto model = reference_model(5, 4, 32, 5);
  const auto x = reference_input(32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quav::vqc::forward(model, x));
  }
}
BENCHMARK(BM_ActorForward);

// Reference critic: 8 qubits, 4 blocks, one readout.
void BM_CriticForward(benchmark::State& state) {
  const auto model = reference_model(8, 4, 200, 1);
  const auto x = reference_input(200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quav::vqc::forward(model, x));
  }
}
BENCHMARK(BM_CriticForward);

// Full two-point-shift gradient over every readout; cost is 2 * param_count
// forward passes regardless of readout count.
void BM_ActorShiftGradient(benchmark::State& state) {
  const auto model = reference_model(5, static_cast<int>(state.range(0)), 32, 5);
  const auto x = reference_input(32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quav::vqc::parameter_shift_grad_all(model, x));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(model.params.size()));
}
BENCHMARK(BM_ActorShiftGradient)->DenseRange(1, 4, 1);

void BM_CriticShiftGradient(benchmark::State& state) {
  const auto model = reference_model(8, static_cast<int>(state.range(0)), 200, 1);
  const auto x = reference_input(200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quav::vqc::parameter_shift_grad_all(model, x));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(model.params.size()));
}
BENCHMARK(BM_CriticShiftGradient)->DenseRange(1, 4, 1);

}  // namespace
