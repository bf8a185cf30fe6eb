// Statevector kernel microbenchmarks: single-gate application cost as a
// function of register width, and a representative mixed-gate layer.
#include <benchmark/benchmark.h>

#include <random>

#include "quav/qsim.hpp"

namespace {

using quav::qsim::GateOp;
using quav::qsim::Statevector;

void BM_SingleQubitRotation(benchmark::State& state) {
  const int num_qubits = static_cast<int>(state.range(0));
  Statevector sv(num_qubits);
  double angle = 0.001;
  for (auto _ : state) {
    sv.apply(GateOp::ry(0, angle));
    angle += 0.001;
    benchmark::DoNotOptimize(sv.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << num_qubits));
}
BENCHMARK(BM_SingleQubitRotation)->DenseRange(4, 12, 2);

void BM_Cnot(benchmark::State& state) {
  const int num_qubits = static_cast<int>(state.range(0));
  Statevector sv(num_qubits);
  sv.apply(GateOp::ry(0, 0.7));
  for (auto _ : state) {
    sv.apply(GateOp::cnot(0, num_qubits - 1));
    benchmark::DoNotOptimize(sv.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << num_qubits));
}
BENCHMARK(BM_Cnot)->DenseRange(4, 12, 2);

// One entangling layer as the circuits use it: a rotation triple per qubit
// followed by the CNOT ring.
void BM_CircuitLayer(benchmark::State& state) {
  const int num_qubits = static_cast<int>(state.range(0));
  Statevector sv(num_qubits);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  for (auto _ : state) {
    for (int w = 0; w < num_qubits; ++w) {
      sv.apply(GateOp::rz(w, angle(rng)));
      sv.apply(GateOp::ry(w, angle(rng)));
      sv.apply(GateOp::rz(w, angle(rng)));
    }
    for (int w = 0; w < num_qubits; ++w) {
      sv.apply(GateOp::cnot(w, (w + 1) % num_qubits));
    }
    benchmark::DoNotOptimize(sv.amplitudes().data());
  }
}
BENCHMARK(BM_CircuitLayer)->DenseRange(4, 10, 2);

}  // namespace
