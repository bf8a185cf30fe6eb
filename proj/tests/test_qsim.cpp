#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "quav/qsim.hpp"
#include "support/oracles.hpp"

using quav::qsim::GateKind;
using quav::qsim::GateOp;
using quav::qsim::Statevector;

namespace {

GateOp random_gate(std::mt19937_64& rng, int num_qubits) {
  std::uniform_int_distribution<int> kind_pick(0, 4);
  std::uniform_int_distribution<int> wire_pick(0, num_qubits - 1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  switch (kind_pick(rng)) {
    case 0:
      return GateOp::rx(wire_pick(rng), angle(rng));
    case 1:
      return GateOp::ry(wire_pick(rng), angle(rng));
    case 2:
      return GateOp::rz(wire_pick(rng), angle(rng));
    case 3: {
      const int c = wire_pick(rng);
      int t = wire_pick(rng);
      while (t == c) t = wire_pick(rng);
      return GateOp::cnot(c, t);
    }
    default: {
      const int c = wire_pick(rng);
      int t = wire_pick(rng);
      while (t == c) t = wire_pick(rng);
      return GateOp::cu3(c, t, angle(rng), angle(rng), angle(rng));
    }
  }
}

}  // namespace

TEST_CASE("statevector starts in the all-zeros basis state") {
  Statevector sv(3);
  CHECK(sv.num_qubits() == 3);
  CHECK(sv.dim() == 8);
  CHECK(sv.amplitude(0) == std::complex<double>(1.0, 0.0));
  for (std::size_t i = 1; i < 8; ++i) {
    CHECK(sv.amplitude(i) == std::complex<double>(0.0, 0.0));
  }
  CHECK(sv.norm_sq() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("qubit count bounds are enforced") {
  CHECK_THROWS_AS(Statevector(0), std::invalid_argument);
  CHECK_THROWS_AS(Statevector(17), std::invalid_argument);
  CHECK_NOTHROW(Statevector(1));
  CHECK_NOTHROW(Statevector(16));
}

TEST_CASE("invalid angles and wires are rejected") {
  CHECK_THROWS_AS(GateOp::ry(0, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(
      GateOp::cu3(0, 1, 0.1, std::numeric_limits<double>::infinity(), 0.2),
      std::invalid_argument);
  Statevector sv(2);
  CHECK_THROWS_AS(sv.apply(GateOp::rx(2, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(sv.apply(GateOp::rx(-1, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(sv.apply(GateOp::cnot(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(sv.amplitude(4), std::invalid_argument);
}

TEST_CASE("wire 0 is the most significant bit") {
  // RX(pi) maps |0> -> -i|1> on the targeted wire.
  Statevector sv(2);
  sv.apply(GateOp::rx(0, std::numbers::pi));
  CHECK(std::abs(sv.amplitude(2) - std::complex<double>(0.0, -1.0)) < 1e-15);

  Statevector sv2(2);
  sv2.apply(GateOp::rx(1, std::numbers::pi));
  CHECK(std::abs(sv2.amplitude(1) - std::complex<double>(0.0, -1.0)) < 1e-15);
}

TEST_CASE("cnot truth table on basis states") {
  // Prepare |10> (wire 0 set), control on wire 0, target wire 1 -> |11>.
  Statevector sv(2);
  sv.apply(GateOp::rx(0, std::numbers::pi));
  sv.apply(GateOp::cnot(0, 1));
  CHECK(std::abs(std::abs(sv.amplitude(3)) - 1.0) < 1e-15);

  // Control clear: state unchanged.
  Statevector idle(2);
  idle.apply(GateOp::cnot(0, 1));
  CHECK(std::abs(idle.amplitude(0) - std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("single-qubit matrices match the exponential-map definitions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  for (int rep = 0; rep < 25; ++rep) {
    const double theta = angle(rng);
    for (const auto& op : {GateOp::rx(0, theta), GateOp::ry(0, theta),
                           GateOp::rz(0, theta)}) {
      Statevector sv(1);
      sv.apply(op);
      const auto ref =
          oracles::matvec(oracles::full_gate_matrix(1, op),
                          oracles::cvec{{1.0, 0.0}, {0.0, 0.0}});
      CHECK(std::abs(sv.amplitude(0) - ref[0]) < 1e-14);
      CHECK(std::abs(sv.amplitude(1) - ref[1]) < 1e-14);
    }
  }
}

TEST_CASE("every gate kind is unitary as a full matrix") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    const auto op = random_gate(rng, 3);
    const auto m = oracles::full_gate_matrix(3, op);
    const auto prod = oracles::matmul(oracles::dagger(m), m);
    for (std::size_t i = 0; i < prod.size(); ++i) {
      for (std::size_t j = 0; j < prod.size(); ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        CHECK(std::abs(prod[i][j] - std::complex<double>(expected, 0.0)) <
              1e-12);
      }
    }
  }
}

TEST_CASE("random circuits match the dense-matrix oracle") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const int num_qubits = 2 + static_cast<int>(rng() % 3);
    Statevector sv(num_qubits);
    oracles::cvec ref(sv.dim(), {0.0, 0.0});
    ref[0] = {1.0, 0.0};
    for (int g = 0; g < 30; ++g) {
      const auto op = random_gate(rng, num_qubits);
      sv.apply(op);
      ref = oracles::matvec(oracles::full_gate_matrix(num_qubits, op), ref);
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::abs(sv.amplitude(i) - ref[i]) < 1e-12);
    }
  }
}

TEST_CASE("norm stays within 1e-10 of unity over 1000 random gates") {
  std::mt19937_64 rng(29);
  Statevector sv(6);
  for (int g = 0; g < 1000; ++g) {
    sv.apply(random_gate(rng, 6));
    CHECK(std::abs(sv.norm_sq() - 1.0) < 1e-10);
  }
}

TEST_CASE("pauli-z expectation after ry rotation equals cos(theta)") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(-2.0 * std::numbers::pi,
                                               2.0 * std::numbers::pi);
  for (int rep = 0; rep < 100; ++rep) {
    const double theta = angle(rng);
    Statevector sv(1);
    sv.apply(GateOp::ry(0, theta));
    CHECK(std::abs(sv.expect_z(0) - std::cos(theta)) < 1e-10);
  }
}

TEST_CASE("expect_z reads the targeted wire") {
  Statevector sv(2);
  sv.apply(GateOp::rx(0, std::numbers::pi));  // -> |10> up to phase
  CHECK(sv.expect_z(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sv.expect_z(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(sv.expect_z(2), std::invalid_argument);
}

TEST_CASE("controlled u3 matches its dense matrix on superpositions") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  for (int rep = 0; rep < 20; ++rep) {
    Statevector sv(3);
    // Build a nontrivial superposition first.
    const std::vector<GateOp> prep = {GateOp::ry(0, angle(rng)),
                                      GateOp::ry(1, angle(rng)),
                                      GateOp::ry(2, angle(rng)),
                                      GateOp::cnot(0, 2)};
    oracles::cvec ref(8, {0.0, 0.0});
    ref[0] = {1.0, 0.0};
    for (const auto& op : prep) {
      sv.apply(op);
      ref = oracles::matvec(oracles::full_gate_matrix(3, op), ref);
    }
    const auto cu = GateOp::cu3(2, 0, angle(rng), angle(rng), angle(rng));
    sv.apply(cu);
    ref = oracles::matvec(oracles::full_gate_matrix(3, cu), ref);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(sv.amplitude(i) - ref[i]) < 1e-12);
    }
  }
}
