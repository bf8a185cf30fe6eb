#include "quav/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace quav::qsim {

namespace {

void check_wire(int wire, int num_qubits, const char* what) {
  if (wire < 0 || wire >= num_qubits) {
    throw std::invalid_argument(std::string(what) + " wire " +
                                std::to_string(wire) + " out of range for " +
                                std::to_string(num_qubits) + " qubits");
  }
}

void check_angle(double angle) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("gate angle must be finite");
  }
}

}  // namespace

GateOp GateOp::rx(int wire, double angle) {
  check_angle(angle);
  return GateOp{GateKind::RX, wire, -1, {angle, 0.0, 0.0}};
}

GateOp GateOp::ry(int wire, double angle) {
  check_angle(angle);
  return GateOp{GateKind::RY, wire, -1, {angle, 0.0, 0.0}};
}

GateOp GateOp::rz(int wire, double angle) {
  check_angle(angle);
  return GateOp{GateKind::RZ, wire, -1, {angle, 0.0, 0.0}};
}

GateOp GateOp::cnot(int control, int target) {
  return GateOp{GateKind::CNOT, target, control, {0.0, 0.0, 0.0}};
}

GateOp GateOp::cu3(int control, int target, double theta, double phi,
                   double lambda) {
  check_angle(theta);
  check_angle(phi);
  check_angle(lambda);
  return GateOp{GateKind::CU3, target, control, {theta, phi, lambda}};
}

bool GateOp::two_qubit() const {
  return kind == GateKind::CNOT || kind == GateKind::CU3;
}

std::array<cdouble, 4> GateOp::block2() const {
  const double half = angles[0] / 2.0;
  const double c = std::cos(half);
  const double s = std::sin(half);
  switch (kind) {
    case GateKind::RX:
      return {cdouble(c, 0.0), cdouble(0.0, -s), cdouble(0.0, -s),
              cdouble(c, 0.0)};
    case GateKind::RY:
      return {cdouble(c, 0.0), cdouble(-s, 0.0), cdouble(s, 0.0),
              cdouble(c, 0.0)};
    case GateKind::RZ:
      return {std::polar(1.0, -half), cdouble(0.0, 0.0), cdouble(0.0, 0.0),
              std::polar(1.0, half)};
    case GateKind::CNOT:
      return {cdouble(0.0, 0.0), cdouble(1.0, 0.0), cdouble(1.0, 0.0),
              cdouble(0.0, 0.0)};
    case GateKind::CU3: {
      const double phi = angles[1];
      const double lambda = angles[2];
      return {cdouble(c, 0.0), -std::polar(s, lambda), std::polar(s, phi),
              std::polar(c, lambda + phi)};
    }
  }
  throw std::logic_error("unreachable gate kind");
}

std::vector<cdouble> GateOp::dense_matrix() const {
  const auto u = block2();
  if (!two_qubit()) {
    return {u[0], u[1], u[2], u[3]};
  }
  // Basis (control, target): |00>, |01>, |10>, |11>.
  std::vector<cdouble> m(16, cdouble(0.0, 0.0));
  m[0] = 1.0;
  m[5] = 1.0;
  m[10] = u[0];
  m[11] = u[1];
  m[14] = u[2];
  m[15] = u[3];
  return m;
}

Statevector::Statevector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < kMinQubits || num_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count " + std::to_string(num_qubits) +
                                " outside supported range [1, 16]");
  }
  amps_.assign(std::size_t{1} << num_qubits, cdouble(0.0, 0.0));
  amps_[0] = cdouble(1.0, 0.0);
}

cdouble Statevector::amplitude(std::size_t basis_index) const {
  if (basis_index >= amps_.size()) {
    throw std::invalid_argument("basis index out of range");
  }
  return amps_[basis_index];
}

void Statevector::apply(const GateOp& gate) {
  check_wire(gate.target, num_qubits_, "target");
  if (gate.two_qubit()) {
    check_wire(gate.control, num_qubits_, "control");
    if (gate.control == gate.target) {
      throw std::invalid_argument("control and target wires must differ");
    }
  }

  // Wire w flips bit (num_qubits - 1 - w) of the basis index: wire 0 is the
  // most significant bit.
  const std::size_t tbit = std::size_t{1} << (num_qubits_ - 1 - gate.target);
  const auto u = gate.block2();
  const std::size_t n = amps_.size();

  if (!gate.two_qubit()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i & tbit) continue;
      const cdouble a0 = amps_[i];
      const cdouble a1 = amps_[i | tbit];
      amps_[i] = u[0] * a0 + u[1] * a1;
      amps_[i | tbit] = u[2] * a0 + u[3] * a1;
    }
    return;
  }

  const std::size_t cbit = std::size_t{1} << (num_qubits_ - 1 - gate.control);
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & tbit) || !(i & cbit)) continue;
    const cdouble a0 = amps_[i];
    const cdouble a1 = amps_[i | tbit];
    amps_[i] = u[0] * a0 + u[1] * a1;
    amps_[i | tbit] = u[2] * a0 + u[3] * a1;
  }
}

double Statevector::expect_z(int wire) const {
  check_wire(wire, num_qubits_, "observable");
  const std::size_t bit = std::size_t{1} << (num_qubits_ - 1 - wire);
  double acc = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    acc += (i & bit) ? -p : p;
  }
  return acc;
}

double Statevector::norm_sq() const {
  double acc = 0.0;
  for (const cdouble& a : amps_) acc += std::norm(a);
  return acc;
}

Statevector init_state(int num_qubits) { return Statevector(num_qubits); }

void apply_gate(Statevector& state, const GateOp& gate) { state.apply(gate); }

double expect_z(const Statevector& state, int wire) {
  return state.expect_z(wire);
}

}  // namespace quav::qsim
