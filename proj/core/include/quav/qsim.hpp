#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace quav::qsim {

using cdouble = std::complex<double>;

inline constexpr int kMinQubits = 1;
inline constexpr int kMaxQubits = 16;

enum class GateKind { RX, RY, RZ, CNOT, CU3 };

// One gate application. Rotations use angles[0]; CU3 (the controlled
// three-angle universal rotation) uses all three as (theta, phi, lambda).
// CNOT and CU3 are the two-qubit kinds and carry a control wire.
struct GateOp {
  GateKind kind = GateKind::RX;
  int target = 0;
  int control = -1;
  std::array<double, 3> angles{0.0, 0.0, 0.0};

  static GateOp rx(int wire, double angle);
  static GateOp ry(int wire, double angle);
  static GateOp rz(int wire, double angle);
  static GateOp cnot(int control, int target);
  static GateOp cu3(int control, int target, double theta, double phi,
                    double lambda);

  bool two_qubit() const;
  // 2x2 matrix of the single-qubit action (rotations, or CU3's target block),
  // row major. Used by the simulator kernel and by unitarity checks.
  std::array<cdouble, 4> block2() const;
  // Dense matrix of the full gate (2x2 for rotations, 4x4 for CNOT/CU3,
  // ordered control-then-target), row major.
  std::vector<cdouble> dense_matrix() const;
};

// Exact dense statevector over 2^num_qubits basis states. Wire 0 is the most
// significant bit of the basis index.
class Statevector {
 public:
  explicit Statevector(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cdouble>& amplitudes() const { return amps_; }
  cdouble amplitude(std::size_t basis_index) const;

  void apply(const GateOp& gate);
  double expect_z(int wire) const;
  double norm_sq() const;

 private:
  int num_qubits_;
  std::vector<cdouble> amps_;
};

// |0...0> on num_qubits wires; throws std::invalid_argument outside [1, 16].
Statevector init_state(int num_qubits);
void apply_gate(Statevector& state, const GateOp& gate);
double expect_z(const Statevector& state, int wire);

}  // namespace quav::qsim
