#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "quav/qsim.hpp"

namespace quav::vqc {

// Data re-uploading circuit: per block, an angle-encoding layer over one
// slice of the input, a trainable per-qubit three-angle rotation layer, and a
// ring of CNOTs. Readouts are Pauli-Z expectations on observable_wires.
struct CircuitModel {
  std::string role;  // "actor" or "critic" (checkpoint metadata)
  int num_qubits = 0;
  int num_blocks = 0;
  int input_dim = 0;
  std::vector<int> observable_wires;
  std::vector<double> params;  // num_blocks * num_qubits * 3, radians

  static CircuitModel make(std::string role, int num_qubits, int num_blocks,
                           int input_dim, std::vector<int> observable_wires);

  std::size_t param_count() const { return params.size(); }
  void validate() const;
};

// Encoding gates for one block: RY(arctan(x_j)) on each qubit, where j walks
// a num_qubits-wide slice of x starting at block_index * num_qubits, wrapping
// modulo input_dim. Angles land in (-pi/2, pi/2) for any finite input.
std::vector<qsim::GateOp> encode_input(const CircuitModel& model,
                                       std::span<const double> x,
                                       int block_index);

// Z expectation per observable wire after running the full circuit on x.
std::vector<double> forward(const CircuitModel& model,
                            std::span<const double> x);

// d<Z_obs>/d(param i) for one observable, via the two-point shift rule:
// grad_i = (f(theta_i + pi/2) - f(theta_i - pi/2)) / 2.
std::vector<double> parameter_shift_grad(const CircuitModel& model,
                                         std::span<const double> x,
                                         int observable_index);

// Gradients of every readout at once; result[o][i] = d<Z_o>/d(param i).
// Costs the same 2 * param_count circuit evaluations as a single observable.
std::vector<std::vector<double>> parameter_shift_grad_all(
    const CircuitModel& model, std::span<const double> x);

// softmax(beta_a * readouts); one probability per observable wire.
std::vector<double> actor_policy(const CircuitModel& model,
                                 std::span<const double> obs_vec,
                                 double beta_a);

// beta_c * readout of the first observable wire.
double critic_value(const CircuitModel& model, std::span<const double> state_vec,
                    double beta_c);

std::vector<double> softmax(std::span<const double> logits);

struct ComplexityEstimate {
  std::size_t encoder_ops = 0;        // proportional to input dimension
  std::size_t parameterized_ops = 0;  // trainable parameter count
  std::size_t measurements = 0;       // readout wires
  std::size_t total() const {
    return encoder_ops + parameterized_ops + measurements;
  }
};
ComplexityEstimate complexity_estimate(const CircuitModel& model);

// Elementary-unit cost of a full training run: T * (C_critic + M * (|A| +
// C_actor)), where each C is the model's complexity_estimate total.
std::size_t training_cost_units(std::size_t episode_steps, std::size_t num_agents,
                                const CircuitModel& actor,
                                const CircuitModel& critic);

// JSON checkpoint with fields {version, role, num_qubits, num_blocks,
// input_dim, observable_wires, params}.
std::string to_checkpoint_json(const CircuitModel& model);
CircuitModel from_checkpoint_json(const std::string& text);

}  // namespace quav::vqc
