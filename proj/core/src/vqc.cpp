#include "quav/vqc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "quav/errors.hpp"

namespace quav::vqc {

namespace {

constexpr int kCheckpointVersion = 1;

void run_block(qsim::Statevector& state, const CircuitModel& model,
               std::span<const double> x, std::span<const double> params,
               int block) {
  for (const auto& gate : encode_input(model, x, block)) {
    state.apply(gate);
  }
  const int q = model.num_qubits;
  for (int w = 0; w < q; ++w) {
    const std::size_t base = (static_cast<std::size_t>(block) * q + w) * 3;
    state.apply(qsim::GateOp::rz(w, params[base]));
    state.apply(qsim::GateOp::ry(w, params[base + 1]));
    state.apply(qsim::GateOp::rz(w, params[base + 2]));
  }
  if (q >= 2) {
    for (int w = 0; w < q; ++w) {
      state.apply(qsim::GateOp::cnot(w, (w + 1) % q));
    }
  }
}

std::vector<double> forward_with_params(const CircuitModel& model,
                                        std::span<const double> x,
                                        std::span<const double> params) {
  qsim::Statevector state(model.num_qubits);
  for (int b = 0; b < model.num_blocks; ++b) {
    run_block(state, model, x, params, b);
  }
  std::vector<double> readouts;
  readouts.reserve(model.observable_wires.size());
  for (int wire : model.observable_wires) {
    readouts.push_back(state.expect_z(wire));
  }
  return readouts;
}

void check_input(const CircuitModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.input_dim) {
    throw std::invalid_argument(
        "input size " + std::to_string(x.size()) + " does not match model input_dim " +
        std::to_string(model.input_dim));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw DataError("non-finite input entry");
    }
  }
}

}  // namespace

CircuitModel CircuitModel::make(std::string role, int num_qubits,
                                int num_blocks, int input_dim,
                                std::vector<int> observable_wires) {
  CircuitModel model;
  model.role = std::move(role);
  model.num_qubits = num_qubits;
  model.num_blocks = num_blocks;
  model.input_dim = input_dim;
  model.observable_wires = std::move(observable_wires);
  // Size the parameter vector only for sane shapes; validate() owns the
  // error reporting for negative or out-of-range dimensions.
  if (num_blocks >= 0 && num_qubits > 0) {
    model.params.assign(
        static_cast<std::size_t>(num_blocks) * num_qubits * 3, 0.0);
  }
  model.validate();
  return model;
}

void CircuitModel::validate() const {
  if (num_qubits < qsim::kMinQubits || num_qubits > qsim::kMaxQubits) {
    throw std::invalid_argument("num_qubits outside [1, 16]");
  }
  if (num_blocks < 0) {
    throw std::invalid_argument("num_blocks must be >= 0");
  }
  if (input_dim < 0) {
    throw std::invalid_argument("input_dim must be >= 0");
  }
  if (observable_wires.empty()) {
    throw std::invalid_argument("at least one observable wire required");
  }
  for (int wire : observable_wires) {
    if (wire < 0 || wire >= num_qubits) {
      throw std::invalid_argument("observable wire " + std::to_string(wire) +
                                  " out of range");
    }
  }
  const std::size_t expected =
      static_cast<std::size_t>(num_blocks) * num_qubits * 3;
  if (params.size() != expected) {
    throw std::invalid_argument(
        "params length " + std::to_string(params.size()) + " != blocks*qubits*3 = " +
        std::to_string(expected));
  }
  for (double p : params) {
    if (!std::isfinite(p)) {
      throw std::invalid_argument("non-finite parameter");
    }
  }
}

std::vector<qsim::GateOp> encode_input(const CircuitModel& model,
                                       std::span<const double> x,
                                       int block_index) {
  check_input(model, x);
  if (block_index < 0 || block_index >= std::max(model.num_blocks, 1)) {
    throw std::invalid_argument("block index out of range");
  }
  std::vector<qsim::GateOp> gates;
  if (model.input_dim == 0) {
    return gates;
  }
  gates.reserve(model.num_qubits);
  const std::size_t offset =
      static_cast<std::size_t>(block_index) * model.num_qubits;
  for (int w = 0; w < model.num_qubits; ++w) {
    const std::size_t idx = (offset + w) % model.input_dim;
    gates.push_back(qsim::GateOp::ry(w, std::atan(x[idx])));
  }
  return gates;
}

std::vector<double> forward(const CircuitModel& model,
                            std::span<const double> x) {
  model.validate();
  check_input(model, x);
  return forward_with_params(model, x, model.params);
}

std::vector<std::vector<double>> parameter_shift_grad_all(
    const CircuitModel& model, std::span<const double> x) {
  model.validate();
  check_input(model, x);
  const std::size_t n_params = model.params.size();
  const std::size_t n_obs = model.observable_wires.size();
  std::vector<std::vector<double>> grad(n_obs,
                                        std::vector<double>(n_params, 0.0));
  std::vector<double> shifted(model.params.begin(), model.params.end());
  constexpr double kShift = std::numbers::pi / 2.0;
  for (std::size_t i = 0; i < n_params; ++i) {
    const double original = shifted[i];
    shifted[i] = original + kShift;
    const auto plus = forward_with_params(model, x, shifted);
    shifted[i] = original - kShift;
    const auto minus = forward_with_params(model, x, shifted);
    shifted[i] = original;
    for (std::size_t o = 0; o < n_obs; ++o) {
      grad[o][i] = 0.5 * (plus[o] - minus[o]);
    }
  }
  return grad;
}

std::vector<double> parameter_shift_grad(const CircuitModel& model,
                                         std::span<const double> x,
                                         int observable_index) {
  if (observable_index < 0 ||
      observable_index >= static_cast<int>(model.observable_wires.size())) {
    throw std::invalid_argument("observable index out of range");
  }
  auto all = parameter_shift_grad_all(model, x);
  return std::move(all[observable_index]);
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw std::invalid_argument("softmax over empty vector");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - top);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> actor_policy(const CircuitModel& model,
                                 std::span<const double> obs_vec,
                                 double beta_a) {
  if (!std::isfinite(beta_a)) {
    throw std::invalid_argument("beta_a must be finite");
  }
  auto readouts = forward(model, obs_vec);
  for (double& r : readouts) r *= beta_a;
  return softmax(readouts);
}

double critic_value(const CircuitModel& model,
                    std::span<const double> state_vec, double beta_c) {
  if (!std::isfinite(beta_c)) {
    throw std::invalid_argument("beta_c must be finite");
  }
  return beta_c * forward(model, state_vec).front();
}

ComplexityEstimate complexity_estimate(const CircuitModel& model) {
  return ComplexityEstimate{
      static_cast<std::size_t>(model.input_dim),
      model.params.size(),
      model.observable_wires.size(),
  };
}

std::size_t training_cost_units(std::size_t episode_steps,
                                std::size_t num_agents,
                                const CircuitModel& actor,
                                const CircuitModel& critic) {
  const std::size_t c_actor = complexity_estimate(actor).total();
  const std::size_t c_critic = complexity_estimate(critic).total();
  const std::size_t actions = actor.observable_wires.size();
  return episode_steps * (c_critic + num_agents * (actions + c_actor));
}

std::string to_checkpoint_json(const CircuitModel& model) {
  model.validate();
  nlohmann::json doc{
      {"version", kCheckpointVersion},
      {"role", model.role},
      {"num_qubits", model.num_qubits},
      {"num_blocks", model.num_blocks},
      {"input_dim", model.input_dim},
      {"observable_wires", model.observable_wires},
      {"params", model.params},
  };
  return doc.dump(2);
}

CircuitModel from_checkpoint_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint parse failure: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version");
    }
    CircuitModel model;
    model.role = doc.at("role").get<std::string>();
    model.num_qubits = doc.at("num_qubits").get<int>();
    model.num_blocks = doc.at("num_blocks").get<int>();
    model.input_dim = doc.at("input_dim").get<int>();
    model.observable_wires = doc.at("observable_wires").get<std::vector<int>>();
    model.params = doc.at("params").get<std::vector<double>>();
    try {
      model.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("invalid checkpoint: ") + e.what());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint field failure: ") + e.what());
  }
}

}  // namespace quav::vqc
