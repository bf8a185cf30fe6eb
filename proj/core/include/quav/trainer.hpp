#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quav/config.hpp"
#include "quav/metrics_io.hpp"
#include "quav/mlp.hpp"
#include "quav/stochastics.hpp"
#include "quav/uav_env.hpp"
#include "quav/vqc.hpp"

namespace quav::trainer {

// Adaptive-moment gradient descent (decay 0.9 / 0.999, epsilon 1e-8). To
// ascend, negate the gradient before calling step.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t dim, double learning_rate);

  void step(std::span<const double> grad, std::vector<double>& params);

  double learning_rate() const { return lr_; }
  std::uint64_t step_count() const { return t_; }

  std::string to_json() const;
  static Adam from_json(const std::string& text);

 private:
  double lr_ = 0.001;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// ---------------------------------------------------------------------------
// Model interfaces. Both families expose one flat parameter vector so the
// update rules, optimizer, and finite-difference checks are model-agnostic.

class PolicyModel {
 public:
  virtual ~PolicyModel() = default;

  // Probability per action for input [o_m || s].
  virtual std::vector<double> action_probs(
      std::span<const double> input) const = 0;

  // Adds weight * d log pi(action | input) / d theta into grad.
  virtual void accumulate_log_prob_grad(std::span<const double> input,
                                        int action, double weight,
                                        std::vector<double>& grad) const = 0;

  virtual std::vector<double>& params() = 0;
  virtual const std::vector<double>& params() const = 0;
  std::size_t param_count() const { return params().size(); }

  virtual std::string checkpoint_json() const = 0;
};

class ValueModel {
 public:
  virtual ~ValueModel() = default;

  virtual double value(std::span<const double> input) const = 0;

  // Adds weight * dV(input) / d theta into grad.
  virtual void accumulate_value_grad(std::span<const double> input,
                                     double weight,
                                     std::vector<double>& grad) const = 0;

  virtual std::vector<double>& params() = 0;
  virtual const std::vector<double>& params() const = 0;
  std::size_t param_count() const { return params().size(); }

  virtual std::string checkpoint_json() const = 0;
};

// Variational circuit actor: pi = softmax(beta_a * readouts); log-prob
// gradients combine the softmax Jacobian with two-point-shift readout
// gradients.
class QuantumPolicy final : public PolicyModel {
 public:
  QuantumPolicy(vqc::CircuitModel circuit, double beta_a);

  std::vector<double> action_probs(std::span<const double> input) const override;
  void accumulate_log_prob_grad(std::span<const double> input, int action,
                                double weight,
                                std::vector<double>& grad) const override;
  std::vector<double>& params() override { return circuit_.params; }
  const std::vector<double>& params() const override { return circuit_.params; }
  std::string checkpoint_json() const override;

  const vqc::CircuitModel& circuit() const { return circuit_; }
  double beta_a() const { return beta_a_; }

 private:
  vqc::CircuitModel circuit_;
  double beta_a_;
};

// Variational circuit critic: V = beta_c * <Z_0>.
class QuantumValue final : public ValueModel {
 public:
  QuantumValue(vqc::CircuitModel circuit, double beta_c);

  double value(std::span<const double> input) const override;
  void accumulate_value_grad(std::span<const double> input, double weight,
                             std::vector<double>& grad) const override;
  std::vector<double>& params() override { return circuit_.params; }
  const std::vector<double>& params() const override { return circuit_.params; }
  std::string checkpoint_json() const override;

  const vqc::CircuitModel& circuit() const { return circuit_; }
  double beta_c() const { return beta_c_; }

 private:
  vqc::CircuitModel circuit_;
  double beta_c_;
};

// Perceptron actor: pi = softmax(logits).
class ClassicalPolicy final : public PolicyModel {
 public:
  explicit ClassicalPolicy(mlp::Mlp net);

  std::vector<double> action_probs(std::span<const double> input) const override;
  void accumulate_log_prob_grad(std::span<const double> input, int action,
                                double weight,
                                std::vector<double>& grad) const override;
  std::vector<double>& params() override { return net_.params(); }
  const std::vector<double>& params() const override { return net_.params(); }
  std::string checkpoint_json() const override;

  const mlp::Mlp& net() const { return net_; }

 private:
  mlp::Mlp net_;
};

// Perceptron critic: V = single linear output.
class ClassicalValue final : public ValueModel {
 public:
  explicit ClassicalValue(mlp::Mlp net);

  double value(std::span<const double> input) const override;
  void accumulate_value_grad(std::span<const double> input, double weight,
                             std::vector<double>& grad) const override;
  std::vector<double>& params() override { return net_.params(); }
  const std::vector<double>& params() const override { return net_.params(); }
  std::string checkpoint_json() const override;

  const mlp::Mlp& net() const { return net_; }

 private:
  mlp::Mlp net_;
};

// ---------------------------------------------------------------------------
// Model construction.

int state_dim(const env::ScenarioConfig& scenario);
int obs_dim(const env::ScenarioConfig& scenario);
int actor_input_dim(const env::ScenarioConfig& scenario);

struct ModelBundle {
  std::string kind;  // "quantum" or "classical"
  std::vector<std::unique_ptr<PolicyModel>> actors;
  std::unique_ptr<ValueModel> critic;

  std::size_t actor_param_count() const;
  std::size_t critic_param_count() const;
  std::size_t total_param_count() const;
};

// Deterministic initialization: critic parameters come from stream M+2 and
// actor m from stream M+3+m of the run seed. Quantum parameters start
// uniform in [-0.1, 0.1]; perceptrons use their fan-in rule.
ModelBundle make_quantum_models(const config::ExperimentConfig& cfg);
ModelBundle make_classical_models(const config::ExperimentConfig& cfg);
ModelBundle make_models(const config::ExperimentConfig& cfg,
                        const std::string& kind);

// ---------------------------------------------------------------------------
// Replay machinery.

struct Transition {
  std::vector<double> state_sensed;       // actor replay input suffix
  std::vector<double> next_state_sensed;
  std::vector<double> state_critic;       // critic input (config variant)
  std::vector<double> next_state_critic;
  std::vector<std::vector<double>> obs;   // sensed, one per agent
  std::vector<std::vector<double>> next_obs;
  std::vector<int> actions;
  double reward = 0.0;
};

// Fixed-capacity ring with FIFO eviction. Training starts once size reaches
// min_fill. Sampling is uniform with replacement and fully determined by the
// caller's stream.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t min_fill);

  void push(Transition t);
  std::size_t size() const { return full_ ? storage_.size() : head_; }
  std::size_t capacity() const { return capacity_; }
  bool ready() const { return size() >= min_fill_; }

  // i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;

  std::vector<std::size_t> sample_indices(std::size_t batch,
                                          stochastics::RngStream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t min_fill_;
  std::vector<Transition> storage_;
  std::size_t head_ = 0;
  bool full_ = false;
};

// ---------------------------------------------------------------------------
// Update rules.

// max(epsilon_min, epsilon_init - step * epsilon_anneal); step counts
// environment steps across the whole run.
double epsilon_at(std::uint64_t global_step, const config::TrainConfig& cfg);

// r + gamma * v_next - v.
double td_error(double r, double v, double v_next, double gamma);

// With probability epsilon a uniform action, otherwise the argmax of the
// policy on [obs || state]. The stream is only consumed when epsilon > 0.
int select_action(const PolicyModel& actor, std::span<const double> obs,
                  std::span<const double> state, double epsilon,
                  stochastics::RngStream& rng);

struct CriticUpdateResult {
  double loss = 0.0;            // sum of squared TD errors over the batch
  std::vector<double> deltas;   // per sample, from the pre-update critic
};

// One descent step on sum_i delta_i^2 where delta = r + gamma V(s') - V(s);
// the gradient is 2 delta (gamma dV(s') - dV(s)) summed over the batch. The
// returned deltas are shared with the actor update for the same batch.
CriticUpdateResult update_critic(ValueModel& critic, Adam& opt,
                                 const ReplayBuffer& buffer,
                                 std::span<const std::size_t> batch,
                                 double gamma);

// One ascent step on sum_i delta_i log pi(a_i | o_i, s_i) for one agent;
// deltas are constants here.
void update_actor(PolicyModel& actor, Adam& opt, const ReplayBuffer& buffer,
                  std::span<const std::size_t> batch,
                  std::span<const double> deltas, int agent_index);

// ---------------------------------------------------------------------------
// Runs.

struct RunCallbacks {
  std::function<void(const io::EpochRow&)> on_epoch;
  std::function<void(int epoch, std::uint64_t env_step)> on_checkpoint;
  // Fires after reset (outcome == nullptr) and after every environment step.
  std::function<void(int episode, const env::WorldState&,
                     const env::StepOutcome* outcome)>
      on_step;
};

// Epoch loop: reset, T environment steps under the epsilon-greedy joint
// policy with transitions pushed to the buffer, then (once the buffer is
// past min fill) one critic + one actor update per agent in index order.
std::vector<io::EpochRow> train(const config::ExperimentConfig& cfg,
                                        env::Environment& environment,
                                        ModelBundle& bundle,
                                        std::vector<Adam>& actor_opts,
                                        Adam& critic_opt,
                                        const RunCallbacks& callbacks = {});

// Greedy rollouts (epsilon = 0), no updates. One metrics row per episode.
std::vector<io::EpochRow> infer(const config::ExperimentConfig& cfg,
                                        env::Environment& environment,
                                        const ModelBundle& bundle,
                                        int episodes,
                                        const RunCallbacks& callbacks = {});

// Uniform random joint actions. The epsilon column reports 1.
std::vector<io::EpochRow> random_walk(
    const config::ExperimentConfig& cfg, env::Environment& environment,
    int episodes, const RunCallbacks& callbacks = {});

// ---------------------------------------------------------------------------
// Checkpoints: one JSON document with the models plus optimizer state.

std::string checkpoint_json(const ModelBundle& bundle,
                            const std::vector<Adam>& actor_opts,
                            const Adam& critic_opt, int epoch,
                            std::uint64_t env_step, std::uint64_t seed,
                            const std::string& config_hash);

struct LoadedCheckpoint {
  ModelBundle bundle;
  std::vector<Adam> actor_opts;
  Adam critic_opt;
  int epoch = 0;
  std::uint64_t env_step = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Rebuilds models and optimizers; throws DataError when the checkpoint does
// not match the config (kind, agent count, or input dimensions).
LoadedCheckpoint load_checkpoint(const std::string& text,
                                 const config::ExperimentConfig& cfg);

}  // namespace quav::trainer
