#include "quav/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "quav/errors.hpp"

namespace quav::trainer {

namespace {

using nlohmann::json;

std::vector<double> joined(std::span<const double> head,
                           std::span<const double> tail) {
  std::vector<double> out;
  out.reserve(head.size() + tail.size());
  out.insert(out.end(), head.begin(), head.end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) +
                                              " is not finite");
  }
}

int argmax_index(std::span<const double> values) {
  return static_cast<int>(std::distance(
      values.begin(), std::max_element(values.begin(), values.end())));
}

double mean_remaining_energy(const env::WorldState& world) {
  if (world.uavs.empty()) return 0.0;
  double sum = 0.0;
  for (const env::UavState& uav : world.uavs) sum += uav.energy_j;
  return sum / static_cast<double>(world.uavs.size());
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  const auto now = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(now - start).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(std::size_t dim, double learning_rate)
    : lr_(learning_rate), m_(dim, 0.0), v_(dim, 0.0) {
  // A zero rate is a legal no-op optimizer (useful for ablations); negative
  // or non-finite rates are rejected.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
}

void Adam::step(std::span<const double> grad, std::vector<double>& params) {
  if (grad.size() != params.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("optimizer dimension mismatch");
  }
  ++t_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / bias1;
    const double v_hat = v_[i] / bias2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

std::string Adam::to_json() const {
  json j;
  j["lr"] = lr_;
  j["beta1"] = beta1_;
  j["beta2"] = beta2_;
  j["eps"] = eps_;
  j["t"] = t_;
  j["m"] = m_;
  j["v"] = v_;
  return j.dump();
}

Adam Adam::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Adam opt;
    opt.lr_ = j.at("lr").get<double>();
    opt.beta1_ = j.at("beta1").get<double>();
    opt.beta2_ = j.at("beta2").get<double>();
    opt.eps_ = j.at("eps").get<double>();
    opt.t_ = j.at("t").get<std::uint64_t>();
    opt.m_ = j.at("m").get<std::vector<double>>();
    opt.v_ = j.at("v").get<std::vector<double>>();
    if (opt.m_.size() != opt.v_.size()) {
      throw DataError("optimizer moment vectors disagree in length");
    }
    return opt;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad optimizer state: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Quantum models

QuantumPolicy::QuantumPolicy(vqc::CircuitModel circuit, double beta_a)
    : circuit_(std::move(circuit)), beta_a_(beta_a) {
  circuit_.validate();
  if (!(beta_a_ > 0.0)) throw std::invalid_argument("beta_a must be > 0");
}

std::vector<double> QuantumPolicy::action_probs(
    std::span<const double> input) const {
  return vqc::actor_policy(circuit_, input, beta_a_);
}

void QuantumPolicy::accumulate_log_prob_grad(std::span<const double> input,
                                             int action, double weight,
                                             std::vector<double>& grad) const {
  const std::size_t n = circuit_.param_count();
  if (grad.size() != n) throw std::invalid_argument("gradient size mismatch");
  const int num_actions = static_cast<int>(circuit_.observable_wires.size());
  if (action < 0 || action >= num_actions) {
    throw std::invalid_argument("action index out of range");
  }
  const std::vector<double> probs = action_probs(input);
  const std::vector<std::vector<double>> readout_grads =
      vqc::parameter_shift_grad_all(circuit_, input);
  // d log pi_a / d theta = beta * (dO_a - sum_j pi_j dO_j).
  for (std::size_t i = 0; i < n; ++i) {
    double mixed = 0.0;
    for (int j = 0; j < num_actions; ++j) {
      mixed += probs[static_cast<std::size_t>(j)] *
               readout_grads[static_cast<std::size_t>(j)][i];
    }
    const double g =
        beta_a_ * (readout_grads[static_cast<std::size_t>(action)][i] - mixed);
    grad[i] += weight * g;
  }
}

std::string QuantumPolicy::checkpoint_json() const {
  return vqc::to_checkpoint_json(circuit_);
}

QuantumValue::QuantumValue(vqc::CircuitModel circuit, double beta_c)
    : circuit_(std::move(circuit)), beta_c_(beta_c) {
  circuit_.validate();
  if (!(beta_c_ > 0.0)) throw std::invalid_argument("beta_c must be > 0");
}

double QuantumValue::value(std::span<const double> input) const {
  return vqc::critic_value(circuit_, input, beta_c_);
}

void QuantumValue::accumulate_value_grad(std::span<const double> input,
                                         double weight,
                                         std::vector<double>& grad) const {
  const std::size_t n = circuit_.param_count();
  if (grad.size() != n) throw std::invalid_argument("gradient size mismatch");
  const std::vector<double> readout_grad =
      vqc::parameter_shift_grad(circuit_, input, 0);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] += weight * beta_c_ * readout_grad[i];
  }
}

std::string QuantumValue::checkpoint_json() const {
  return vqc::to_checkpoint_json(circuit_);
}

// ---------------------------------------------------------------------------
// Classical models

ClassicalPolicy::ClassicalPolicy(mlp::Mlp net) : net_(std::move(net)) {
  if (net_.output_dim() != env::kNumActions) {
    throw std::invalid_argument("policy net must emit one logit per action");
  }
}

std::vector<double> ClassicalPolicy::action_probs(
    std::span<const double> input) const {
  return vqc::softmax(net_.forward(input));
}

void ClassicalPolicy::accumulate_log_prob_grad(std::span<const double> input,
                                               int action, double weight,
                                               std::vector<double>& grad) const {
  if (grad.size() != net_.param_count()) {
    throw std::invalid_argument("gradient size mismatch");
  }
  if (action < 0 || action >= net_.output_dim()) {
    throw std::invalid_argument("action index out of range");
  }
  const std::vector<double> probs = action_probs(input);
  // d log pi_a / d logits = e_a - pi.
  std::vector<double> out_grad(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) {
    out_grad[j] = weight * ((static_cast<int>(j) == action ? 1.0 : 0.0) -
                            probs[j]);
  }
  net_.backward(input, out_grad, grad);
}

std::string ClassicalPolicy::checkpoint_json() const {
  return mlp::to_checkpoint_json(net_, "actor");
}

ClassicalValue::ClassicalValue(mlp::Mlp net) : net_(std::move(net)) {
  if (net_.output_dim() != 1) {
    throw std::invalid_argument("value net must emit a single output");
  }
}

double ClassicalValue::value(std::span<const double> input) const {
  return net_.forward(input).front();
}

void ClassicalValue::accumulate_value_grad(std::span<const double> input,
                                           double weight,
                                           std::vector<double>& grad) const {
  if (grad.size() != net_.param_count()) {
    throw std::invalid_argument("gradient size mismatch");
  }
  const std::vector<double> out_grad = {weight};
  net_.backward(input, out_grad, grad);
}

std::string ClassicalValue::checkpoint_json() const {
  return mlp::to_checkpoint_json(net_, "critic");
}

// ---------------------------------------------------------------------------
// Bundles

int state_dim(const env::ScenarioConfig& scenario) {
  return 2 * scenario.num_uavs * scenario.num_users;
}

int obs_dim(const env::ScenarioConfig& scenario) {
  return scenario.num_uavs + 3;
}

int actor_input_dim(const env::ScenarioConfig& scenario) {
  return obs_dim(scenario) + state_dim(scenario);
}

std::size_t ModelBundle::actor_param_count() const {
  return actors.empty() ? 0 : actors.front()->param_count();
}

std::size_t ModelBundle::critic_param_count() const {
  return critic ? critic->param_count() : 0;
}

std::size_t ModelBundle::total_param_count() const {
  return actors.size() * actor_param_count() + critic_param_count();
}

namespace {

constexpr double kInitSpread = 0.1;  // quantum angles start in [-0.1, 0.1]

std::vector<int> actor_readout_wires() {
  std::vector<int> wires(env::kNumActions);
  std::iota(wires.begin(), wires.end(), 0);
  return wires;
}

}  // namespace

ModelBundle make_quantum_models(const config::ExperimentConfig& cfg) {
  const int num_agents = cfg.scenario.num_uavs;
  ModelBundle bundle;
  bundle.kind = "quantum";

  vqc::CircuitModel critic = vqc::CircuitModel::make(
      "critic", cfg.model.critic_qubits, cfg.model.critic_blocks,
      state_dim(cfg.scenario), {0});
  stochastics::RngStream critic_rng(cfg.seed,
                                    static_cast<std::uint64_t>(num_agents) + 2);
  for (double& p : critic.params) p = critic_rng.uniform(-kInitSpread, kInitSpread);
  bundle.critic = std::make_unique<QuantumValue>(std::move(critic),
                                                 cfg.model.beta_c);

  bundle.actors.reserve(num_agents);
  for (int m = 0; m < num_agents; ++m) {
    vqc::CircuitModel actor = vqc::CircuitModel::make(
        "actor", cfg.model.actor_qubits, cfg.model.actor_blocks,
        actor_input_dim(cfg.scenario), actor_readout_wires());
    stochastics::RngStream actor_rng(
        cfg.seed, static_cast<std::uint64_t>(num_agents) + 3 +
                      static_cast<std::uint64_t>(m));
    for (double& p : actor.params) p = actor_rng.uniform(-kInitSpread, kInitSpread);
    bundle.actors.push_back(
        std::make_unique<QuantumPolicy>(std::move(actor), cfg.model.beta_a));
  }
  return bundle;
}

ModelBundle make_classical_models(const config::ExperimentConfig& cfg) {
  const int num_agents = cfg.scenario.num_uavs;
  ModelBundle bundle;
  bundle.kind = "classical";

  mlp::Mlp critic(state_dim(cfg.scenario), cfg.model.hidden_width, 1);
  stochastics::RngStream critic_rng(cfg.seed,
                                    static_cast<std::uint64_t>(num_agents) + 2);
  critic.init_weights(critic_rng);
  bundle.critic = std::make_unique<ClassicalValue>(std::move(critic));

  bundle.actors.reserve(num_agents);
  for (int m = 0; m < num_agents; ++m) {
    mlp::Mlp actor(actor_input_dim(cfg.scenario), cfg.model.hidden_width,
                   env::kNumActions);
    stochastics::RngStream actor_rng(
        cfg.seed, static_cast<std::uint64_t>(num_agents) + 3 +
                      static_cast<std::uint64_t>(m));
    actor.init_weights(actor_rng);
    bundle.actors.push_back(std::make_unique<ClassicalPolicy>(std::move(actor)));
  }
  return bundle;
}

ModelBundle make_models(const config::ExperimentConfig& cfg,
                        const std::string& kind) {
  if (kind == "quantum") return make_quantum_models(cfg);
  if (kind == "classical") return make_classical_models(cfg);
  throw std::invalid_argument("unknown model kind: " + kind);
}

// ---------------------------------------------------------------------------
// Replay buffer

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t min_fill)
    : capacity_(capacity), min_fill_(min_fill) {
  if (capacity_ == 0) throw std::invalid_argument("capacity must be > 0");
  if (min_fill_ == 0 || min_fill_ > capacity_) {
    throw std::invalid_argument("min fill must lie in [1, capacity]");
  }
  storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (!std::isfinite(t.reward)) {
    throw NumericError("transition reward is not finite");
  }
  if (!full_) {
    storage_.push_back(std::move(t));
    head_ = storage_.size();
    if (storage_.size() == capacity_) {
      full_ = true;
      head_ = 0;
    }
    return;
  }
  storage_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("replay index out of range");
  if (!full_) return storage_[i];
  return storage_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(
    std::size_t batch, stochastics::RngStream& rng) const {
  if (size() == 0) throw std::logic_error("cannot sample an empty buffer");
  std::vector<std::size_t> indices(batch);
  for (std::size_t& idx : indices) {
    idx = static_cast<std::size_t>(rng.uniform_int(size()));
  }
  return indices;
}

// ---------------------------------------------------------------------------
// Update rules

double epsilon_at(std::uint64_t global_step, const config::TrainConfig& cfg) {
  const double annealed =
      cfg.epsilon_init - static_cast<double>(global_step) * cfg.epsilon_anneal;
  return std::max(cfg.epsilon_min, annealed);
}

double td_error(double r, double v, double v_next, double gamma) {
  return r + gamma * v_next - v;
}

int select_action(const PolicyModel& actor, std::span<const double> obs,
                  std::span<const double> state, double epsilon,
                  stochastics::RngStream& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return static_cast<int>(rng.uniform_int(env::kNumActions));
  }
  const std::vector<double> input = joined(obs, state);
  const std::vector<double> probs = actor.action_probs(input);
  return argmax_index(probs);
}

CriticUpdateResult update_critic(ValueModel& critic, Adam& opt,
                                 const ReplayBuffer& buffer,
                                 std::span<const std::size_t> batch,
                                 double gamma) {
  CriticUpdateResult result;
  result.deltas.reserve(batch.size());
  std::vector<double> grad(critic.param_count(), 0.0);
  for (std::size_t idx : batch) {
    const Transition& tr = buffer.at(idx);
    const double v = critic.value(tr.state_critic);
    const double v_next = critic.value(tr.next_state_critic);
    const double delta = td_error(tr.reward, v, v_next, gamma);
    result.deltas.push_back(delta);
    result.loss += delta * delta;
    // d/dtheta delta^2 = 2 delta (gamma dV(s') - dV(s)).
    critic.accumulate_value_grad(tr.state_critic, -2.0 * delta, grad);
    critic.accumulate_value_grad(tr.next_state_critic, 2.0 * gamma * delta,
                                 grad);
  }
  if (!std::isfinite(result.loss)) {
    throw NumericError("critic loss is not finite");
  }
  require_finite(grad, "critic gradient");
  opt.step(grad, critic.params());
  return result;
}

void update_actor(PolicyModel& actor, Adam& opt, const ReplayBuffer& buffer,
                  std::span<const std::size_t> batch,
                  std::span<const double> deltas, int agent_index) {
  if (batch.size() != deltas.size()) {
    throw std::invalid_argument("batch and delta lengths differ");
  }
  std::vector<double> grad(actor.param_count(), 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = buffer.at(batch[i]);
    if (agent_index < 0 ||
        agent_index >= static_cast<int>(tr.obs.size()) ||
        agent_index >= static_cast<int>(tr.actions.size())) {
      throw std::invalid_argument("agent index out of range");
    }
    const std::vector<double> input =
        joined(tr.obs[static_cast<std::size_t>(agent_index)], tr.state_sensed);
    // Ascent on delta * log pi realized as descent on the negation.
    actor.accumulate_log_prob_grad(
        input, tr.actions[static_cast<std::size_t>(agent_index)], -deltas[i],
        grad);
  }
  require_finite(grad, "actor gradient");
  opt.step(grad, actor.params());
}

// ---------------------------------------------------------------------------
// Runs

namespace {

void check_bundle(const config::ExperimentConfig& cfg,
                  const ModelBundle& bundle) {
  if (static_cast<int>(bundle.actors.size()) != cfg.scenario.num_uavs) {
    throw DataError("model bundle actor count does not match the scenario");
  }
  if (!bundle.critic) throw DataError("model bundle has no critic");
}

}  // namespace

std::vector<io::EpochRow> train(const config::ExperimentConfig& cfg,
                                        env::Environment& environment,
                                        ModelBundle& bundle,
                                        std::vector<Adam>& actor_opts,
                                        Adam& critic_opt,
                                        const RunCallbacks& callbacks) {
  check_bundle(cfg, bundle);
  if (actor_opts.size() != bundle.actors.size()) {
    throw DataError("one optimizer per actor is required");
  }
  const int num_agents = cfg.scenario.num_uavs;
  const int horizon = cfg.scenario.episode_steps;
  const bool critic_noisy =
      cfg.train.critic_state == config::CriticStateVariant::Noisy;

  ReplayBuffer buffer(cfg.train.buffer_capacity, cfg.train.buffer_min_fill);
  stochastics::RngStream trainer_stream(
      cfg.seed, static_cast<std::uint64_t>(num_agents) + 1);

  std::vector<io::EpochRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.train.epochs));
  std::uint64_t env_step = 0;

  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    env::Snapshot snap = environment.reset();
    if (callbacks.on_step) {
      callbacks.on_step(epoch, environment.world(), nullptr);
    }

    double reward_sum = 0.0;
    double support_sum = 0.0;
    double qos_sum = 0.0;
    std::vector<int> actions(static_cast<std::size_t>(num_agents));
    for (int t = 0; t < horizon; ++t) {
      const double epsilon = epsilon_at(env_step, cfg.train);
      for (int m = 0; m < num_agents; ++m) {
        actions[static_cast<std::size_t>(m)] = select_action(
            *bundle.actors[static_cast<std::size_t>(m)],
            snap.obs_sensed[static_cast<std::size_t>(m)], snap.state_sensed,
            epsilon, trainer_stream);
      }
      env::StepOutcome out = environment.step(actions);

      Transition tr;
      tr.state_sensed = snap.state_sensed;
      tr.next_state_sensed = out.next.state_sensed;
      tr.state_critic = critic_noisy ? snap.state_sensed : snap.state_ideal;
      tr.next_state_critic =
          critic_noisy ? out.next.state_sensed : out.next.state_ideal;
      tr.obs = snap.obs_sensed;
      tr.next_obs = out.next.obs_sensed;
      tr.actions = actions;
      tr.reward = out.reward;
      buffer.push(std::move(tr));

      reward_sum += out.reward;
      support_sum += out.support_rate;
      qos_sum += out.qos_total;
      if (callbacks.on_step) {
        callbacks.on_step(epoch, environment.world(), &out);
      }
      snap = std::move(out.next);
      ++env_step;
    }

    if (buffer.ready()) {
      for (int m = 0; m < num_agents; ++m) {
        const std::vector<std::size_t> batch = buffer.sample_indices(
            static_cast<std::size_t>(cfg.train.batch_size), trainer_stream);
        const CriticUpdateResult critic_result = update_critic(
            *bundle.critic, critic_opt, buffer, batch, cfg.train.gamma);
        update_actor(*bundle.actors[static_cast<std::size_t>(m)],
                     actor_opts[static_cast<std::size_t>(m)], buffer, batch,
                     critic_result.deltas, m);
      }
    }

    io::EpochRow row;
    row.epoch = static_cast<std::uint64_t>(epoch);
    row.reward = reward_sum;
    row.support_rate = support_sum / static_cast<double>(horizon);
    row.qos_total = qos_sum;
    row.energy_remaining_mean = mean_remaining_energy(environment.world());
    row.epsilon = epsilon_at(env_step, cfg.train);
    row.wall_ms = elapsed_ms(start);
    rows.push_back(row);

    if (callbacks.on_epoch) callbacks.on_epoch(row);
    const bool at_checkpoint = (epoch + 1) % cfg.train.checkpoint_every == 0;
    if (callbacks.on_checkpoint && (at_checkpoint || epoch + 1 == cfg.train.epochs)) {
      callbacks.on_checkpoint(epoch, env_step);
    }
  }
  return rows;
}

namespace {

std::vector<io::EpochRow> rollout(
    const config::ExperimentConfig& cfg, env::Environment& environment,
    int episodes, double reported_epsilon,
    const std::function<int(int agent, const env::Snapshot&,
                            stochastics::RngStream&)>& pick_action,
    const RunCallbacks& callbacks) {
  const int num_agents = cfg.scenario.num_uavs;
  const int horizon = cfg.scenario.episode_steps;
  stochastics::RngStream stream(cfg.seed,
                                static_cast<std::uint64_t>(num_agents) + 1);

  std::vector<io::EpochRow> rows;
  rows.reserve(static_cast<std::size_t>(episodes));
  for (int episode = 0; episode < episodes; ++episode) {
    const auto start = std::chrono::steady_clock::now();
    env::Snapshot snap = environment.reset();
    if (callbacks.on_step) {
      callbacks.on_step(episode, environment.world(), nullptr);
    }

    double reward_sum = 0.0;
    double support_sum = 0.0;
    double qos_sum = 0.0;
    std::vector<int> actions(static_cast<std::size_t>(num_agents));
    for (int t = 0; t < horizon; ++t) {
      for (int m = 0; m < num_agents; ++m) {
        actions[static_cast<std::size_t>(m)] = pick_action(m, snap, stream);
      }
      env::StepOutcome out = environment.step(actions);
      reward_sum += out.reward;
      support_sum += out.support_rate;
      qos_sum += out.qos_total;
      if (callbacks.on_step) {
        callbacks.on_step(episode, environment.world(), &out);
      }
      snap = std::move(out.next);
    }

    io::EpochRow row;
    row.epoch = static_cast<std::uint64_t>(episode);
    row.reward = reward_sum;
    row.support_rate = support_sum / static_cast<double>(horizon);
    row.qos_total = qos_sum;
    row.energy_remaining_mean = mean_remaining_energy(environment.world());
    row.epsilon = reported_epsilon;
    row.wall_ms = elapsed_ms(start);
    rows.push_back(row);
    if (callbacks.on_epoch) callbacks.on_epoch(row);
  }
  return rows;
}

}  // namespace

std::vector<io::EpochRow> infer(const config::ExperimentConfig& cfg,
                                        env::Environment& environment,
                                        const ModelBundle& bundle,
                                        int episodes,
                                        const RunCallbacks& callbacks) {
  check_bundle(cfg, bundle);
  return rollout(
      cfg, environment, episodes, 0.0,
      [&bundle](int agent, const env::Snapshot& snap,
                stochastics::RngStream& stream) {
        return select_action(*bundle.actors[static_cast<std::size_t>(agent)],
                             snap.obs_sensed[static_cast<std::size_t>(agent)],
                             snap.state_sensed, 0.0, stream);
      },
      callbacks);
}

std::vector<io::EpochRow> random_walk(
    const config::ExperimentConfig& cfg, env::Environment& environment,
    int episodes, const RunCallbacks& callbacks) {
  return rollout(
      cfg, environment, episodes, 1.0,
      [](int, const env::Snapshot&, stochastics::RngStream& stream) {
        return static_cast<int>(stream.uniform_int(env::kNumActions));
      },
      callbacks);
}

// ---------------------------------------------------------------------------
// Checkpoints

std::string checkpoint_json(const ModelBundle& bundle,
                            const std::vector<Adam>& actor_opts,
                            const Adam& critic_opt, int epoch,
                            std::uint64_t env_step, std::uint64_t seed,
                            const std::string& config_hash) {
  if (actor_opts.size() != bundle.actors.size()) {
    throw DataError("one optimizer per actor is required");
  }
  json j;
  j["version"] = 1;
  j["kind"] = bundle.kind;
  j["epoch"] = epoch;
  j["env_step"] = env_step;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["actors"] = json::array();
  for (const auto& actor : bundle.actors) {
    j["actors"].push_back(json::parse(actor->checkpoint_json()));
  }
  j["critic"] = json::parse(bundle.critic->checkpoint_json());
  json opt;
  opt["actors"] = json::array();
  for (const Adam& a : actor_opts) opt["actors"].push_back(json::parse(a.to_json()));
  opt["critic"] = json::parse(critic_opt.to_json());
  j["optimizer"] = std::move(opt);
  return j.dump(2);
}

LoadedCheckpoint load_checkpoint(const std::string& text,
                                 const config::ExperimentConfig& cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad checkpoint: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) {
      throw DataError("unsupported checkpoint version");
    }
    LoadedCheckpoint out;
    out.bundle.kind = j.at("kind").get<std::string>();
    if (out.bundle.kind != "quantum" && out.bundle.kind != "classical") {
      throw DataError("unknown checkpoint kind: " + out.bundle.kind);
    }
    out.epoch = j.at("epoch").get<int>();
    out.env_step = j.at("env_step").get<std::uint64_t>();
    out.seed = j.at("seed").get<std::uint64_t>();
    out.config_hash = j.at("config_hash").get<std::string>();

    const json& actors = j.at("actors");
    if (static_cast<int>(actors.size()) != cfg.scenario.num_uavs) {
      throw DataError("checkpoint/config mismatch: expected " +
                      std::to_string(cfg.scenario.num_uavs) + " actors, found " +
                      std::to_string(actors.size()));
    }
    const int adim = actor_input_dim(cfg.scenario);
    const int sdim = state_dim(cfg.scenario);
    for (const json& actor_json : actors) {
      if (out.bundle.kind == "quantum") {
        vqc::CircuitModel circuit = vqc::from_checkpoint_json(actor_json.dump());
        if (circuit.input_dim != adim ||
            static_cast<int>(circuit.observable_wires.size()) !=
                env::kNumActions) {
          throw DataError("checkpoint/config mismatch: actor circuit shape");
        }
        out.bundle.actors.push_back(std::make_unique<QuantumPolicy>(
            std::move(circuit), cfg.model.beta_a));
      } else {
        std::string role;
        mlp::Mlp net = mlp::from_checkpoint_json(actor_json.dump(), &role);
        if (net.input_dim() != adim || net.output_dim() != env::kNumActions) {
          throw DataError("checkpoint/config mismatch: actor net shape");
        }
        out.bundle.actors.push_back(
            std::make_unique<ClassicalPolicy>(std::move(net)));
      }
    }

    const json& critic_json = j.at("critic");
    if (out.bundle.kind == "quantum") {
      vqc::CircuitModel circuit = vqc::from_checkpoint_json(critic_json.dump());
      if (circuit.input_dim != sdim) {
        throw DataError("checkpoint/config mismatch: critic circuit shape");
      }
      out.bundle.critic =
          std::make_unique<QuantumValue>(std::move(circuit), cfg.model.beta_c);
    } else {
      std::string role;
      mlp::Mlp net = mlp::from_checkpoint_json(critic_json.dump(), &role);
      if (net.input_dim() != sdim || net.output_dim() != 1) {
        throw DataError("checkpoint/config mismatch: critic net shape");
      }
      out.bundle.critic = std::make_unique<ClassicalValue>(std::move(net));
    }

    const json& opt = j.at("optimizer");
    for (const json& a : opt.at("actors")) {
      out.actor_opts.push_back(Adam::from_json(a.dump()));
    }
    if (out.actor_opts.size() != out.bundle.actors.size()) {
      throw DataError("checkpoint/config mismatch: optimizer count");
    }
    out.critic_opt = Adam::from_json(opt.at("critic").dump());
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad checkpoint: ") + e.what());
  }
}

}  // namespace quav::trainer
