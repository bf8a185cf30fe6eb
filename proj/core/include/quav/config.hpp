#pragma once

#include <cstdint>
#include <string>

#include "quav/channel.hpp"
#include "quav/uav_env.hpp"

namespace quav::config {

enum class CriticStateVariant { Noisy, Ideal };

struct ModelConfig {
  int actor_qubits = 5;
  int actor_blocks = 4;
  int critic_qubits = 8;
  int critic_blocks = 4;
  double beta_a = 3.0;
  double beta_c = 15.0;
  int hidden_width = 64;  // classical baseline
};

struct TrainConfig {
  double gamma = 0.98;
  double lr_actor = 0.001;
  double lr_critic = 0.00025;
  double epsilon_init = 0.275;
  double epsilon_anneal = 0.00005;  // per environment step
  double epsilon_min = 0.01;
  int epochs = 10000;
  int batch_size = 32;
  std::size_t buffer_capacity = 50000;
  std::size_t buffer_min_fill = 1000;
  CriticStateVariant critic_state = CriticStateVariant::Noisy;
  int checkpoint_every = 1000;
  int inference_episodes = 100;
  double summary_window_fraction = 0.1;
};

struct OutputConfig {
  std::string dir = "runs";
  bool episode_trace = false;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  env::ScenarioConfig scenario;
  env::NoiseOptions noise;
  channel::ChannelParams channel;
  std::string mcs_csv_path;  // empty -> embedded table
  ModelConfig model;
  TrainConfig train;
  OutputConfig output;

  void validate() const;
};

// Key-value dialect: one "dotted.path = value" per line, '#' comments, blank
// lines ignored, arrays as [a, b, c], booleans true/false/on/off. Unknown
// keys raise ConfigError with the offending path.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// One --set override, "dotted.path=value", applied over an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Canonical dump in the same dialect; parse_config_text(print_config(c))
// resolves to an identical config.
std::string print_config(const ExperimentConfig& cfg);

// FNV-1a 64 over the canonical dump, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace quav::config
