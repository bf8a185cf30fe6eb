#include "quav/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "quav/errors.hpp"

namespace quav::config {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing text");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const long long parsed = std::stoll(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing text");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on") return true;
  if (value == "false" || value == "off") return false;
  throw ConfigError(key, "expected true/false/on/off, got '" + value + "'");
}

std::array<double, 12> parse_pmf(const std::string& key,
                                 const std::string& value) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    throw ConfigError(key, "expected [p0, p1, ..., p11]");
  }
  std::array<double, 12> pmf{};
  std::istringstream body(value.substr(1, value.size() - 2));
  std::string field;
  std::size_t count = 0;
  while (std::getline(body, field, ',')) {
    if (count >= pmf.size()) {
      throw ConfigError(key, "expected exactly 12 entries");
    }
    pmf[count++] = parse_double(key, trim(field));
  }
  if (count != pmf.size()) {
    throw ConfigError(key, "expected exactly 12 entries, got " +
                               std::to_string(count));
  }
  return pmf;
}

std::string format_pmf(const std::array<double, 12>& pmf) {
  std::string out = "[";
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(pmf[i]);
  }
  out += "]";
  return out;
}

struct KeyHandler {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<KeyHandler>& handlers() {
  auto num = [](auto member) {
    return [member](const ExperimentConfig& c) {
      return format_double(std::invoke(member, c));
    };
  };
  static const std::vector<KeyHandler> table = {
      {"seed",
       [](ExperimentConfig& c, const std::string& v) {
         const auto parsed = parse_int("seed", v);
         if (parsed < 0) throw ConfigError("seed", "must be >= 0");
         c.seed = static_cast<std::uint64_t>(parsed);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},

      {"scenario.map_size_m",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.map_size_m = parse_double("scenario.map_size_m", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.map_size_m);
       }},
      {"scenario.num_uavs",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.num_uavs =
             static_cast<int>(parse_int("scenario.num_uavs", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.scenario.num_uavs);
       }},
      {"scenario.num_users",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.num_users =
             static_cast<int>(parse_int("scenario.num_users", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.scenario.num_users);
       }},
      {"scenario.observe_threshold_m",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.observe_threshold_m =
             parse_double("scenario.observe_threshold_m", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.observe_threshold_m);
       }},
      {"scenario.altitude_m",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.altitude_m = parse_double("scenario.altitude_m", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.altitude_m);
       }},
      {"scenario.use_slant_range",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.use_slant_range = parse_bool("scenario.use_slant_range", v);
       },
       [](const ExperimentConfig& c) {
         return c.scenario.use_slant_range ? "true" : "false";
       }},
      {"scenario.delta_t_s",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.delta_t_s = parse_double("scenario.delta_t_s", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.delta_t_s);
       }},
      {"scenario.episode_steps",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.episode_steps =
             static_cast<int>(parse_int("scenario.episode_steps", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.scenario.episode_steps);
       }},
      {"scenario.video_traffic_fraction",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.video_traffic_fraction =
             parse_double("scenario.video_traffic_fraction", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.video_traffic_fraction);
       }},
      {"scenario.flight_speed_mps",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.flight_speed_mps =
             parse_double("scenario.flight_speed_mps", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.flight_speed_mps);
       }},

      {"noise.state_noise",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.state_noise = parse_bool("noise.state_noise", v);
       },
       [](const ExperimentConfig& c) {
         return c.noise.state_noise ? "on" : "off";
       }},
      {"noise.action_noise",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.action_noise = parse_bool("noise.action_noise", v);
       },
       [](const ExperimentConfig& c) {
         return c.noise.action_noise ? "on" : "off";
       }},
      {"noise.cauchy.k",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.cauchy.impulsiveness_k = parse_double("noise.cauchy.k", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.noise.cauchy.impulsiveness_k);
       }},
      {"noise.cauchy.v",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.cauchy.shape_v = parse_double("noise.cauchy.v", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.noise.cauchy.shape_v);
       }},
      {"noise.cauchy.sigma_z_sq",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.cauchy.sigma_z_sq = parse_double("noise.cauchy.sigma_z_sq", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.noise.cauchy.sigma_z_sq);
       }},
      {"noise.wind.shape",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.wind.shape = parse_double("noise.wind.shape", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.noise.wind.shape);
       }},
      {"noise.wind.scale_mps",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.wind.scale_mps = parse_double("noise.wind.scale_mps", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.noise.wind.scale_mps);
       }},
      {"noise.wind.direction_pmf",
       [](ExperimentConfig& c, const std::string& v) {
         c.noise.wind.direction_pmf = parse_pmf("noise.wind.direction_pmf", v);
       },
       [](const ExperimentConfig& c) {
         return format_pmf(c.noise.wind.direction_pmf);
       }},

      {"channel.carrier_ghz",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.carrier_ghz = parse_double("channel.carrier_ghz", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.carrier_ghz);
       }},
      {"channel.pathloss_exponent",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.pathloss_exponent =
             parse_double("channel.pathloss_exponent", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.pathloss_exponent);
       }},
      {"channel.bandwidth_hz",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.bandwidth_hz = parse_double("channel.bandwidth_hz", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.bandwidth_hz);
       }},
      {"channel.tx_power_dbm",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.tx_power_dbm = parse_double("channel.tx_power_dbm", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.tx_power_dbm);
       }},
      {"channel.tx_gain_dbi",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.tx_gain_dbi = parse_double("channel.tx_gain_dbi", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.tx_gain_dbi);
       }},
      {"channel.rx_gain_dbi",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.rx_gain_dbi = parse_double("channel.rx_gain_dbi", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.rx_gain_dbi);
       }},
      {"channel.half_power_beamwidth_deg",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.half_power_beamwidth_deg =
             parse_double("channel.half_power_beamwidth_deg", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.half_power_beamwidth_deg);
       }},
      {"channel.noise_psd_dbm_per_hz",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.noise_psd_dbm_per_hz =
             parse_double("channel.noise_psd_dbm_per_hz", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.noise_psd_dbm_per_hz);
       }},
      {"channel.extra_noise_db",
       [](ExperimentConfig& c, const std::string& v) {
         c.channel.extra_noise_db = parse_double("channel.extra_noise_db", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.channel.extra_noise_db);
       }},
      {"channel.mcs_csv",
       [](ExperimentConfig& c, const std::string& v) { c.mcs_csv_path = v; },
       [](const ExperimentConfig& c) { return c.mcs_csv_path; }},

      {"model.actor_qubits",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.actor_qubits =
             static_cast<int>(parse_int("model.actor_qubits", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.actor_qubits);
       }},
      {"model.actor_blocks",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.actor_blocks =
             static_cast<int>(parse_int("model.actor_blocks", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.actor_blocks);
       }},
      {"model.critic_qubits",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.critic_qubits =
             static_cast<int>(parse_int("model.critic_qubits", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.critic_qubits);
       }},
      {"model.critic_blocks",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.critic_blocks =
             static_cast<int>(parse_int("model.critic_blocks", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.critic_blocks);
       }},
      {"model.beta_a",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.beta_a = parse_double("model.beta_a", v);
       },
       [](const ExperimentConfig& c) { return format_double(c.model.beta_a); }},
      {"model.beta_c",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.beta_c = parse_double("model.beta_c", v);
       },
       [](const ExperimentConfig& c) { return format_double(c.model.beta_c); }},
      {"model.hidden_width",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.hidden_width =
             static_cast<int>(parse_int("model.hidden_width", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.hidden_width);
       }},

      {"train.gamma",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.gamma = parse_double("train.gamma", v);
       },
       [](const ExperimentConfig& c) { return format_double(c.train.gamma); }},
      {"train.lr_actor",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.lr_actor = parse_double("train.lr_actor", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.train.lr_actor);
       }},
      {"train.lr_critic",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.lr_critic = parse_double("train.lr_critic", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.train.lr_critic);
       }},
      {"train.epsilon_init",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.epsilon_init = parse_double("train.epsilon_init", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.train.epsilon_init);
       }},
      {"train.epsilon_anneal",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.epsilon_anneal = parse_double("train.epsilon_anneal", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.train.epsilon_anneal);
       }},
      {"train.epsilon_min",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.epsilon_min = parse_double("train.epsilon_min", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.train.epsilon_min);
       }},
      {"train.epochs",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.epochs = static_cast<int>(parse_int("train.epochs", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.train.epochs); }},
      {"train.batch_size",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.batch_size =
             static_cast<int>(parse_int("train.batch_size", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.train.batch_size);
       }},
      {"train.buffer_capacity",
       [](ExperimentConfig& c, const std::string& v) {
         const auto parsed = parse_int("train.buffer_capacity", v);
         if (parsed < 1) throw ConfigError("train.buffer_capacity", "must be >= 1");
         c.train.buffer_capacity = static_cast<std::size_t>(parsed);
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.train.buffer_capacity);
       }},
      {"train.buffer_min_fill",
       [](ExperimentConfig& c, const std::string& v) {
         const auto parsed = parse_int("train.buffer_min_fill", v);
         if (parsed < 1) throw ConfigError("train.buffer_min_fill", "must be >= 1");
         c.train.buffer_min_fill = static_cast<std::size_t>(parsed);
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.train.buffer_min_fill);
       }},
      {"train.reward_coeff",
       [](ExperimentConfig& c, const std::string& v) {
         c.scenario.reward_coeff = parse_double("train.reward_coeff", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.scenario.reward_coeff);
       }},
      {"train.critic_state",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "noisy") {
           c.train.critic_state = CriticStateVariant::Noisy;
         } else if (v == "ideal") {
           c.train.critic_state = CriticStateVariant::Ideal;
         } else {
           throw ConfigError("train.critic_state",
                             "expected noisy or ideal, got '" + v + "'");
         }
       },
       [](const ExperimentConfig& c) {
         return c.train.critic_state == CriticStateVariant::Noisy ? "noisy"
                                                                  : "ideal";
       }},
      {"train.checkpoint_every",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.checkpoint_every =
             static_cast<int>(parse_int("train.checkpoint_every", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.train.checkpoint_every);
       }},
      {"train.inference_episodes",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.inference_episodes =
             static_cast<int>(parse_int("train.inference_episodes", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.train.inference_episodes);
       }},
      {"train.summary_window_fraction",
       [](ExperimentConfig& c, const std::string& v) {
         c.train.summary_window_fraction =
             parse_double("train.summary_window_fraction", v);
       },
       [](const ExperimentConfig& c) {
         return format_double(c.train.summary_window_fraction);
       }},

      {"output.dir",
       [](ExperimentConfig& c, const std::string& v) { c.output.dir = v; },
       [](const ExperimentConfig& c) { return c.output.dir; }},
      {"output.episode_trace",
       [](ExperimentConfig& c, const std::string& v) {
         c.output.episode_trace = parse_bool("output.episode_trace", v);
       },
       [](const ExperimentConfig& c) {
         return c.output.episode_trace ? "true" : "false";
       }},
  };
  return table;
}

const KeyHandler* find_handler(const std::string& key) {
  for (const KeyHandler& handler : handlers()) {
    if (key == handler.key) return &handler;
  }
  return nullptr;
}

void assign(ExperimentConfig& cfg, const std::string& key,
            const std::string& value) {
  const KeyHandler* handler = find_handler(key);
  if (handler == nullptr) {
    throw ConfigError(key, "unknown configuration key");
  }
  handler->set(cfg, value);
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  channel.validate();
  noise.cauchy.validate();
  noise.wind.validate();

  if (model.actor_qubits < env::kNumActions) {
    throw ConfigError("model.actor_qubits",
                      "needs at least " + std::to_string(env::kNumActions) +
                          " wires (one readout per action)");
  }
  if (model.actor_qubits > 16 || model.critic_qubits < 1 ||
      model.critic_qubits > 16) {
    throw ConfigError("model", "qubit counts must lie in [1, 16]");
  }
  if (model.actor_blocks < 0 || model.critic_blocks < 0) {
    throw ConfigError("model", "block counts must be >= 0");
  }
  if (!(model.beta_a > 0.0) || !(model.beta_c > 0.0)) {
    throw ConfigError("model", "beta scales must be > 0");
  }
  if (model.hidden_width < 1) {
    throw ConfigError("model.hidden_width", "must be >= 1");
  }

  if (!(train.gamma >= 0.0 && train.gamma < 1.0)) {
    throw ConfigError("train.gamma", "must lie in [0, 1)");
  }
  if (!(train.lr_actor > 0.0) || !(train.lr_critic > 0.0)) {
    throw ConfigError("train", "learning rates must be > 0");
  }
  if (!(train.epsilon_init >= 0.0 && train.epsilon_init <= 1.0)) {
    throw ConfigError("train.epsilon_init", "must lie in [0, 1]");
  }
  if (!(train.epsilon_min >= 0.0 && train.epsilon_min <= train.epsilon_init)) {
    throw ConfigError("train.epsilon_min",
                      "must lie in [0, epsilon_init]");
  }
  if (!(train.epsilon_anneal >= 0.0)) {
    throw ConfigError("train.epsilon_anneal", "must be >= 0");
  }
  if (train.epochs < 1) throw ConfigError("train.epochs", "must be >= 1");
  if (train.batch_size < 1) {
    throw ConfigError("train.batch_size", "must be >= 1");
  }
  if (train.buffer_min_fill < static_cast<std::size_t>(train.batch_size)) {
    throw ConfigError("train.buffer_min_fill", "must be >= batch_size");
  }
  if (train.buffer_capacity < train.buffer_min_fill) {
    throw ConfigError("train.buffer_capacity", "must be >= buffer_min_fill");
  }
  if (train.checkpoint_every < 1) {
    throw ConfigError("train.checkpoint_every", "must be >= 1");
  }
  if (train.inference_episodes < 1) {
    throw ConfigError("train.inference_episodes", "must be >= 1");
  }
  if (!(train.summary_window_fraction > 0.0 &&
        train.summary_window_fraction <= 1.0)) {
    throw ConfigError("train.summary_window_fraction", "must lie in (0, 1]");
  }
  if (output.dir.empty()) {
    throw ConfigError("output.dir", "must not be empty");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_number) +
                                ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("", "line " + std::to_string(line_number) +
                                ": empty key");
    }
    try {
      assign(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), "line " + std::to_string(line_number) +
                                       ": " + e.message());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("", "override must be key=value, got '" + assignment +
                              "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) {
    throw ConfigError("", "override has an empty key");
  }
  assign(cfg, key, value);
}

std::string print_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const KeyHandler& handler : handlers()) {
    const std::string key = handler.key;
    const auto dot = key.find('.');
    const std::string prefix = dot == std::string::npos ? "" : key.substr(0, dot);
    if (prefix != section) {
      section = prefix;
      out += "\n# " + section + "\n";
    }
    out += key + " = " + handler.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // Output destination and trace toggles do not alter the experiment, so two
  // runs that differ only in where they write share a hash.
  std::string text;
  for (const KeyHandler& handler : handlers()) {
    const std::string key = handler.key;
    if (key.rfind("output.", 0) == 0) continue;
    text += key + " = " + handler.get(cfg) + "\n";
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace quav::config
