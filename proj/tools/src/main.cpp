// Experiment front door: training, inference, baselines, gradient checks,
// config inspection, and plot-data export for the multi-UAV coverage testbed.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quav/channel.hpp"
#include "quav/config.hpp"
#include "quav/errors.hpp"
#include "quav/metrics_io.hpp"
#include "quav/mlp.hpp"
#include "quav/stochastics.hpp"
#include "quav/trainer.hpp"
#include "quav/uav_env.hpp"
#include "quav/vqc.hpp"

namespace {

using quav::ConfigError;
using quav::DataError;
namespace config = quav::config;
namespace channel = quav::channel;
namespace env = quav::env;
namespace io = quav::io;
namespace trainer = quav::trainer;
namespace vqc = quav::vqc;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int seeds_fanout = 1;
};

void add_common_options(CLI::App* cmd, CommonOpts& opts,
                        bool with_fanout = true) {
  cmd->add_option("--config", opts.config_path,
                  "Configuration file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides,
                  "Override a key after file parsing, e.g. --set train.gamma=0.9")
      ->type_name("KEY=VALUE");
  cmd->add_option("--seed", opts.seed, "Run seed (overrides the config)");
  cmd->add_option("--out", opts.out_dir,
                  "Output directory (beats QUAV_OUT_DIR and the config)");
  if (with_fanout) {
    cmd->add_option("--seeds", opts.seeds_fanout,
                    "Fan out N sequential runs with seeds seed..seed+N-1")
        ->check(CLI::PositiveNumber);
  }
}

config::ExperimentConfig resolve_config(const CommonOpts& opts) {
  config::ExperimentConfig cfg = opts.config_path.empty()
                                     ? config::ExperimentConfig{}
                                     : config::load_config_file(opts.config_path);
  for (const std::string& assignment : opts.overrides) {
    config::apply_override(cfg, assignment);
  }
  if (opts.seed.has_value()) cfg.seed = *opts.seed;
  if (!opts.out_dir.empty()) {
    cfg.output.dir = opts.out_dir;
  } else if (const char* env_dir = std::getenv("QUAV_OUT_DIR");
             env_dir != nullptr && *env_dir != '\0') {
    cfg.output.dir = env_dir;
  }
  cfg.validate();
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<channel::McsRow> resolve_mcs_table(
    const config::ExperimentConfig& cfg) {
  if (cfg.mcs_csv_path.empty()) return channel::default_mcs_table();
  return channel::load_mcs_csv_file(cfg.mcs_csv_path);
}

env::Environment make_environment(const config::ExperimentConfig& cfg) {
  return env::Environment(cfg.scenario, cfg.channel, env::QosParams{},
                          cfg.noise, env::UavEnergyParams{}, cfg.seed,
                          resolve_mcs_table(cfg));
}

void print_param_counts(const char* label, const trainer::ModelBundle& bundle) {
  std::printf(
      "model parameters (%s): actor %zu per agent, critic %zu, "
      "total %zu across %zu actors + critic\n",
      label, bundle.actor_param_count(), bundle.critic_param_count(),
      bundle.total_param_count(), bundle.actors.size());
}

trainer::RunCallbacks make_callbacks(const config::ExperimentConfig& cfg,
                                     std::vector<io::TraceRow>* trace) {
  trainer::RunCallbacks callbacks;
  if (cfg.output.episode_trace && trace != nullptr) {
    callbacks.on_step = [trace](int episode, const env::WorldState& world,
                                const env::StepOutcome* outcome) {
      io::TraceRow row;
      row.episode = static_cast<std::uint64_t>(episode);
      row.step = world.step_index;
      for (const env::UavState& uav : world.uavs) {
        row.uav_x.push_back(uav.position.x);
        row.uav_y.push_back(uav.position.y);
        row.uav_energy_j.push_back(uav.energy_j);
      }
      if (outcome != nullptr) {
        row.support_rate = outcome->support_rate;
        row.qos_total = outcome->qos_total;
        row.reward = outcome->reward;
      }
      trace->push_back(std::move(row));
    };
  }
  return callbacks;
}

io::RunSummary finish_run(const config::ExperimentConfig& cfg,
                          const std::string& run_dir,
                          const std::string& run_kind,
                          const std::string& hash,
                          const std::vector<io::EpochRow>& rows,
                          const std::vector<io::TraceRow>& trace,
                          std::size_t model_param_count) {
  io::write_text_atomic(run_dir + "/metrics.csv",
                        io::metrics_csv(rows, hash, cfg.seed));
  io::RunSummary summary =
      io::summarize(rows, cfg.train.summary_window_fraction);
  summary.run_kind = run_kind;
  summary.seed = cfg.seed;
  summary.config_hash = hash;
  summary.model_param_count = model_param_count;
  io::write_text_atomic(run_dir + "/summary.json", io::summary_json(summary));
  if (cfg.output.episode_trace) {
    io::write_text_atomic(
        run_dir + "/trace.csv",
        io::trace_csv(trace, cfg.scenario.num_uavs, hash, cfg.seed));
  }
  std::printf(
      "%s seed %llu: trailing window %zu mean reward %.6f support %.4f -> %s\n",
      run_kind.c_str(), static_cast<unsigned long long>(cfg.seed),
      summary.window, summary.reward_mean, summary.support_rate_mean,
      run_dir.c_str());
  return summary;
}

io::RunSummary run_training(const config::ExperimentConfig& cfg,
                            const std::string& run_dir,
                            const std::string& kind) {
  const std::string hash = config::config_hash(cfg);
  env::Environment environment = make_environment(cfg);
  trainer::ModelBundle bundle = trainer::make_models(cfg, kind);
  std::vector<trainer::Adam> actor_opts;
  actor_opts.reserve(bundle.actors.size());
  for (const auto& actor : bundle.actors) {
    actor_opts.emplace_back(actor->param_count(), cfg.train.lr_actor);
  }
  trainer::Adam critic_opt(bundle.critic->param_count(), cfg.train.lr_critic);

  print_param_counts(kind.c_str(), bundle);

  std::vector<io::EpochRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.train.epochs));
  std::vector<io::TraceRow> trace;
  trainer::RunCallbacks callbacks = make_callbacks(cfg, &trace);
  const int progress_stride = std::max(1, cfg.train.epochs / 10);
  callbacks.on_epoch = [&](const io::EpochRow& row) {
    rows.push_back(row);
    if ((static_cast<int>(row.epoch) + 1) % progress_stride == 0) {
      std::printf("epoch %llu/%d reward %.6f support %.4f epsilon %.4f\n",
                  static_cast<unsigned long long>(row.epoch) + 1,
                  cfg.train.epochs, row.reward, row.support_rate, row.epsilon);
    }
  };
  callbacks.on_checkpoint = [&](int epoch, std::uint64_t env_step) {
    io::write_text_atomic(
        run_dir + "/checkpoint.json",
        trainer::checkpoint_json(bundle, actor_opts, critic_opt, epoch,
                                 env_step, cfg.seed, hash));
    io::write_text_atomic(run_dir + "/metrics.csv",
                          io::metrics_csv(rows, hash, cfg.seed));
  };

  trainer::train(cfg, environment, bundle, actor_opts, critic_opt, callbacks);
  return finish_run(cfg, run_dir, "train-" + kind, hash, rows, trace,
                    bundle.total_param_count());
}

io::RunSummary run_inference(const config::ExperimentConfig& cfg,
                             const std::string& run_dir,
                             const std::string& checkpoint_path,
                             int episodes) {
  const std::string hash = config::config_hash(cfg);
  trainer::LoadedCheckpoint loaded =
      trainer::load_checkpoint(read_text_file(checkpoint_path), cfg);
  if (loaded.config_hash != hash) {
    std::fprintf(stderr,
                 "warning: checkpoint was trained under config %s, running "
                 "under %s\n",
                 loaded.config_hash.c_str(), hash.c_str());
  }
  env::Environment environment = make_environment(cfg);
  const int count = episodes > 0 ? episodes : cfg.train.inference_episodes;

  std::vector<io::TraceRow> trace;
  trainer::RunCallbacks callbacks = make_callbacks(cfg, &trace);
  const std::vector<io::EpochRow> rows =
      trainer::infer(cfg, environment, loaded.bundle, count, callbacks);
  return finish_run(cfg, run_dir, "infer-" + loaded.bundle.kind, hash, rows,
                    trace, loaded.bundle.total_param_count());
}

io::RunSummary run_random_walk(const config::ExperimentConfig& cfg,
                               const std::string& run_dir, int episodes) {
  const std::string hash = config::config_hash(cfg);
  env::Environment environment = make_environment(cfg);
  const int count = episodes > 0 ? episodes : cfg.train.inference_episodes;

  std::vector<io::TraceRow> trace;
  trainer::RunCallbacks callbacks = make_callbacks(cfg, &trace);
  const std::vector<io::EpochRow> rows =
      trainer::random_walk(cfg, environment, count, callbacks);
  return finish_run(cfg, run_dir, "random-walk", hash, rows, trace, 0);
}

// Runs `one` for each fanned-out seed; with N > 1 each run lands in
// <out>/seed<K>/ and a merged summary is written at <out>/summary.json.
int run_fanned(const CommonOpts& opts,
               const std::function<io::RunSummary(
                   const config::ExperimentConfig&, const std::string&)>& one) {
  const config::ExperimentConfig base = resolve_config(opts);
  if (opts.seeds_fanout == 1) {
    one(base, base.output.dir);
    return 0;
  }
  nlohmann::json merged;
  merged["runs"] = nlohmann::json::array();
  std::vector<io::RunSummary> summaries;
  for (int k = 0; k < opts.seeds_fanout; ++k) {
    config::ExperimentConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(k);
    const std::string run_dir =
        base.output.dir + "/seed" + std::to_string(cfg.seed);
    io::RunSummary summary = one(cfg, run_dir);
    merged["runs"].push_back(nlohmann::json::parse(io::summary_json(summary)));
    summaries.push_back(std::move(summary));
  }
  auto aggregate = [&summaries](auto field) {
    double mean = 0.0;
    for (const io::RunSummary& s : summaries) mean += field(s);
    mean /= static_cast<double>(summaries.size());
    double var = 0.0;
    for (const io::RunSummary& s : summaries) {
      const double d = field(s) - mean;
      var += d * d;
    }
    var /= static_cast<double>(summaries.size());
    return std::pair<double, double>(mean, std::sqrt(var));
  };
  const auto [reward_mean, reward_std] =
      aggregate([](const io::RunSummary& s) { return s.reward_mean; });
  const auto [support_mean, support_std] =
      aggregate([](const io::RunSummary& s) { return s.support_rate_mean; });
  const auto [qos_mean, qos_std] =
      aggregate([](const io::RunSummary& s) { return s.qos_total_mean; });
  merged["aggregate"] = {
      {"runs", summaries.size()},          {"reward_mean", reward_mean},
      {"reward_std", reward_std},          {"support_rate_mean", support_mean},
      {"support_rate_std", support_std},   {"qos_total_mean", qos_mean},
      {"qos_total_std", qos_std},
  };
  io::write_text_atomic(base.output.dir + "/summary.json", merged.dump(2));
  std::printf("merged %zu runs -> %s/summary.json\n", summaries.size(),
              base.output.dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// Gradient verification: analytic gradients (two-point shift rule for
// circuits, backpropagation for perceptrons) against central finite
// differences of the same scalar outputs.

double circuit_grad_error(std::uint64_t seed, int trial) {
  quav::stochastics::RngStream rng(seed, 1000 + static_cast<std::uint64_t>(trial));
  const int qubits = 2 + static_cast<int>(rng.uniform_int(4));   // 2..5
  const int blocks = 1 + static_cast<int>(rng.uniform_int(3));   // 1..3
  const int input_dim = 1 + static_cast<int>(rng.uniform_int(6));
  const int readouts = 1 + static_cast<int>(rng.uniform_int(
                               static_cast<std::uint64_t>(qubits)));
  std::vector<int> wires(readouts);
  for (int w = 0; w < readouts; ++w) wires[w] = w;
  vqc::CircuitModel model =
      vqc::CircuitModel::make("probe", qubits, blocks, input_dim, wires);
  for (double& p : model.params) p = rng.uniform(-3.14159, 3.14159);
  std::vector<double> x(static_cast<std::size_t>(input_dim));
  for (double& v : x) v = rng.uniform(-2.0, 2.0);

  const auto analytic = vqc::parameter_shift_grad_all(model, x);
  const double h = 1e-4;
  double max_err = 0.0;
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    vqc::CircuitModel probe = model;
    probe.params[i] = model.params[i] + h;
    const std::vector<double> up = vqc::forward(probe, x);
    probe.params[i] = model.params[i] - h;
    const std::vector<double> down = vqc::forward(probe, x);
    for (std::size_t o = 0; o < up.size(); ++o) {
      const double fd = (up[o] - down[o]) / (2.0 * h);
      max_err = std::max(max_err, std::abs(analytic[o][i] - fd));
    }
  }
  return max_err;
}

double perceptron_grad_error(std::uint64_t seed, int trial) {
  quav::stochastics::RngStream rng(seed, 5000 + static_cast<std::uint64_t>(trial));
  const int input_dim = 2 + static_cast<int>(rng.uniform_int(5));
  const int hidden = 3 + static_cast<int>(rng.uniform_int(6));
  const int output_dim = 1 + static_cast<int>(rng.uniform_int(4));
  quav::mlp::Mlp net(input_dim, hidden, output_dim);
  net.init_weights(rng);

  // Keep every hidden pre-activation away from the rectifier kink so central
  // differences stay valid.
  std::vector<double> x(static_cast<std::size_t>(input_dim));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    bool safe = true;
    const std::vector<double>& p = net.params();
    for (int h_idx = 0; h_idx < hidden && safe; ++h_idx) {
      double z = p[static_cast<std::size_t>(hidden) * input_dim + h_idx];
      for (int i = 0; i < input_dim; ++i) {
        z += p[static_cast<std::size_t>(h_idx) * input_dim + i] * x[i];
      }
      if (std::abs(z) < 1e-3) safe = false;
    }
    if (safe) break;
  }

  std::vector<double> probe_weights(static_cast<std::size_t>(output_dim));
  for (double& w : probe_weights) w = rng.uniform(-1.0, 1.0);

  std::vector<double> analytic(net.param_count(), 0.0);
  net.backward(x, probe_weights, analytic);

  auto scalar = [&](const quav::mlp::Mlp& m) {
    const std::vector<double> out = m.forward(x);
    double s = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) s += probe_weights[j] * out[j];
    return s;
  };

  const double h = 1e-5;
  double max_err = 0.0;
  quav::mlp::Mlp probe = net;
  for (std::size_t i = 0; i < net.param_count(); ++i) {
    const double saved = probe.params()[i];
    probe.params()[i] = saved + h;
    const double up = scalar(probe);
    probe.params()[i] = saved - h;
    const double down = scalar(probe);
    probe.params()[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    max_err = std::max(max_err, std::abs(analytic[i] - fd));
  }
  return max_err;
}

int run_verify_gradients(std::uint64_t seed, int circuits, int mlps,
                         double tolerance) {
  double max_err = 0.0;
  for (int t = 0; t < circuits; ++t) {
    max_err = std::max(max_err, circuit_grad_error(seed, t));
  }
  for (int t = 0; t < mlps; ++t) {
    max_err = std::max(max_err, perceptron_grad_error(seed, t));
  }
  std::printf(
      "max |analytic - finite difference| = %.3e over %d circuit and %d "
      "perceptron probes (tolerance %.1e)\n",
      max_err, circuits, mlps, tolerance);
  if (!(max_err <= tolerance)) {
    std::fprintf(stderr, "gradient verification failed\n");
    return 1;
  }
  return 0;
}

int run_print_config(const CommonOpts& opts) {
  const config::ExperimentConfig cfg = resolve_config(opts);
  std::printf("# config_hash = %s\n", config::config_hash(cfg).c_str());
  std::fputs(config::print_config(cfg).c_str(), stdout);
  const trainer::ModelBundle quantum = trainer::make_models(cfg, "quantum");
  const trainer::ModelBundle classical = trainer::make_models(cfg, "classical");
  std::printf("\n");
  print_param_counts("quantum", quantum);
  print_param_counts("classical", classical);
  const auto* actor =
      dynamic_cast<const trainer::QuantumPolicy*>(quantum.actors.front().get());
  const auto* critic =
      dynamic_cast<const trainer::QuantumValue*>(quantum.critic.get());
  std::printf("# training cost estimate: %zu elementary units per epoch "
              "(T * (C_critic + M * (|A| + C_actor)))\n",
              vqc::training_cost_units(
                  static_cast<std::size_t>(cfg.scenario.episode_steps),
                  static_cast<std::size_t>(cfg.scenario.num_uavs),
                  actor->circuit(), critic->circuit()));
  return 0;
}

int run_export_plot_data(const std::vector<std::string>& inputs, int window,
                         const std::string& out_path) {
  if (inputs.empty()) {
    throw ConfigError("", "export-plot-data needs at least one metrics file");
  }
  std::vector<io::MetricsFile> files;
  files.reserve(inputs.size());
  for (const std::string& path : inputs) {
    files.push_back(io::read_metrics_csv(path));
  }
  io::MetricsFile merged = files.front();
  if (files.size() > 1) {
    for (std::size_t k = 1; k < files.size(); ++k) {
      if (files[k].rows.size() != merged.rows.size()) {
        throw DataError("metrics files disagree in row count, cannot merge");
      }
      for (std::size_t i = 0; i < merged.rows.size(); ++i) {
        merged.rows[i].reward += files[k].rows[i].reward;
        merged.rows[i].support_rate += files[k].rows[i].support_rate;
        merged.rows[i].qos_total += files[k].rows[i].qos_total;
        merged.rows[i].energy_remaining_mean +=
            files[k].rows[i].energy_remaining_mean;
      }
    }
    const double n = static_cast<double>(files.size());
    for (io::EpochRow& row : merged.rows) {
      row.reward /= n;
      row.support_rate /= n;
      row.qos_total /= n;
      row.energy_remaining_mean /= n;
    }
    merged.config_hash = "merged-" + std::to_string(files.size());
  }
  const std::string out = io::plot_data_csv(merged, window);
  if (out_path.empty()) {
    std::fputs(out.c_str(), stdout);
  } else {
    io::write_text_atomic(out_path, out);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum multi-agent reinforcement-learning testbed for "
               "UAV base-station coverage"};
  app.require_subcommand(1);
  int rc = 0;

  CommonOpts train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train the quantum actor-critic models");
  add_common_options(train_cmd, train_opts);
  train_cmd->callback([&] {
    rc = run_fanned(train_opts,
                    [](const config::ExperimentConfig& cfg,
                       const std::string& dir) {
                      return run_training(cfg, dir, "quantum");
                    });
  });

  CommonOpts classical_opts;
  CLI::App* classical_cmd = app.add_subcommand(
      "baseline-classical", "Train the perceptron baseline with the same loop");
  add_common_options(classical_cmd, classical_opts);
  classical_cmd->callback([&] {
    rc = run_fanned(classical_opts,
                    [](const config::ExperimentConfig& cfg,
                       const std::string& dir) {
                      return run_training(cfg, dir, "classical");
                    });
  });

  CommonOpts infer_opts;
  std::string checkpoint_path;
  int infer_episodes = 0;
  CLI::App* infer_cmd =
      app.add_subcommand("infer", "Greedy rollouts from a checkpoint");
  add_common_options(infer_cmd, infer_opts);
  infer_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON")
      ->required()
      ->check(CLI::ExistingFile);
  infer_cmd->add_option("--episodes", infer_episodes,
                        "Episode count (default train.inference_episodes)");
  infer_cmd->callback([&] {
    rc = run_fanned(infer_opts, [&](const config::ExperimentConfig& cfg,
                                    const std::string& dir) {
      return run_inference(cfg, dir, checkpoint_path, infer_episodes);
    });
  });

  CommonOpts random_opts;
  int random_episodes = 0;
  CLI::App* random_cmd = app.add_subcommand(
      "baseline-random", "Uniform random joint actions (no learning)");
  add_common_options(random_cmd, random_opts);
  random_cmd->add_option("--episodes", random_episodes,
                         "Episode count (default train.inference_episodes)");
  random_cmd->callback([&] {
    rc = run_fanned(random_opts, [&](const config::ExperimentConfig& cfg,
                                     const std::string& dir) {
      return run_random_walk(cfg, dir, random_episodes);
    });
  });

  CLI::App* dump_cmd = app.add_subcommand(
      "dump-mcs-table", "Print the embedded rate lookup table as CSV");
  dump_cmd->callback([&] {
    std::fputs(channel::mcs_table_csv(channel::default_mcs_table()).c_str(),
               stdout);
  });

  std::uint64_t verify_seed = 7;
  int verify_circuits = 20;
  int verify_mlps = 5;
  double verify_tolerance = 1e-5;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify-gradients",
      "Check analytic gradients against finite differences");
  verify_cmd->add_option("--seed", verify_seed, "Probe seed");
  verify_cmd->add_option("--circuits", verify_circuits, "Circuit probes")
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--mlps", verify_mlps, "Perceptron probes")
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--tolerance", verify_tolerance, "Failure threshold");
  verify_cmd->callback([&] {
    rc = run_verify_gradients(verify_seed, verify_circuits, verify_mlps,
                              verify_tolerance);
  });

  CommonOpts print_opts;
  CLI::App* print_cmd = app.add_subcommand(
      "print-config", "Print the fully resolved configuration");
  add_common_options(print_cmd, print_opts, /*with_fanout=*/false);
  print_cmd->callback([&] { rc = run_print_config(print_opts); });

  std::vector<std::string> plot_inputs;
  int plot_window = 50;
  std::string plot_out;
  CLI::App* plot_cmd = app.add_subcommand(
      "export-plot-data", "Moving-average series from metrics CSV files");
  plot_cmd->add_option("inputs", plot_inputs, "Metrics CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--window", plot_window, "Moving-average window")
      ->check(CLI::PositiveNumber);
  plot_cmd->add_option("--out", plot_out, "Output path (default stdout)");
  plot_cmd->callback(
      [&] { rc = run_export_plot_data(plot_inputs, plot_window, plot_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
