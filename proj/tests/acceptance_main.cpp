// Release acceptance suite. Each criterion prints exactly one [PASS]/[FAIL]
// line; the process exits nonzero if any requested criterion fails. Run with
// no arguments for all nine, or pass criterion numbers to select a subset.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quav/channel.hpp"
#include "quav/config.hpp"
#include "quav/mlp.hpp"
#include "quav/qsim.hpp"
#include "quav/stochastics.hpp"
#include "quav/trainer.hpp"
#include "quav/uav_env.hpp"
#include "quav/vqc.hpp"
#include "support/oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

void print_verdict(int number, const char* title, const CriterionResult& r) {
  std::printf("[%s] criterion %d: %s — %s\n", r.pass ? "PASS" : "FAIL",
              number, title, r.detail.c_str());
  std::fflush(stdout);
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fs", s);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients against finite differences, across 100
// random circuits (<= 6 qubits, <= 3 blocks) and 20 random perceptrons,
// within 1e-5, in under two minutes.

double circuit_probe_error(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> qubits_pick(2, 6);
  std::uniform_int_distribution<int> blocks_pick(1, 3);
  std::uniform_int_distribution<int> dim_pick(1, 6);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  std::uniform_real_distribution<double> value(-2.0, 2.0);

  const int q = qubits_pick(rng);
  const int blocks = blocks_pick(rng);
  const int dim = dim_pick(rng);
  std::uniform_int_distribution<int> obs_pick(1, q);
  const int readouts = obs_pick(rng);
  std::vector<int> wires;
  for (int w = 0; w < readouts; ++w) wires.push_back(w);
  auto model =
      quav::vqc::CircuitModel::make("actor", q, blocks, dim, std::move(wires));
  for (double& p : model.params) p = angle(rng);
  std::vector<double> x(dim);
  for (double& v : x) v = value(rng);

  const auto analytic = quav::vqc::parameter_shift_grad_all(model, x);
  double worst = 0.0;
  for (std::size_t o = 0; o < analytic.size(); ++o) {
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      const double fd = oracles::central_difference(
          [&](double theta) {
            auto probe = model;
            probe.params[i] = theta;
            return quav::vqc::forward(probe, x)[o];
          },
          model.params[i], 1e-4);
      worst = std::max(worst, std::abs(analytic[o][i] - fd));
    }
  }
  return worst;
}

double perceptron_probe_error(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> in_pick(2, 6);
  std::uniform_int_distribution<int> hidden_pick(2, 8);
  std::uniform_int_distribution<int> out_pick(1, 5);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::uniform_real_distribution<double> value(-2.0, 2.0);

  const int in_dim = in_pick(rng);
  quav::mlp::Mlp net(in_dim, hidden_pick(rng), out_pick(rng));
  for (double& p : net.params()) p = weight(rng);

  // Keep every hidden pre-activation comfortably away from the rectifier
  // kink so the finite-difference probe stays on one linear piece.
  std::vector<double> x(in_dim);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& v : x) v = value(rng);
    bool clear = true;
    for (int h = 0; h < net.hidden_dim() && clear; ++h) {
      double acc = 0.0;
      for (int i = 0; i < in_dim; ++i) {
        acc += net.params()[static_cast<std::size_t>(h) * in_dim + i] * x[i];
      }
      acc += net.params()[static_cast<std::size_t>(net.hidden_dim()) * in_dim +
                          h];
      if (std::abs(acc) < 1e-3) clear = false;
    }
    if (clear) break;
  }

  std::vector<double> out_grad(net.output_dim());
  for (double& g : out_grad) g = weight(rng);

  std::vector<double> grad(net.param_count(), 0.0);
  net.backward(x, out_grad, grad);
  double worst = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double fd = oracles::central_difference(
        [&](double w) {
          auto probe = net;
          probe.params()[i] = w;
          const auto out = probe.forward(x);
          double acc = 0.0;
          for (std::size_t o = 0; o < out.size(); ++o) {
            acc += out_grad[o] * out[o];
          }
          return acc;
        },
        net.params()[i], 1e-5);
    worst = std::max(worst, std::abs(grad[i] - fd));
  }
  return worst;
}

CriterionResult criterion_gradients() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    worst = std::max(worst, circuit_probe_error(rng));
  }
  for (int i = 0; i < 20; ++i) {
    worst = std::max(worst, perceptron_probe_error(rng));
  }
  const double elapsed = seconds_since(start);

  // The command-line verifier must agree (it is the user-facing entry).
  bool cli_ok = true;
  std::string cli_note = "CLI check skipped (QUAV_CLI unset)";
  if (const char* cli = std::getenv("QUAV_CLI")) {
    const std::string cmd = std::string(cli) +
                            " verify-gradients --circuits 100 --mlps 20 "
                            "--tolerance 1e-5 > /dev/null 2>&1";
    cli_ok = std::system(cmd.c_str()) == 0;
    cli_note = cli_ok ? "CLI verify-gradients exits 0"
                      : "CLI verify-gradients failed";
  }

  CriterionResult r;
  r.pass = worst < 1e-5 && elapsed < 120.0 && cli_ok;
  std::ostringstream detail;
  detail << "max |shift - finite difference| = " << worst
         << " over 100 circuits + 20 perceptrons in "
         << format_seconds(elapsed) << "; " << cli_note;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 2: simulator exactness. Norm drift under 1000 random gates below
// 1e-10, and <Z> after RY(theta)|0> equals cos(theta) to 1e-10 over 100
// random angles.

CriterionResult criterion_simulator() {
  using quav::qsim::GateOp;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  std::uniform_int_distribution<int> wire_pick(0, 5);
  std::uniform_int_distribution<int> kind_pick(0, 4);

  quav::qsim::Statevector sv(6);
  double worst_drift = 0.0;
  for (int g = 0; g < 1000; ++g) {
    const int kind = kind_pick(rng);
    const int a = wire_pick(rng);
    int b = wire_pick(rng);
    while (b == a) b = wire_pick(rng);
    switch (kind) {
      case 0: sv.apply(GateOp::rx(a, angle(rng))); break;
      case 1: sv.apply(GateOp::ry(a, angle(rng))); break;
      case 2: sv.apply(GateOp::rz(a, angle(rng))); break;
      case 3: sv.apply(GateOp::cnot(a, b)); break;
      default:
        sv.apply(GateOp::cu3(a, b, angle(rng), angle(rng), angle(rng)));
    }
    worst_drift = std::max(worst_drift, std::abs(sv.norm_sq() - 1.0));
  }

  std::uniform_real_distribution<double> wide(-2.0 * std::numbers::pi,
                                              2.0 * std::numbers::pi);
  double worst_expect = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = wide(rng);
    quav::qsim::Statevector probe(1);
    probe.apply(GateOp::ry(0, theta));
    worst_expect =
        std::max(worst_expect, std::abs(probe.expect_z(0) - std::cos(theta)));
  }

  CriterionResult r;
  r.pass = worst_drift < 1e-10 && worst_expect < 1e-10;
  std::ostringstream detail;
  detail << "norm drift " << worst_drift
         << " over 1000 gates; max |<Z> - cos| = " << worst_expect
         << " over 100 angles";
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: rotary-wing hover power within 1 W of the independent scalar
// oracle (128.9 W) and hover endurance inside [35, 50] minutes, immediately.

CriterionResult criterion_power() {
  const auto start = Clock::now();
  const quav::env::UavEnergyParams p;

  // Independent oracle, restated from first principles with the tabulated
  // airframe constants.
  const double omega = 300.0, radius = 0.4, rho = 1.225, solidity = 0.05;
  const double area = 0.503, delta = 0.012, k_factor = 0.1;
  const double weight = 1.375 * 9.8;
  const double oracle_blade =
      (delta / 8.0) * rho * solidity * area * omega * omega * omega * radius *
      radius * radius;
  const double oracle_induced =
      (1.0 + k_factor) * std::sqrt(weight * weight * weight) /
      std::sqrt(2.0 * rho * area);
  const double oracle_hover = oracle_blade + oracle_induced;

  const double hover = quav::env::hover_power_w(p);
  const double endurance_min = p.battery_j() / hover / 60.0;
  const double elapsed = seconds_since(start);

  CriterionResult r;
  r.pass = std::abs(hover - oracle_hover) < 1e-6 &&
           std::abs(hover - 128.9) < 1.0 && endurance_min > 35.0 &&
           endurance_min < 50.0 && elapsed < 1.0;
  std::ostringstream detail;
  detail << "hover " << hover << " W (oracle " << oracle_hover
         << "), endurance " << endurance_min << " min in "
         << format_seconds(elapsed);
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: link budget. Noise floor -65.655 +- 0.01 dBm, path loss at
// 1 m = 68.063 +- 0.001 dB, 12-row table round-trips bit exactly, and the
// widest coverage radius lands in [620, 632] m agreeing with bisection.

CriterionResult criterion_link_budget() {
  const auto start = Clock::now();
  const quav::channel::ChannelParams params;

  const double noise = quav::channel::noise_floor_dbm(params);
  const double loss1 = quav::channel::path_loss_db(1.0, params);

  const auto& table = quav::channel::default_mcs_table();
  bool round_trip = table.size() == 12;
  if (round_trip) {
    std::istringstream in(quav::channel::mcs_table_csv(table));
    const auto reloaded = quav::channel::load_mcs_csv(in);
    for (std::size_t i = 0; i < table.size() && round_trip; ++i) {
      round_trip = reloaded[i].sensitivity_dbm == table[i].sensitivity_dbm &&
                   reloaded[i].mcs == table[i].mcs &&
                   reloaded[i].rate_mbps == table[i].rate_mbps &&
                   reloaded[i].shannon_gbps == table[i].shannon_gbps;
    }
  }

  const double radius = quav::channel::coverage_radius_m(
      std::size_t{0}, table, params);
  const double bisected = oracles::bisect(
      [&](double d) {
        return quav::channel::rx_power_dbm(d, params) -
               table[0].sensitivity_dbm;
      },
      0.1, 100000.0);
  const double elapsed = seconds_since(start);

  CriterionResult r;
  r.pass = std::abs(noise - (-65.655)) < 0.01 &&
           std::abs(loss1 - 68.063) < 0.001 && round_trip &&
           radius > 620.0 && radius < 632.0 &&
           std::abs(radius - bisected) < 1e-6 && elapsed < 1.0;
  std::ostringstream detail;
  detail << "noise floor " << noise << " dBm, L(1m) = " << loss1
         << " dB, table round-trip " << (round_trip ? "exact" : "BROKEN")
         << ", widest radius " << radius << " m (bisection " << bisected
         << ") in " << format_seconds(elapsed);
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: service quality and reward sanity. Video quality at the
// midpoint rate is exactly one half; the reward is zero when every vehicle
// is dead; rewards are nonnegative across 10^4 random worlds, within 10 s.

CriterionResult criterion_reward() {
  const auto start = Clock::now();
  const quav::env::QosParams qos_params;
  const bool midpoint_exact =
      quav::env::qos(1024.0, quav::env::TrafficType::Video, qos_params) == 0.5;

  // All-dead world with a populated service table.
  quav::env::WorldState dead;
  dead.uavs = {quav::env::UavState{{0.0, 0.0}, 0.0},
               quav::env::UavState{{10.0, 10.0}, 0.0}};
  dead.user_positions = {{5.0, 5.0}};
  dead.user_traffic = {quav::env::TrafficType::Other};
  dead.served = {1, 1};
  dead.rate_mbps = {100.0, 100.0};
  dead.quality = {3.0, 3.0};
  const bool dead_zero = quav::env::reward(dead, 0.75, 0.01) == 0.0;

  quav::stochastics::RngStream rng(2025, 0);
  const quav::channel::ChannelParams channel_params;
  const auto& table = quav::channel::default_mcs_table();
  quav::env::ScenarioConfig scenario;
  scenario.map_size_m = 2000.0;
  scenario.num_uavs = 3;
  scenario.num_users = 6;
  const double radius =
      quav::channel::coverage_radius_m(std::size_t{0}, table, channel_params);

  bool nonnegative = true;
  double min_seen = 0.0;
  for (int rep = 0; rep < 10000 && nonnegative; ++rep) {
    quav::env::WorldState world;
    for (int m = 0; m < scenario.num_uavs; ++m) {
      world.uavs.push_back(quav::env::UavState{
          {rng.uniform(0.0, scenario.map_size_m),
           rng.uniform(0.0, scenario.map_size_m)},
          rng.uniform() < 0.2 ? 0.0 : 321206.4});
    }
    for (int n = 0; n < scenario.num_users; ++n) {
      world.user_positions.push_back({rng.uniform(0.0, scenario.map_size_m),
                                      rng.uniform(0.0, scenario.map_size_m)});
      world.user_traffic.push_back(rng.uniform() < 0.5
                                       ? quav::env::TrafficType::Video
                                       : quav::env::TrafficType::Other);
    }
    quav::env::assign_service(world, scenario, channel_params, table,
                              qos_params);
    const double tau = quav::env::overlap_factor(world, radius);
    const double value = quav::env::reward(world, tau, 0.01);
    min_seen = std::min(min_seen, value);
    nonnegative = value >= 0.0 && std::isfinite(value);
  }
  const double elapsed = seconds_since(start);

  CriterionResult r;
  r.pass = midpoint_exact && dead_zero && nonnegative && elapsed < 10.0;
  std::ostringstream detail;
  detail << "video quality(midpoint) == 0.5 " << (midpoint_exact ? "exact" : "BROKEN")
         << ", all-dead reward " << (dead_zero ? "0" : "NONZERO")
         << ", min reward over 10^4 worlds " << min_seen << " in "
         << format_seconds(elapsed);
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: noise stack. Weibull sample mean within 2% of the
// gamma-function value at 10^6 draws; chi-square fit of the position-noise
// sampler at alpha = 0.01 over 40 bins and 10^6 draws; density quadrature
// normalizes to 1 +- 1e-3; all inside one minute.

CriterionResult criterion_noise() {
  const auto start = Clock::now();

  const quav::stochastics::WindConfig wind;
  quav::stochastics::RngStream wind_rng(31, 0);
  double total = 0.0;
  constexpr int kWindDraws = 1000000;
  for (int i = 0; i < kWindDraws; ++i) {
    total += quav::stochastics::sample_wind_speed(wind_rng, wind);
  }
  const double mean = total / kWindDraws;
  const double expected_mean = 10.97 * std::tgamma(1.0 + 1.0 / 2.29);
  const double mean_err = std::abs(mean - expected_mean) / expected_mean;

  const quav::stochastics::CauchyConfig cauchy;
  quav::stochastics::CauchySampler sampler(cauchy);
  const double bound = sampler.truncation_bound();
  constexpr int kBins = 40;
  const double width = 2.0 * bound / kBins;
  const double scale = quav::stochastics::cauchy_scale_x(cauchy);

  std::vector<double> expected_mass(kBins, 0.0);
  double total_mass = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double lo = -bound + b * width;
    const double hi = lo + width;
    std::vector<double> pts = {lo, hi};
    if (lo < 0.0 && hi > 0.0) {
      for (double s = scale * 1e-2; s < hi; s *= 10.0) pts.push_back(s);
      for (double s = -scale * 1e-2; s > lo; s *= 10.0) pts.push_back(s);
      pts.push_back(0.0);
      std::sort(pts.begin(), pts.end());
    }
    expected_mass[b] = oracles::integrate_with_breakpoints(
        [&](double z) { return quav::stochastics::cauchy_pdf(z, cauchy); },
        pts, 1e-13);
    total_mass += expected_mass[b];
  }
  const double quadrature_gap = std::abs(total_mass - 1.0);

  quav::stochastics::RngStream cauchy_rng(17, 0);
  std::vector<int> counts(kBins, 0);
  constexpr int kCauchyDraws = 1000000;
  for (int i = 0; i < kCauchyDraws; ++i) {
    const double z = sampler.sample_axis(cauchy_rng);
    int bin = static_cast<int>((z + bound) / width);
    bin = std::clamp(bin, 0, kBins - 1);
    counts[bin]++;
  }
  double chi_sq = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double expect = kCauchyDraws * expected_mass[b] / total_mass;
    const double diff = counts[b] - expect;
    chi_sq += diff * diff / expect;
  }
  const double elapsed = seconds_since(start);

  CriterionResult r;
  r.pass = mean_err < 0.02 && chi_sq < oracles::kChiSq99Dof39 &&
           quadrature_gap < 1e-3 && elapsed < 60.0;
  std::ostringstream detail;
  detail << "wind mean err " << mean_err * 100.0 << "% at 10^6 draws, chi^2 = "
         << chi_sq << " (crit " << oracles::kChiSq99Dof39
         << ", 39 dof), quadrature mass off by " << quadrature_gap << " in "
         << format_seconds(elapsed);
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Shared harness for the learning criteria: the scaled scenario (2 vehicles,
// 6 users, 2 km map, 20-step episodes).

quav::config::ExperimentConfig smoke_config(std::uint64_t seed,
                                            bool dual_noise) {
  quav::config::ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.scenario.map_size_m = 2000.0;
  cfg.scenario.num_uavs = 2;
  cfg.scenario.num_users = 6;
  cfg.scenario.observe_threshold_m = 2000.0;
  cfg.scenario.episode_steps = 20;
  cfg.noise.state_noise = dual_noise;
  cfg.noise.action_noise = dual_noise;
  cfg.model.actor_qubits = 5;
  cfg.model.actor_blocks = 2;
  cfg.model.critic_qubits = 4;
  cfg.model.critic_blocks = 2;
  cfg.train.epochs = 300;
  cfg.train.batch_size = 16;
  cfg.train.buffer_capacity = 4000;
  cfg.train.buffer_min_fill = 200;
  cfg.train.epsilon_init = 0.275;
  cfg.train.epsilon_anneal = 0.00005;
  cfg.train.epsilon_min = 0.01;
  cfg.train.checkpoint_every = 300;
  cfg.validate();
  return cfg;
}

std::vector<quav::io::EpochRow> run_training(
    const quav::config::ExperimentConfig& cfg) {
  quav::env::Environment environment(cfg.scenario, cfg.channel, {}, cfg.noise,
                                     {}, cfg.seed);
  auto bundle = quav::trainer::make_models(cfg, "quantum");
  std::vector<quav::trainer::Adam> actor_opts;
  for (std::size_t m = 0; m < bundle.actors.size(); ++m) {
    actor_opts.emplace_back(bundle.actors[m]->param_count(),
                            cfg.train.lr_actor);
  }
  quav::trainer::Adam critic_opt(bundle.critic->param_count(),
                                 cfg.train.lr_critic);
  return quav::trainer::train(cfg, environment, bundle, actor_opts,
                              critic_opt);
}

double trailing_mean_reward(const std::vector<quav::io::EpochRow>& rows,
                            double fraction) {
  const auto summary = quav::io::summarize(rows, fraction);
  return summary.reward_mean;
}

// ---------------------------------------------------------------------------
// Criterion 7: on the scaled scenario, five seeds each, the trained policy's
// trailing-10%-epoch mean reward beats 1.5x the random-walk mean; streams are
// finite and seed-reproducible; the whole check stays under 30 minutes.

CriterionResult criterion_training_margin() {
  const auto start = Clock::now();
  const std::array<std::uint64_t, 5> seeds = {1, 2, 3, 4, 5};

  double trained_sum = 0.0;
  double random_sum = 0.0;
  bool all_finite = true;
  for (const auto seed : seeds) {
    const auto cfg = smoke_config(seed, false);
    const auto rows = run_training(cfg);
    for (const auto& row : rows) {
      all_finite = all_finite && std::isfinite(row.reward) &&
                   std::isfinite(row.support_rate) &&
                   std::isfinite(row.qos_total);
    }
    trained_sum += trailing_mean_reward(rows, 0.1);

    quav::env::Environment environment(cfg.scenario, cfg.channel, {},
                                       cfg.noise, {}, cfg.seed);
    const auto walk_rows =
        quav::trainer::random_walk(cfg, environment, 300);
    double acc = 0.0;
    for (const auto& row : walk_rows) {
      all_finite = all_finite && std::isfinite(row.reward);
      acc += row.reward;
    }
    random_sum += acc / static_cast<double>(walk_rows.size());
  }
  const double trained_mean = trained_sum / seeds.size();
  const double random_mean = random_sum / seeds.size();

  // Identical seeds must reproduce identical metric streams.
  const auto replay_cfg = smoke_config(seeds[0], false);
  auto replica_cfg = replay_cfg;
  replica_cfg.train.epochs = 40;
  replica_cfg.validate();
  const auto first = run_training(replica_cfg);
  const auto second = run_training(replica_cfg);
  bool reproducible = first.size() == second.size();
  for (std::size_t i = 0; i < first.size() && reproducible; ++i) {
    reproducible = first[i].reward == second[i].reward &&
                   first[i].support_rate == second[i].support_rate &&
                   first[i].qos_total == second[i].qos_total &&
                   first[i].epsilon == second[i].epsilon;
  }
  const double elapsed = seconds_since(start);

  CriterionResult r;
  const double ratio =
      random_mean > 0.0 ? trained_mean / random_mean
                        : std::numeric_limits<double>::infinity();
  r.pass = trained_mean >= 1.5 * random_mean && all_finite && reproducible &&
           elapsed < 1800.0;
  std::ostringstream detail;
  detail << "trained trailing mean " << trained_mean << " vs random walk "
         << random_mean << " (ratio " << ratio << ", need >= 1.5), streams "
         << (all_finite ? "finite" : "NON-FINITE") << ", replay "
         << (reproducible ? "identical" : "DIVERGED") << " in "
         << format_seconds(elapsed);
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: the variational models use fewer trainable parameters than
// the perceptron baseline at reference settings, and the CLI prints both.

CriterionResult criterion_param_counts() {
  quav::config::ExperimentConfig cfg;  // reference scale
  cfg.validate();
  const auto quantum = quav::trainer::make_models(cfg, "quantum");
  const auto classical = quav::trainer::make_models(cfg, "classical");
  const std::size_t q_total = quantum.total_param_count();
  const std::size_t c_total = classical.total_param_count();

  bool cli_ok = true;
  std::string cli_note = "CLI check skipped (QUAV_CLI unset)";
  if (const char* cli = std::getenv("QUAV_CLI")) {
    const std::string cmd = std::string(cli) + " print-config 2>/dev/null";
    std::string output;
    if (FILE* pipe = popen(cmd.c_str(), "r")) {
      char buf[4096];
      std::size_t got = 0;
      while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
        output.append(buf, got);
      }
      cli_ok = pclose(pipe) == 0;
    } else {
      cli_ok = false;
    }
    const bool has_quantum =
        output.find("model parameters (quantum)") != std::string::npos &&
        output.find("total " + std::to_string(q_total)) != std::string::npos;
    const bool has_classical =
        output.find("model parameters (classical)") != std::string::npos &&
        output.find("total " + std::to_string(c_total)) != std::string::npos;
    cli_ok = cli_ok && has_quantum && has_classical;
    cli_note = cli_ok ? "CLI prints both totals" : "CLI output missing counts";
  }

  CriterionResult r;
  r.pass = q_total < c_total && cli_ok;
  std::ostringstream detail;
  detail << "quantum " << q_total << " parameters vs classical " << c_total
         << "; " << cli_note;
  r.detail = detail.str();
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: robustness under the dual noise stack. Policies trained with
// both noise sources, evaluated with noise on, should hold a median support
// rate at least matching policies trained noise-free; the comparison table
// prints regardless of the verdict.

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CriterionResult criterion_noise_robustness() {
  const auto start = Clock::now();
  const std::array<std::uint64_t, 5> seeds = {1, 2, 3, 4, 5};
  constexpr int kEvalEpisodes = 40;

  std::vector<double> noisy_trained;
  std::vector<double> clean_trained;

  for (const auto seed : seeds) {
    for (const bool dual_noise : {true, false}) {
      const auto cfg = smoke_config(seed, dual_noise);
      quav::env::Environment environment(cfg.scenario, cfg.channel, {},
                                         cfg.noise, {}, cfg.seed);
      auto bundle = quav::trainer::make_models(cfg, "quantum");
      std::vector<quav::trainer::Adam> actor_opts;
      for (std::size_t m = 0; m < bundle.actors.size(); ++m) {
        actor_opts.emplace_back(bundle.actors[m]->param_count(),
                                cfg.train.lr_actor);
      }
      quav::trainer::Adam critic_opt(bundle.critic->param_count(),
                                     cfg.train.lr_critic);
      quav::trainer::train(cfg, environment, bundle, actor_opts, critic_opt);

      // Inference always runs under the dual noise stack.
      auto eval_cfg = smoke_config(seed, true);
      quav::env::Environment eval_env(eval_cfg.scenario, eval_cfg.channel, {},
                                      eval_cfg.noise, {}, eval_cfg.seed + 1000);
      const auto rows =
          quav::trainer::infer(eval_cfg, eval_env, bundle, kEvalEpisodes);
      double acc = 0.0;
      for (const auto& row : rows) acc += row.support_rate;
      const double mean_support = acc / rows.size();
      (dual_noise ? noisy_trained : clean_trained).push_back(mean_support);
    }
  }

  const double noisy_median = median(noisy_trained);
  const double clean_median = median(clean_trained);
  const double elapsed = seconds_since(start);

  // The comparison table prints even when the inequality fails; individual
  // seeds are noisy, medians damp but do not erase run-to-run variation.
  std::printf("    noise-robustness support rate under dual-noise inference\n");
  std::printf("    %-6s %-18s %-18s\n", "seed", "dual-noise-trained",
              "noise-free-trained");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::printf("    %-6llu %-18.4f %-18.4f\n",
                static_cast<unsigned long long>(seeds[i]), noisy_trained[i],
                clean_trained[i]);
  }
  std::printf("    %-6s %-18.4f %-18.4f\n", "median", noisy_median,
              clean_median);
  std::printf(
      "    caveat: five seeds of a stochastic training pipeline; medians "
      "reduce but cannot remove seed-to-seed variation.\n");
  std::fflush(stdout);

  CriterionResult r;
  r.pass = noisy_median >= clean_median && elapsed < 1800.0;
  std::ostringstream detail;
  detail << "dual-noise-trained median support " << noisy_median
         << " vs noise-free-trained " << clean_median << " in "
         << format_seconds(elapsed);
  r.detail = detail.str();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    selected.insert(std::atoi(argv[i]));
  }
  const auto wanted = [&](int n) {
    return selected.empty() || selected.count(n) > 0;
  };

  struct Entry {
    int number;
    const char* title;
    CriterionResult (*run)();
  };
  const Entry entries[] = {
      {1, "analytic gradients match finite differences", criterion_gradients},
      {2, "statevector norm and single-qubit expectations are exact",
       criterion_simulator},
      {3, "hover power and endurance", criterion_power},
      {4, "link budget, rate table, and coverage radius",
       criterion_link_budget},
      {5, "service quality and reward sanity", criterion_reward},
      {6, "wind and position-noise sampling statistics", criterion_noise},
      {7, "trained policy beats the random walk by 1.5x",
       criterion_training_margin},
      {8, "variational models are smaller than the perceptron baseline",
       criterion_param_counts},
      {9, "dual-noise training holds support rate under noisy inference",
       criterion_noise_robustness},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    if (!wanted(entry.number)) continue;
    const auto result = entry.run();
    print_verdict(entry.number, entry.title, result);
    if (!result.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
