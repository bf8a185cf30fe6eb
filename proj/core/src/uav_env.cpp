#include "quav/uav_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "quav/errors.hpp"

namespace quav::env {

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(field, "must be finite and > 0");
  }
}

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

void UavEnergyParams::validate() const {
  require_positive(profile_drag_coeff, "energy.profile_drag_coeff");
  require_positive(air_density_kgm3, "energy.air_density_kgm3");
  require_positive(rotor_solidity, "energy.rotor_solidity");
  require_positive(rotor_disc_area_m2, "energy.rotor_disc_area_m2");
  require_positive(blade_angular_velocity_rads, "energy.blade_angular_velocity_rads");
  require_positive(rotor_radius_m, "energy.rotor_radius_m");
  require_positive(induced_power_factor, "energy.induced_power_factor");
  require_positive(aircraft_mass_kg, "energy.aircraft_mass_kg");
  require_positive(gravity_mps2, "energy.gravity_mps2");
  require_positive(tip_speed_mps, "energy.tip_speed_mps");
  require_positive(mean_rotor_induced_velocity_mps,
                   "energy.mean_rotor_induced_velocity_mps");
  require_positive(fuselage_drag_ratio, "energy.fuselage_drag_ratio");
  require_positive(battery_capacity_ah, "energy.battery_capacity_ah");
  require_positive(battery_voltage_v, "energy.battery_voltage_v");
  // Tabulated tip speed must agree with Omega * R; the disc area with
  // pi R^2. Both within 1%.
  const double omega_r = blade_angular_velocity_rads * rotor_radius_m;
  if (std::abs(tip_speed_mps - omega_r) > 0.01 * omega_r) {
    throw ConfigError("energy.tip_speed_mps",
                      "inconsistent with Omega * R = " + std::to_string(omega_r));
  }
  const double disc = std::numbers::pi * rotor_radius_m * rotor_radius_m;
  if (std::abs(rotor_disc_area_m2 - disc) > 0.01 * disc) {
    throw ConfigError("energy.rotor_disc_area_m2",
                      "inconsistent with pi R^2 = " + std::to_string(disc));
  }
}

double blade_profile_power_w(const UavEnergyParams& p) {
  return p.profile_drag_coeff / 8.0 * p.air_density_kgm3 * p.rotor_solidity *
         p.rotor_disc_area_m2 * std::pow(p.blade_angular_velocity_rads, 3) *
         std::pow(p.rotor_radius_m, 3);
}

double induced_power_w(const UavEnergyParams& p) {
  return (1.0 + p.induced_power_factor) * std::pow(p.weight_n(), 1.5) /
         std::sqrt(2.0 * p.air_density_kgm3 * p.rotor_disc_area_m2);
}

double hover_power_w(const UavEnergyParams& p) {
  return blade_profile_power_w(p) + induced_power_w(p);
}

TravelPowerTerms travel_power_terms(double speed_mps,
                                    const UavEnergyParams& p) {
  if (!(speed_mps >= 0.0) || !std::isfinite(speed_mps)) {
    throw std::domain_error("speed must be finite and >= 0");
  }
  const double v = speed_mps;
  const double v0 = p.mean_rotor_induced_velocity_mps;
  TravelPowerTerms terms;
  terms.blade_profile_w =
      blade_profile_power_w(p) * (1.0 + 3.0 * v * v / p.tip_speed_mps);
  const double induced_root =
      std::sqrt(1.0 + std::pow(v, 4) / (4.0 * std::pow(v0, 4))) -
      v * v / (2.0 * v0 * v0);
  terms.induced_w = induced_power_w(p) * std::sqrt(std::max(induced_root, 0.0));
  terms.parasite_w = 0.5 * p.fuselage_drag_ratio * p.air_density_kgm3 *
                     p.rotor_solidity * p.rotor_disc_area_m2 * std::pow(v, 3);
  return terms;
}

double travel_power_w(double speed_mps, const UavEnergyParams& p) {
  return travel_power_terms(speed_mps, p).total();
}

void QosParams::validate() const {
  require_positive(video_slope_w_a, "qos.video_slope_w_a");
  require_positive(video_midpoint_w_b, "qos.video_midpoint_w_b");
  require_positive(other_scale_w_c, "qos.other_scale_w_c");
  require_positive(other_offset_w_d, "qos.other_offset_w_d");
}

double qos(double rate_mbps, TrafficType type, const QosParams& params) {
  if (!(rate_mbps >= 0.0) || !std::isfinite(rate_mbps)) {
    throw std::domain_error("rate must be finite and >= 0 Mbps");
  }
  if (type == TrafficType::Video) {
    return 1.0 / (1.0 + std::exp(-params.video_slope_w_a *
                                 (rate_mbps - params.video_midpoint_w_b)));
  }
  return std::log(params.other_scale_w_c * rate_mbps + params.other_offset_w_d);
}

void ScenarioConfig::validate() const {
  require_positive(map_size_m, "scenario.map_size_m");
  if (num_uavs < 1) throw ConfigError("scenario.num_uavs", "must be >= 1");
  if (num_users < 1) throw ConfigError("scenario.num_users", "must be >= 1");
  require_positive(observe_threshold_m, "scenario.observe_threshold_m");
  require_positive(altitude_m, "scenario.altitude_m");
  require_positive(delta_t_s, "scenario.delta_t_s");
  if (episode_steps < 1) throw ConfigError("scenario.episode_steps", "must be >= 1");
  if (!(video_traffic_fraction >= 0.0 && video_traffic_fraction <= 1.0)) {
    throw ConfigError("scenario.video_traffic_fraction", "must be in [0, 1]");
  }
  require_positive(flight_speed_mps, "scenario.flight_speed_mps");
  require_positive(reward_coeff, "scenario.reward_coeff");
}

std::vector<double> observe(const WorldState& world, int uav_index,
                            double observe_threshold_m) {
  const int m = world.num_uavs();
  if (uav_index < 0 || uav_index >= m) {
    throw std::invalid_argument("uav index out of range");
  }
  const UavState& self = world.uavs[uav_index];
  std::vector<double> obs;
  obs.reserve(static_cast<std::size_t>(m) + 3);
  obs.push_back(self.position.x);
  obs.push_back(self.position.y);
  for (int other = 0; other < m; ++other) {
    if (other == uav_index) {
      obs.push_back(0.0);
      continue;
    }
    const double d = distance(self.position, world.uavs[other].position);
    obs.push_back(d <= observe_threshold_m ? d : -1.0);
  }
  obs.push_back(self.energy_j);
  return obs;
}

void assign_service(WorldState& world, const ScenarioConfig& scenario,
                    const channel::ChannelParams& channel_params,
                    const std::vector<channel::McsRow>& mcs_table,
                    const QosParams& qos_params) {
  const int m = world.num_uavs();
  const int n = world.num_users();
  world.served.assign(static_cast<std::size_t>(m) * n, 0);
  world.rate_mbps.assign(static_cast<std::size_t>(m) * n, 0.0);
  world.quality.assign(static_cast<std::size_t>(m) * n, 0.0);
  const double radius = channel::coverage_radius_m(0, mcs_table, channel_params);
  for (int user = 0; user < n; ++user) {
    int best = -1;
    double best_distance = 0.0;
    for (int uav = 0; uav < m; ++uav) {
      if (!world.uavs[uav].alive()) continue;
      const double d =
          distance(world.uavs[uav].position, world.user_positions[user]);
      if (d > radius) continue;
      if (best < 0 || d < best_distance) {
        best = uav;
        best_distance = d;
      }
    }
    if (best < 0) continue;
    double link_distance = best_distance;
    if (scenario.use_slant_range) {
      link_distance = std::hypot(best_distance, scenario.altitude_m);
    }
    // Coincident UAV and user: the path-loss model needs d > 0; treat as the
    // strongest tabulated link.
    const double rx =
        link_distance > 0.0
            ? channel::rx_power_dbm(link_distance, channel_params)
            : mcs_table.back().sensitivity_dbm;
    const double rate = channel::mcs_rate_mbps(rx, mcs_table);
    if (rate <= 0.0) continue;
    const std::size_t idx = static_cast<std::size_t>(best) * n + user;
    world.served[idx] = 1;
    world.rate_mbps[idx] = rate;
    world.quality[idx] = qos(rate, world.user_traffic[user], qos_params);
  }
}

double overlap_factor(const WorldState& world, double coverage_radius_m) {
  if (!(coverage_radius_m > 0.0)) {
    throw std::domain_error("coverage radius must be > 0");
  }
  std::vector<Vec2> centers;
  for (const UavState& uav : world.uavs) {
    if (uav.alive()) centers.push_back(uav.position);
  }
  if (centers.size() < 2) return 1.0;

  double min_x = centers[0].x, max_x = centers[0].x;
  double min_y = centers[0].y, max_y = centers[0].y;
  for (const Vec2& c : centers) {
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  min_x -= coverage_radius_m;
  max_x += coverage_radius_m;
  min_y -= coverage_radius_m;
  max_y += coverage_radius_m;

  // Fixed-seed points make this a pure function of the world state.
  constexpr int kSamples = 10'000;
  stochastics::RngStream rng(0x6f6c6170ULL, 0);
  int in_union = 0;
  int in_overlap = 0;
  const double r_sq = coverage_radius_m * coverage_radius_m;
  for (int i = 0; i < kSamples; ++i) {
    const double x = rng.uniform(min_x, max_x);
    const double y = rng.uniform(min_y, max_y);
    int hits = 0;
    for (const Vec2& c : centers) {
      const double dx = x - c.x;
      const double dy = y - c.y;
      if (dx * dx + dy * dy <= r_sq) {
        ++hits;
        if (hits == 2) break;
      }
    }
    if (hits >= 1) ++in_union;
    if (hits >= 2) ++in_overlap;
  }
  if (in_union == 0) return 1.0;
  return 1.0 - static_cast<double>(in_overlap) / static_cast<double>(in_union);
}

double reward(const WorldState& world, double tau, double reward_coeff) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("overlap factor outside [0, 1]");
  }
  const int m = world.num_uavs();
  const int n = world.num_users();
  double service = 0.0;
  for (int uav = 0; uav < m; ++uav) {
    if (!world.uavs[uav].alive()) continue;
    const std::size_t row = static_cast<std::size_t>(uav) * n;
    for (int user = 0; user < n; ++user) {
      service += world.served[row + user] * world.quality[row + user];
    }
  }
  return reward_coeff * tau * service;
}

std::vector<double> state_vector(const WorldState& world) {
  const std::size_t cells = world.served.size();
  std::vector<double> s;
  s.reserve(2 * cells);
  for (std::size_t i = 0; i < cells; ++i) {
    s.push_back(static_cast<double>(world.served[i]));
    s.push_back(world.quality[i]);
  }
  return s;
}

Vec2 action_direction(int action) {
  switch (action) {
    case 0: return {1.0, 0.0};
    case 1: return {-1.0, 0.0};
    case 2: return {0.0, 1.0};
    case 3: return {0.0, -1.0};
    case 4: return {0.0, 0.0};
    default:
      throw std::invalid_argument("action index " + std::to_string(action) +
                                  " outside [0, 5)");
  }
}

Environment::Environment(ScenarioConfig scenario,
                         channel::ChannelParams channel_params,
                         QosParams qos_params, NoiseOptions noise,
                         UavEnergyParams energy, std::uint64_t seed,
                         std::vector<channel::McsRow> mcs_table)
    : scenario_(scenario),
      channel_params_(channel_params),
      qos_params_(qos_params),
      noise_(noise),
      energy_(energy),
      mcs_table_(std::move(mcs_table)),
      env_stream_(seed, 0) {
  scenario_.validate();
  channel_params_.validate();
  qos_params_.validate();
  energy_.validate();
  noise_.wind.validate();
  if (mcs_table_.empty()) {
    throw DataError("environment needs a non-empty rate lookup table");
  }
  if (noise_.state_noise) {
    cauchy_ = std::make_unique<stochastics::CauchySampler>(noise_.cauchy);
  }
  service_radius_m_ = channel::coverage_radius_m(0, mcs_table_, channel_params_);
  agent_streams_.reserve(scenario_.num_uavs);
  for (int m = 0; m < scenario_.num_uavs; ++m) {
    agent_streams_.emplace_back(seed, static_cast<std::uint64_t>(m) + 1);
  }
}

Snapshot Environment::reset() {
  world_ = WorldState{};
  world_.uavs.assign(scenario_.num_uavs,
                     UavState{{scenario_.map_size_m / 2.0,
                               scenario_.map_size_m / 2.0},
                              energy_.battery_j()});
  world_.user_positions.resize(scenario_.num_users);
  world_.user_traffic.resize(scenario_.num_users);
  for (int n = 0; n < scenario_.num_users; ++n) {
    world_.user_positions[n] = {env_stream_.uniform(0.0, scenario_.map_size_m),
                                env_stream_.uniform(0.0, scenario_.map_size_m)};
    world_.user_traffic[n] =
        env_stream_.uniform() < scenario_.video_traffic_fraction
            ? TrafficType::Video
            : TrafficType::Other;
  }
  world_.step_index = 0;
  refresh_service();
  return snapshot();
}

void Environment::refresh_service() {
  assign_service(world_, scenario_, channel_params_, mcs_table_, qos_params_);
  tau_ = overlap_factor(world_, service_radius_m_);
}

Snapshot Environment::snapshot() {
  Snapshot snap;
  snap.state_ideal = state_vector(world_);
  snap.state_sensed = snap.state_ideal;
  if (noise_.state_noise) {
    for (double& entry : snap.state_sensed) {
      entry += cauchy_->sample_axis(env_stream_);
    }
  }
  snap.obs_ideal.resize(world_.num_uavs());
  snap.obs_sensed.resize(world_.num_uavs());
  for (int m = 0; m < world_.num_uavs(); ++m) {
    snap.obs_ideal[m] = observe(world_, m, scenario_.observe_threshold_m);
    snap.obs_sensed[m] = snap.obs_ideal[m];
    if (noise_.state_noise) {
      const auto offset = cauchy_->sample_offset(agent_streams_[m]);
      snap.obs_sensed[m][0] += offset[0];
      snap.obs_sensed[m][1] += offset[1];
    }
  }
  return snap;
}

StepOutcome Environment::step(const std::vector<int>& joint_action) {
  if (static_cast<int>(joint_action.size()) != scenario_.num_uavs) {
    throw std::invalid_argument("joint action size must equal UAV count");
  }
  if (world_.uavs.empty()) {
    throw std::logic_error("step before reset");
  }
  if (world_.step_index >= scenario_.episode_steps) {
    throw std::logic_error("episode already finished; call reset");
  }

  for (int m = 0; m < scenario_.num_uavs; ++m) {
    UavState& uav = world_.uavs[m];
    if (!uav.alive()) continue;  // dead UAVs neither move nor drain
    const Vec2 dir = action_direction(joint_action[m]);
    const bool hovering = dir.x == 0.0 && dir.y == 0.0;
    double dx = dir.x * scenario_.flight_speed_mps * scenario_.delta_t_s;
    double dy = dir.y * scenario_.flight_speed_mps * scenario_.delta_t_s;
    if (noise_.action_noise) {
      const auto wind =
          stochastics::sample_wind_velocity(agent_streams_[m], noise_.wind);
      dx += wind[0] * scenario_.delta_t_s;
      dy += wind[1] * scenario_.delta_t_s;
    }
    uav.position.x = std::clamp(uav.position.x + dx, 0.0, scenario_.map_size_m);
    uav.position.y = std::clamp(uav.position.y + dy, 0.0, scenario_.map_size_m);
    const double power_w = hovering ? hover_power_w(energy_)
                                    : travel_power_w(scenario_.flight_speed_mps,
                                                     energy_);
    uav.energy_j = std::max(uav.energy_j - power_w * scenario_.delta_t_s, 0.0);
  }

  world_.step_index += 1;
  refresh_service();

  StepOutcome outcome;
  outcome.tau = tau_;
  outcome.reward = reward(world_, tau_, scenario_.reward_coeff);
  int covered = 0;
  for (int user = 0; user < world_.num_users(); ++user) {
    for (int uav = 0; uav < world_.num_uavs(); ++uav) {
      if (world_.served[static_cast<std::size_t>(uav) * world_.num_users() +
                        user]) {
        ++covered;
        break;
      }
    }
  }
  outcome.support_rate =
      static_cast<double>(covered) / static_cast<double>(world_.num_users());
  double total_quality = 0.0;
  for (std::size_t i = 0; i < world_.quality.size(); ++i) {
    if (world_.served[i]) total_quality += world_.quality[i];
  }
  outcome.qos_total = total_quality;
  outcome.next = snapshot();
  return outcome;
}

}  // namespace quav::env
