#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "quav/channel.hpp"
#include "quav/stochastics.hpp"

namespace quav::env {

// Rotary-wing power model constants. Weight enters in newtons (mass * g).
struct UavEnergyParams {
  double profile_drag_coeff = 0.012;        // delta
  double air_density_kgm3 = 1.225;          // rho
  double rotor_solidity = 0.05;             // s
  double rotor_disc_area_m2 = 0.503;        // A
  double blade_angular_velocity_rads = 300.0;  // Omega
  double rotor_radius_m = 0.4;              // R
  double induced_power_factor = 0.1;        // k
  double aircraft_mass_kg = 1.375;
  double gravity_mps2 = 9.8;
  double tip_speed_mps = 120.0;             // U_tip
  double mean_rotor_induced_velocity_mps = 4.03;  // v_0
  double fuselage_drag_ratio = 0.6;         // d_0
  double battery_capacity_ah = 5.870;
  double battery_voltage_v = 15.2;

  double weight_n() const { return aircraft_mass_kg * gravity_mps2; }
  double battery_wh() const { return battery_capacity_ah * battery_voltage_v; }
  double battery_j() const { return battery_wh() * 3600.0; }
  void validate() const;
};

// Hover terms: blade profile P_o = (delta/8) rho s A Omega^3 R^3 and induced
// P_i = (1 + k) W^{3/2} / sqrt(2 rho A).
double blade_profile_power_w(const UavEnergyParams& p = {});
double induced_power_w(const UavEnergyParams& p = {});
double hover_power_w(const UavEnergyParams& p = {});

struct TravelPowerTerms {
  double blade_profile_w = 0.0;
  double induced_w = 0.0;
  double parasite_w = 0.0;
  double total() const { return blade_profile_w + induced_w + parasite_w; }
};
TravelPowerTerms travel_power_terms(double speed_mps,
                                    const UavEnergyParams& p = {});
double travel_power_w(double speed_mps, const UavEnergyParams& p = {});

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct UavState {
  Vec2 position;
  double energy_j = 0.0;
  bool alive() const { return energy_j > 0.0; }
};

enum class TrafficType : std::uint8_t { Video = 0, Other = 1 };

// Service quality per Mbps rate kappa: video follows a logistic ramp centred
// at w_b, other traffic a log curve. Weights (w_a, w_b, w_c, w_d) with
// defaults (0.01, 1024, 1, 1).
struct QosParams {
  double video_slope_w_a = 0.01;
  double video_midpoint_w_b = 1024.0;
  double other_scale_w_c = 1.0;
  double other_offset_w_d = 1.0;
  void validate() const;
};

double qos(double rate_mbps, TrafficType type, const QosParams& params = {});

struct ScenarioConfig {
  double map_size_m = 6000.0;
  int num_uavs = 4;
  int num_users = 25;
  double observe_threshold_m = 3000.0;  // D_th for pairwise distances
  double altitude_m = 2500.0;
  bool use_slant_range = false;  // 2-D ground distance by default
  double delta_t_s = 60.0;
  int episode_steps = 30;
  double video_traffic_fraction = 0.5;
  double flight_speed_mps = 20.0;
  double reward_coeff = 0.01;  // w_c of the reward
  void validate() const;
};

struct NoiseOptions {
  bool state_noise = false;
  bool action_noise = false;
  stochastics::CauchyConfig cauchy;
  stochastics::WindConfig wind;
};

// Mutable world snapshot. Service arrays are row major: entry m * N + n is
// UAV m serving user n.
struct WorldState {
  std::vector<UavState> uavs;
  std::vector<Vec2> user_positions;
  std::vector<TrafficType> user_traffic;
  std::vector<std::uint8_t> served;   // c_mn in {0, 1}
  std::vector<double> rate_mbps;      // kappa_mn
  std::vector<double> quality;        // q_mn
  int step_index = 0;

  int num_uavs() const { return static_cast<int>(uavs.size()); }
  int num_users() const { return static_cast<int>(user_positions.size()); }
};

// Observation of UAV m: [x_m, y_m, d_m0..d_m(M-1), e_m] where d_mm = 0,
// distances beyond threshold report -1, and e_m is remaining energy in J.
std::vector<double> observe(const WorldState& world, int uav_index,
                            double observe_threshold_m);

// Nearest alive UAV within the widest-coverage radius serves each user
// (lower index wins ties); kappa from the MCS lookup at the link's receive
// power. Fills served / rate_mbps / quality.
void assign_service(WorldState& world, const ScenarioConfig& scenario,
                    const channel::ChannelParams& channel_params,
                    const std::vector<channel::McsRow>& mcs_table,
                    const QosParams& qos_params);

// 1 - (area covered by >= 2 alive coverage discs) / (union area), Monte
// Carlo over 10^4 fixed-seed points; 1.0 when fewer than two UAVs are alive.
double overlap_factor(const WorldState& world, double coverage_radius_m);

// reward_coeff * tau * sum_m 1(e_m > 0) sum_n c_mn q_mn.
double reward(const WorldState& world, double tau, double reward_coeff);

// State vector s: (c_mn, q_mn) pairs, row major over (m, n); length 2 M N.
std::vector<double> state_vector(const WorldState& world);

inline constexpr int kNumActions = 5;
// Actions: 0 +x, 1 -x, 2 +y, 3 -y, 4 hover.
Vec2 action_direction(int action);

struct Snapshot {
  std::vector<double> state_ideal;
  std::vector<double> state_sensed;  // equals state_ideal without state noise
  std::vector<std::vector<double>> obs_ideal;
  std::vector<std::vector<double>> obs_sensed;
};

struct StepOutcome {
  Snapshot next;
  double reward = 0.0;
  double support_rate = 0.0;  // served users / N
  double qos_total = 0.0;     // sum of q_mn
  double tau = 0.0;
};

// Dec-POMDP rollout engine. Draw order per step and per agent is fixed, so a
// seed fully determines an episode given the action sequence. Stream 0 is
// environment-owned (user placement, traffic mix, shared state noise);
// streams 1..M are per-agent (wind, observation noise).
class Environment {
 public:
  Environment(ScenarioConfig scenario, channel::ChannelParams channel_params,
              QosParams qos_params, NoiseOptions noise,
              UavEnergyParams energy, std::uint64_t seed,
              std::vector<channel::McsRow> mcs_table =
                  channel::default_mcs_table());

  Snapshot reset();
  StepOutcome step(const std::vector<int>& joint_action);

  const WorldState& world() const { return world_; }
  const ScenarioConfig& scenario() const { return scenario_; }
  const std::vector<channel::McsRow>& mcs_table() const { return mcs_table_; }
  int state_dim() const { return 2 * scenario_.num_uavs * scenario_.num_users; }
  int obs_dim() const { return scenario_.num_uavs + 3; }
  double service_radius_m() const { return service_radius_m_; }

 private:
  Snapshot snapshot();
  void refresh_service();

  ScenarioConfig scenario_;
  channel::ChannelParams channel_params_;
  QosParams qos_params_;
  NoiseOptions noise_;
  UavEnergyParams energy_;
  std::vector<channel::McsRow> mcs_table_;
  double service_radius_m_ = 0.0;
  double tau_ = 1.0;

  WorldState world_;
  stochastics::RngStream env_stream_;
  std::vector<stochastics::RngStream> agent_streams_;
  std::unique_ptr<stochastics::CauchySampler> cauchy_;
};

}  // namespace quav::env
