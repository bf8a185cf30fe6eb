#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "quav/channel.hpp"
#include "quav/errors.hpp"
#include "quav/uav_env.hpp"
#include "support/oracles.hpp"

using namespace quav::env;

namespace {

// A world with explicit placements, full batteries unless stated otherwise.
WorldState make_world(std::vector<Vec2> uav_positions,
                      std::vector<Vec2> user_positions,
                      double energy_j = 321206.4) {
  WorldState world;
  for (const auto& p : uav_positions) {
    world.uavs.push_back(UavState{p, energy_j});
  }
  world.user_positions = std::move(user_positions);
  world.user_traffic.assign(world.user_positions.size(), TrafficType::Other);
  const std::size_t cells = world.uavs.size() * world.user_positions.size();
  world.served.assign(cells, 0);
  world.rate_mbps.assign(cells, 0.0);
  world.quality.assign(cells, 0.0);
  return world;
}

ScenarioConfig small_scenario() {
  ScenarioConfig s;
  s.map_size_m = 2000.0;
  s.num_uavs = 2;
  s.num_users = 4;
  s.observe_threshold_m = 1000.0;
  s.episode_steps = 5;
  return s;
}

}  // namespace

TEST_CASE("hover power decomposes into frozen blade and induced terms") {
  const UavEnergyParams p;
  // Independent restatement of the two hover terms, evaluated with the
  // default airframe constants and frozen from a separate evaluation.
  const double blade_ref = p.profile_drag_coeff / 8.0 * p.air_density_kgm3 *
                           p.rotor_solidity * p.rotor_disc_area_m2 *
                           (p.blade_angular_velocity_rads *
                            p.blade_angular_velocity_rads *
                            p.blade_angular_velocity_rads) *
                           (p.rotor_radius_m * p.rotor_radius_m *
                            p.rotor_radius_m);
  const double weight = p.aircraft_mass_kg * p.gravity_mps2;
  const double induced_ref =
      (1.0 + p.induced_power_factor) * weight * std::sqrt(weight) /
      std::sqrt(2.0 * p.air_density_kgm3 * p.rotor_disc_area_m2);
  CHECK(blade_profile_power_w(p) ==
        doctest::Approx(blade_ref).epsilon(1e-12));
  CHECK(blade_profile_power_w(p) ==
        doctest::Approx(79.85628).epsilon(1e-12));
  CHECK(induced_power_w(p) == doctest::Approx(induced_ref).epsilon(1e-12));
  CHECK(induced_power_w(p) ==
        doctest::Approx(49.013849310218156).epsilon(1e-12));
  CHECK(hover_power_w(p) ==
        doctest::Approx(128.87012931021818).epsilon(1e-12));
}

TEST_CASE("travel power at cruise speed") {
  const UavEnergyParams p;
  const auto terms = travel_power_terms(20.0, p);
  // Blade profile scales by (1 + 3 v^2 / U_tip) with the tabulated constants.
  CHECK(terms.blade_profile_w ==
        doctest::Approx(79.85628 * (1.0 + 3.0 * 400.0 / 120.0)).epsilon(1e-12));
  const double v0 = p.mean_rotor_induced_velocity_mps;
  const double root =
      std::sqrt(1.0 + 160000.0 / (4.0 * std::pow(v0, 4))) -
      400.0 / (2.0 * v0 * v0);
  CHECK(terms.induced_w ==
        doctest::Approx(49.013849310218156 * std::sqrt(root)).epsilon(1e-10));
  CHECK(terms.parasite_w ==
        doctest::Approx(0.5 * 0.6 * 1.225 * 0.05 * 0.503 * 8000.0)
            .epsilon(1e-12));
  CHECK(travel_power_w(20.0, p) == doctest::Approx(terms.total()));
  // Cruise costs several times hover: the battery drains quickly in flight.
  CHECK(travel_power_w(20.0, p) > 7.0 * hover_power_w(p));
  // Zero speed collapses to hover.
  CHECK(travel_power_w(0.0, p) ==
        doctest::Approx(hover_power_w(p)).epsilon(1e-12));
  CHECK_THROWS_AS(travel_power_w(-1.0, p), std::domain_error);
}

TEST_CASE("battery capacity and endurance") {
  const UavEnergyParams p;
  CHECK(p.battery_wh() == doctest::Approx(89.224).epsilon(1e-12));
  CHECK(p.battery_j() == doctest::Approx(321206.4).epsilon(1e-12));
  const double endurance_min = p.battery_j() / hover_power_w(p) / 60.0;
  CHECK(endurance_min == doctest::Approx(41.54).epsilon(1e-3));
  CHECK(endurance_min > 35.0);
  CHECK(endurance_min < 50.0);
}

TEST_CASE("energy parameter consistency checks") {
  UavEnergyParams p;
  p.tip_speed_mps = 100.0;  // disagrees with Omega * R = 120
  CHECK_THROWS_AS(p.validate(), quav::ConfigError);
  UavEnergyParams q;
  q.rotor_disc_area_m2 = 0.7;  // disagrees with pi R^2
  CHECK_THROWS_AS(q.validate(), quav::ConfigError);
  UavEnergyParams ok;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("qos curves") {
  const QosParams params;
  // The logistic video curve crosses exactly one half at the midpoint rate.
  CHECK(qos(1024.0, TrafficType::Video, params) == 0.5);
  CHECK(qos(2048.0, TrafficType::Video, params) > 0.5);
  CHECK(qos(0.0, TrafficType::Video, params) < 0.5);
  // Frozen log-curve sample: ln(2310 + 1).
  CHECK(qos(2310.0, TrafficType::Other, params) ==
        doctest::Approx(7.745435610274381).epsilon(1e-14));
  CHECK(qos(0.0, TrafficType::Other, params) == doctest::Approx(0.0));
  CHECK_THROWS_AS(qos(-1.0, TrafficType::Other, params), std::domain_error);
  // Both curves increase with rate.
  for (double r = 0.0; r < 4000.0; r += 250.0) {
    CHECK(qos(r + 250.0, TrafficType::Video, params) >
          qos(r, TrafficType::Video, params));
    CHECK(qos(r + 250.0, TrafficType::Other, params) >
          qos(r, TrafficType::Other, params));
  }
}

TEST_CASE("observation layout: position, gated distances, energy") {
  auto world = make_world({{100.0, 200.0}, {400.0, 600.0}, {5000.0, 5000.0}},
                          {{0.0, 0.0}});
  const auto obs = observe(world, 0, 1000.0);
  REQUIRE(obs.size() == 3 + 3);
  CHECK(obs[0] == 100.0);
  CHECK(obs[1] == 200.0);
  CHECK(obs[2] == 0.0);  // self distance
  CHECK(obs[3] == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(obs[4] == -1.0);  // beyond the observation threshold
  CHECK(obs[5] == doctest::Approx(321206.4));
  CHECK_THROWS_AS(observe(world, 3, 1000.0), std::invalid_argument);
}

TEST_CASE("service assignment picks the nearest alive uav inside coverage") {
  const ScenarioConfig scenario = small_scenario();
  const quav::channel::ChannelParams channel_params;
  const auto& table = quav::channel::default_mcs_table();
  const QosParams qos_params;

  // User 0 nearer UAV 1; user 1 equidistant (tie -> lower index); user 2
  // outside every coverage disc.
  auto world = make_world({{0.0, 0.0}, {300.0, 0.0}},
                          {{250.0, 0.0}, {150.0, 0.0}, {1500.0, 1500.0}});
  assign_service(world, scenario, channel_params, table, qos_params);
  const int n = world.num_users();
  CHECK(world.served[0 * n + 0] == 0);
  CHECK(world.served[1 * n + 0] == 1);
  CHECK(world.served[0 * n + 1] == 1);
  CHECK(world.served[1 * n + 1] == 0);
  CHECK(world.served[0 * n + 2] == 0);
  CHECK(world.served[1 * n + 2] == 0);

  // Rate of the 50 m link (UAV 1 to user 0): the lookup at the modelled
  // receive power, checked against the channel module directly.
  const double rx =
      quav::channel::rx_power_dbm(50.0, channel_params);
  CHECK(world.rate_mbps[1 * n + 0] ==
        doctest::Approx(quav::channel::mcs_rate_mbps(rx, table)));
  CHECK(world.quality[1 * n + 0] ==
        doctest::Approx(qos(world.rate_mbps[1 * n + 0], TrafficType::Other,
                            qos_params)));

  // A dead UAV serves nobody even when closest.
  world.uavs[1].energy_j = 0.0;
  assign_service(world, scenario, channel_params, table, qos_params);
  CHECK(world.served[1 * n + 0] == 0);
  CHECK(world.served[0 * n + 0] == 1);  // falls back to the farther UAV
}

TEST_CASE("slant range lowers the effective rate") {
  ScenarioConfig scenario = small_scenario();
  const quav::channel::ChannelParams channel_params;
  const auto& table = quav::channel::default_mcs_table();
  const QosParams qos_params;
  auto flat = make_world({{0.0, 0.0}}, {{50.0, 0.0}});
  assign_service(flat, scenario, channel_params, table, qos_params);
  scenario.use_slant_range = true;
  scenario.altitude_m = 200.0;
  auto slanted = make_world({{0.0, 0.0}}, {{50.0, 0.0}});
  assign_service(slanted, scenario, channel_params, table, qos_params);
  CHECK(slanted.rate_mbps[0] < flat.rate_mbps[0]);
}

TEST_CASE("overlap factor matches the two-disc lens formula") {
  const double r = 626.3956738140736;
  // Centres one radius apart: sizeable double-covered lens.
  auto world = make_world({{1000.0, 1000.0}, {1000.0 + r, 1000.0}}, {});
  const double tau = overlap_factor(world, r);
  const double lens = oracles::lens_area(r, r);
  const double expected = 1.0 - lens / (2.0 * M_PI * r * r - lens);
  CHECK(expected == doctest::Approx(0.7569902062251368).epsilon(1e-12));
  // Monte Carlo with 10^4 fixed points: a couple percent of sampling error.
  CHECK(std::abs(tau - expected) < 0.02);
  // Pure function of the world: identical on repeat calls.
  CHECK(overlap_factor(world, r) == tau);

  // Fully separated discs never double-cover.
  auto apart = make_world({{0.0, 0.0}, {10000.0, 10000.0}}, {});
  CHECK(overlap_factor(apart, r) == doctest::Approx(1.0));

  // Coincident discs double-cover everything.
  auto stacked = make_world({{500.0, 500.0}, {500.0, 500.0}}, {});
  CHECK(overlap_factor(stacked, r) == doctest::Approx(0.0));

  // Fewer than two alive UAVs: no penalty.
  auto solo = make_world({{0.0, 0.0}}, {});
  CHECK(overlap_factor(solo, r) == 1.0);
  auto dead = make_world({{0.0, 0.0}, {100.0, 0.0}}, {}, 0.0);
  CHECK(overlap_factor(dead, r) == 1.0);

  CHECK_THROWS_AS(overlap_factor(world, 0.0), std::domain_error);
}

TEST_CASE("reward sums alive service weighted by tau") {
  auto world = make_world({{0.0, 0.0}, {100.0, 0.0}}, {{10.0, 0.0}, {90.0, 0.0}});
  const int n = world.num_users();
  world.served[0 * n + 0] = 1;
  world.quality[0 * n + 0] = 2.0;
  world.served[1 * n + 1] = 1;
  world.quality[1 * n + 1] = 3.0;
  CHECK(reward(world, 0.5, 0.01) == doctest::Approx(0.01 * 0.5 * 5.0));
  // Dead UAVs contribute nothing.
  world.uavs[1].energy_j = 0.0;
  CHECK(reward(world, 0.5, 0.01) == doctest::Approx(0.01 * 0.5 * 2.0));
  // All dead: zero reward regardless of the service table.
  world.uavs[0].energy_j = 0.0;
  CHECK(reward(world, 0.5, 0.01) == 0.0);
  CHECK_THROWS_AS(reward(world, 1.5, 0.01), std::domain_error);
}

TEST_CASE("state vector interleaves served flags and quality row major") {
  auto world = make_world({{0.0, 0.0}, {100.0, 0.0}}, {{10.0, 0.0}, {90.0, 0.0}});
  const int n = world.num_users();
  world.served[0 * n + 1] = 1;
  world.quality[0 * n + 1] = 4.5;
  world.served[1 * n + 0] = 1;
  world.quality[1 * n + 0] = 2.5;
  const auto s = state_vector(world);
  REQUIRE(s.size() == 2 * 2 * 2);
  CHECK(s[0] == 0.0);  // c_00
  CHECK(s[1] == 0.0);  // q_00
  CHECK(s[2] == 1.0);  // c_01
  CHECK(s[3] == 4.5);  // q_01
  CHECK(s[4] == 1.0);  // c_10
  CHECK(s[5] == 2.5);  // q_10
  CHECK(s[6] == 0.0);
  CHECK(s[7] == 0.0);
}

TEST_CASE("action directions") {
  CHECK(action_direction(0).x == 1.0);
  CHECK(action_direction(1).x == -1.0);
  CHECK(action_direction(2).y == 1.0);
  CHECK(action_direction(3).y == -1.0);
  CHECK(action_direction(4).x == 0.0);
  CHECK(action_direction(4).y == 0.0);
  CHECK_THROWS_AS(action_direction(5), std::invalid_argument);
  CHECK_THROWS_AS(action_direction(-1), std::invalid_argument);
}

TEST_CASE("environment reset places uavs at the centre with full batteries") {
  Environment env(small_scenario(), {}, {}, {}, {}, 17);
  const auto snap = env.reset();
  CHECK(env.state_dim() == 2 * 2 * 4);
  CHECK(env.obs_dim() == 2 + 3);
  REQUIRE(static_cast<int>(snap.state_ideal.size()) == env.state_dim());
  REQUIRE(snap.obs_ideal.size() == 2);
  for (const auto& obs : snap.obs_ideal) {
    REQUIRE(static_cast<int>(obs.size()) == env.obs_dim());
    CHECK(obs[0] == doctest::Approx(1000.0));
    CHECK(obs[1] == doctest::Approx(1000.0));
    CHECK(obs.back() == doctest::Approx(321206.4));
  }
  // Users land inside the map and traffic types are assigned.
  for (const auto& u : env.world().user_positions) {
    CHECK(u.x >= 0.0);
    CHECK(u.x <= 2000.0);
    CHECK(u.y >= 0.0);
    CHECK(u.y <= 2000.0);
  }
  // Noise disabled: sensed views equal ideal views.
  CHECK(snap.state_sensed == snap.state_ideal);
  CHECK(snap.obs_sensed == snap.obs_ideal);
}

TEST_CASE("hover holds position and drains the frozen hover energy") {
  Environment env(small_scenario(), {}, {}, {}, {}, 17);
  env.reset();
  const auto out = env.step({4, 4});
  for (const auto& uav : env.world().uavs) {
    CHECK(uav.position.x == doctest::Approx(1000.0));
    CHECK(uav.position.y == doctest::Approx(1000.0));
    CHECK(uav.energy_j ==
          doctest::Approx(321206.4 - 7732.207758613091).epsilon(1e-12));
  }
  CHECK(out.support_rate >= 0.0);
  CHECK(out.support_rate <= 1.0);
  CHECK(out.tau >= 0.0);
  CHECK(out.tau <= 1.0);
  CHECK(out.reward >= 0.0);
}

TEST_CASE("moves cover speed times interval and clamp at the map edge") {
  Environment env(small_scenario(), {}, {}, {}, {}, 17);
  env.reset();
  env.step({0, 1});  // +x and -x
  CHECK(env.world().uavs[0].position.x == doctest::Approx(2000.0));  // clamped
  CHECK(env.world().uavs[1].position.x == doctest::Approx(0.0));     // clamped
  ScenarioConfig wide = small_scenario();
  wide.map_size_m = 6000.0;
  Environment env2(wide, {}, {}, {}, {}, 17);
  env2.reset();
  env2.step({0, 2});
  CHECK(env2.world().uavs[0].position.x == doctest::Approx(4200.0));  // +1200
  CHECK(env2.world().uavs[0].position.y == doctest::Approx(3000.0));
  CHECK(env2.world().uavs[1].position.y == doctest::Approx(4200.0));
}

TEST_CASE("dead uavs freeze in place and stop draining") {
  UavEnergyParams tiny;
  tiny.battery_capacity_ah = 0.001;  // a single travel step exhausts this
  ScenarioConfig scenario = small_scenario();
  Environment env(scenario, {}, {}, {}, tiny, 3);
  env.reset();
  env.step({0, 0});
  const double x_after = env.world().uavs[0].position.x;
  CHECK(env.world().uavs[0].energy_j == 0.0);
  CHECK_FALSE(env.world().uavs[0].alive());
  const auto out = env.step({0, 0});
  CHECK(env.world().uavs[0].position.x == x_after);  // frozen
  CHECK(env.world().uavs[0].energy_j == 0.0);
  // Observations report the empty battery.
  CHECK(out.next.obs_ideal[0].back() == 0.0);
}

TEST_CASE("step validates lifecycle and action shape") {
  Environment env(small_scenario(), {}, {}, {}, {}, 17);
  CHECK_THROWS_AS(env.step({4, 4}), std::logic_error);
  env.reset();
  CHECK_THROWS_AS(env.step({4}), std::invalid_argument);
  CHECK_THROWS_AS(env.step({4, 9}), std::invalid_argument);
  for (int i = 0; i < 5; ++i) env.step({4, 4});
  CHECK_THROWS_AS(env.step({4, 4}), std::logic_error);  // episode finished
  CHECK_NOTHROW(env.reset());
  CHECK_NOTHROW(env.step({4, 4}));
}

TEST_CASE("identical seeds reproduce identical episodes bitwise") {
  NoiseOptions noise;
  noise.state_noise = true;
  noise.action_noise = true;
  Environment a(small_scenario(), {}, {}, noise, {}, 99);
  Environment b(small_scenario(), {}, {}, noise, {}, 99);
  auto snap_a = a.reset();
  auto snap_b = b.reset();
  CHECK(snap_a.state_sensed == snap_b.state_sensed);
  for (int step = 0; step < 5; ++step) {
    const auto out_a = a.step({0, 4});
    const auto out_b = b.step({0, 4});
    CHECK(out_a.reward == out_b.reward);
    CHECK(out_a.next.state_sensed == out_b.next.state_sensed);
    CHECK(out_a.next.obs_sensed == out_b.next.obs_sensed);
  }
  // A different seed diverges.
  Environment c(small_scenario(), {}, {}, noise, {}, 100);
  const auto snap_c = c.reset();
  CHECK(snap_c.state_sensed != snap_a.state_sensed);
}

TEST_CASE("state noise perturbs the sensed views only") {
  NoiseOptions noise;
  noise.state_noise = true;
  Environment env(small_scenario(), {}, {}, noise, {}, 31);
  const auto snap = env.reset();
  CHECK(snap.state_sensed != snap.state_ideal);
  bool any_obs_differs = false;
  for (std::size_t m = 0; m < snap.obs_ideal.size(); ++m) {
    // Only the position entries of each observation are perturbed.
    if (snap.obs_sensed[m][0] != snap.obs_ideal[m][0] ||
        snap.obs_sensed[m][1] != snap.obs_ideal[m][1]) {
      any_obs_differs = true;
    }
    for (std::size_t i = 2; i < snap.obs_ideal[m].size(); ++i) {
      CHECK(snap.obs_sensed[m][i] == snap.obs_ideal[m][i]);
    }
  }
  CHECK(any_obs_differs);
}

TEST_CASE("wind displaces hovering uavs when action noise is on") {
  NoiseOptions noise;
  noise.action_noise = true;
  Environment env(small_scenario(), {}, {}, noise, {}, 41);
  env.reset();
  env.step({4, 4});
  bool moved = false;
  for (const auto& uav : env.world().uavs) {
    if (uav.position.x != 1000.0 || uav.position.y != 1000.0) moved = true;
  }
  CHECK(moved);
}

TEST_CASE("rewards stay nonnegative across random worlds") {
  quav::stochastics::RngStream rng(2025, 0);
  const quav::channel::ChannelParams channel_params;
  const auto& table = quav::channel::default_mcs_table();
  const QosParams qos_params;
  const ScenarioConfig scenario = small_scenario();
  const double radius = quav::channel::coverage_radius_m(0, table, channel_params);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<Vec2> uavs, users;
    for (int m = 0; m < 3; ++m) {
      uavs.push_back({rng.uniform(0.0, 2000.0), rng.uniform(0.0, 2000.0)});
    }
    for (int n = 0; n < 6; ++n) {
      users.push_back({rng.uniform(0.0, 2000.0), rng.uniform(0.0, 2000.0)});
    }
    auto world = make_world(std::move(uavs), std::move(users));
    for (auto& traffic : world.user_traffic) {
      traffic = rng.uniform() < 0.5 ? TrafficType::Video : TrafficType::Other;
    }
    assign_service(world, scenario, channel_params, table, qos_params);
    const double tau = overlap_factor(world, radius);
    CHECK(reward(world, tau, 0.01) >= 0.0);
  }
}
