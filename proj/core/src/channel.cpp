#include "quav/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "quav/errors.hpp"

namespace quav::channel {

namespace {

constexpr double kMcsSlackDb = 1e-9;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string(what) + " must be finite");
  }
}

}  // namespace

void ChannelParams::validate() const {
  if (!(carrier_ghz > 0.0)) throw ConfigError("channel.carrier_ghz", "must be > 0");
  if (!(pathloss_exponent > 0.0)) {
    throw ConfigError("channel.pathloss_exponent", "must be > 0");
  }
  if (!(bandwidth_hz > 0.0)) throw ConfigError("channel.bandwidth_hz", "must be > 0");
  if (!(half_power_beamwidth_deg > 0.0)) {
    throw ConfigError("channel.half_power_beamwidth_deg", "must be > 0");
  }
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(tx_gain_dbi) ||
      !std::isfinite(rx_gain_dbi) || !std::isfinite(noise_psd_dbm_per_hz) ||
      !std::isfinite(extra_noise_db)) {
    throw ConfigError("channel", "non-finite parameter");
  }
}

const std::vector<McsRow>& default_mcs_table() {
  static const std::vector<McsRow> table = {
      {-78.0, "MCS0", 27.5, 1.43},    {-68.0, "MCS1", 385.0, 2.04},
      {-66.0, "MCS2", 770.0, 2.40},   {-65.0, "MCS3", 962.5, 2.81},
      {-64.0, "MCS4", 1155.0, 3.25},  {-63.0, "MCS6", 1540.0, 3.74},
      {-62.0, "MCS7", 1925.0, 4.25},  {-61.0, "MCS8", 2310.0, 5.38},
      {-59.0, "MCS9", 2502.5, 7.90},  {-55.0, "MCS10", 3080.0, 8.57},
      {-54.0, "MCS11", 3850.0, 9.23}, {-53.0, "MCS12", 4620.0, 43.48},
  };
  return table;
}

std::vector<McsRow> load_mcs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty MCS table");
  }
  if (line != "sensitivity_dbm,mcs,rate_mbps,shannon_gbps") {
    throw DataError("unexpected MCS table header: " + line);
  }
  std::vector<McsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string sens, mcs, rate, shannon;
    if (!std::getline(fields, sens, ',') || !std::getline(fields, mcs, ',') ||
        !std::getline(fields, rate, ',') || !std::getline(fields, shannon)) {
      throw DataError("malformed MCS row: " + line);
    }
    McsRow row;
    try {
      row.sensitivity_dbm = std::stod(sens);
      row.mcs = mcs;
      row.rate_mbps = std::stod(rate);
      row.shannon_gbps = std::stod(shannon);
    } catch (const std::exception&) {
      throw DataError("non-numeric MCS field: " + line);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != 12) {
    throw DataError("MCS table must have 12 rows, got " +
                    std::to_string(rows.size()));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i - 1].sensitivity_dbm < rows[i].sensitivity_dbm)) {
      throw DataError("MCS sensitivities must be strictly ascending");
    }
  }
  return rows;
}

std::vector<McsRow> load_mcs_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open MCS table: " + path);
  }
  return load_mcs_csv(in);
}

std::string mcs_table_csv(const std::vector<McsRow>& table) {
  std::string out = "sensitivity_dbm,mcs,rate_mbps,shannon_gbps\n";
  for (const McsRow& row : table) {
    out += format_number(row.sensitivity_dbm);
    out += ',';
    out += row.mcs;
    out += ',';
    out += format_number(row.rate_mbps);
    out += ',';
    out += format_number(row.shannon_gbps);
    out += '\n';
  }
  return out;
}

double dbm_to_mw(double dbm) {
  check_finite(dbm, "dBm value");
  return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw) {
  if (!(mw > 0.0)) {
    throw std::domain_error("mW value must be > 0 for dBm conversion");
  }
  return 10.0 * std::log10(mw);
}

double path_loss_db(double distance_m, const ChannelParams& params) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("path loss needs distance > 0");
  }
  return 32.5 + 20.0 * std::log10(params.carrier_ghz) +
         10.0 * params.pathloss_exponent * std::log10(distance_m);
}

double gain_from_offset(double delta, const ChannelParams& params) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::domain_error("pattern offset must be finite and >= 0");
  }
  if (delta < 1.0) {
    return params.tx_gain_dbi - 12.0 * delta * delta;
  }
  return params.tx_gain_dbi - 12.0 - 15.0 * std::log(delta);
}

double antenna_gain_dbi(double phi_deg, double theta_deg,
                        const ChannelParams& params) {
  if (!std::isfinite(phi_deg) || phi_deg < -180.0 || phi_deg > 180.0) {
    throw std::domain_error("azimuth offset outside [-180, 180] deg");
  }
  if (!std::isfinite(theta_deg) || theta_deg < -90.0 || theta_deg > 90.0) {
    throw std::domain_error("elevation offset outside [-90, 90] deg");
  }
  const double phi = deg_to_rad(phi_deg);
  const double theta = deg_to_rad(theta_deg);
  // Total angular separation from boresight, degrees.
  const double separation_deg =
      rad_to_deg(std::acos(std::clamp(std::cos(phi) * std::cos(theta), -1.0, 1.0)));
  if (separation_deg == 0.0) {
    return params.tx_gain_dbi;
  }
  // Direction-dependent beamwidth normalization. The azimuth/elevation mix
  // angle mixes the two half-power widths; they are equal here but the
  // formula keeps them distinct.
  const double mix = std::atan2(std::tan(theta), std::sin(phi));
  const double phi3 = params.half_power_beamwidth_deg;
  const double theta3 = params.half_power_beamwidth_deg;
  const double norm = std::sqrt(std::pow(std::cos(mix) / phi3, 2) +
                                std::pow(std::sin(mix) / theta3, 2));
  const double delta = std::abs(separation_deg * norm);
  return gain_from_offset(delta, params);
}

double rx_power_dbm(double distance_m, const ChannelParams& params) {
  return params.eirp_dbm() + params.rx_gain_dbi -
         path_loss_db(distance_m, params);
}

double rx_power_dbm(double distance_m, double phi_deg, double theta_deg,
                    const ChannelParams& params) {
  return antenna_gain_dbi(phi_deg, theta_deg, params) + params.tx_power_dbm +
         params.rx_gain_dbi - path_loss_db(distance_m, params);
}

double noise_floor_dbm(const ChannelParams& params) {
  return params.noise_psd_dbm_per_hz + 10.0 * std::log10(params.bandwidth_hz) +
         params.extra_noise_db;
}

double noise_floor_mw(const ChannelParams& params) {
  return dbm_to_mw(noise_floor_dbm(params));
}

double interference_mw(double rx_x, double rx_y, const std::vector<Beam>& beams,
                       const ChannelParams& params) {
  double total = 0.0;
  for (const Beam& beam : beams) {
    const double dx = rx_x - beam.tx_x;
    const double dy = rx_y - beam.tx_y;
    const double distance = std::hypot(dx, dy);
    if (!(distance > 0.0)) {
      throw std::domain_error("interferer coincides with receiver");
    }
    const double ax = beam.aim_x - beam.tx_x;
    const double ay = beam.aim_y - beam.tx_y;
    double offset_deg = 0.0;
    if (ax != 0.0 || ay != 0.0) {
      double angle = std::atan2(dy, dx) - std::atan2(ay, ax);
      if (angle > std::numbers::pi) angle -= 2.0 * std::numbers::pi;
      if (angle < -std::numbers::pi) angle += 2.0 * std::numbers::pi;
      offset_deg = rad_to_deg(angle);
    }
    const double gain = antenna_gain_dbi(offset_deg, 0.0, params);
    total += dbm_to_mw(gain + params.tx_power_dbm -
                       path_loss_db(distance, params));
  }
  return total;
}

double shannon_capacity_bps(double rx_power_mw, double interference_mw,
                            const ChannelParams& params) {
  if (!(rx_power_mw >= 0.0) || !std::isfinite(rx_power_mw)) {
    throw std::domain_error("receive power must be finite and >= 0 mW");
  }
  if (!(interference_mw >= 0.0) || !std::isfinite(interference_mw)) {
    throw std::domain_error("interference must be finite and >= 0 mW");
  }
  const double denom = noise_floor_mw(params) + interference_mw;
  if (!(denom > 0.0)) {
    throw std::domain_error("noise-plus-interference must be > 0");
  }
  return params.bandwidth_hz * std::log2(1.0 + rx_power_mw / denom);
}

double mcs_rate_mbps(double rx_dbm, const std::vector<McsRow>& table) {
  check_finite(rx_dbm, "rx power");
  if (table.empty()) {
    throw DataError("empty MCS table");
  }
  double rate = 0.0;
  for (const McsRow& row : table) {
    if (row.sensitivity_dbm <= rx_dbm + kMcsSlackDb) {
      rate = row.rate_mbps;
    } else {
      break;
    }
  }
  return rate;
}

double coverage_radius_m(const McsRow& row, const ChannelParams& params) {
  const double budget = params.eirp_dbm() + params.rx_gain_dbi -
                        row.sensitivity_dbm - 32.5 -
                        20.0 * std::log10(params.carrier_ghz);
  return std::pow(10.0, budget / (10.0 * params.pathloss_exponent));
}

double coverage_radius_m(std::size_t row_index, const std::vector<McsRow>& table,
                         const ChannelParams& params) {
  if (row_index >= table.size()) {
    throw std::invalid_argument("MCS row index out of range");
  }
  return coverage_radius_m(table[row_index], params);
}

}  // namespace quav::channel
