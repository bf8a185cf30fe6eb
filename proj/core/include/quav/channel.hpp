#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quav::channel {

// 60 GHz link-budget constants. Distances are metres, powers dBm unless the
// name says otherwise.
struct ChannelParams {
  double carrier_ghz = 60.0;
  double pathloss_exponent = 2.0;
  double bandwidth_hz = 2.16e9;
  double tx_power_dbm = 24.0;
  double tx_gain_dbi = 19.0;
  double rx_gain_dbi = 3.0;
  double half_power_beamwidth_deg = 10.0;  // phi_3 = theta_3
  double noise_psd_dbm_per_hz = -174.0;
  double extra_noise_db = 15.0;  // implementation margin + noise figure

  double eirp_dbm() const { return tx_power_dbm + tx_gain_dbi; }
  void validate() const;
};

struct McsRow {
  double sensitivity_dbm = 0.0;
  std::string mcs;
  double rate_mbps = 0.0;
  double shannon_gbps = 0.0;
};

// Embedded 12-row sensitivity -> rate table (single-carrier 60 GHz MCS set).
const std::vector<McsRow>& default_mcs_table();

// CSV with header "sensitivity_dbm,mcs,rate_mbps,shannon_gbps"; must contain
// 12 rows sorted by ascending sensitivity. Throws DataError otherwise.
std::vector<McsRow> load_mcs_csv(std::istream& in);
std::vector<McsRow> load_mcs_csv_file(const std::string& path);
std::string mcs_table_csv(const std::vector<McsRow>& table);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// 32.5 + 20 log10(f_GHz) + 10 n log10(d). Throws std::domain_error for d <= 0.
double path_loss_db(double distance_m, const ChannelParams& params = {});

// Gaussian main lobe with logarithmic sidelobe skirt: G_max - 12 delta^2 for
// delta < 1, else G_max - 12 - 15 ln(delta).
double gain_from_offset(double delta, const ChannelParams& params = {});

// Pattern gain for an off-boresight direction (azimuth phi, elevation theta,
// degrees). phi in [-180, 180], theta in [-90, 90].
double antenna_gain_dbi(double phi_deg, double theta_deg,
                        const ChannelParams& params = {});

// Boresight-aligned receive power: EIRP + G_rx - L(d).
double rx_power_dbm(double distance_m, const ChannelParams& params = {});
// Off-boresight transmit pattern variant.
double rx_power_dbm(double distance_m, double phi_deg, double theta_deg,
                    const ChannelParams& params = {});

double noise_floor_dbm(const ChannelParams& params = {});
double noise_floor_mw(const ChannelParams& params = {});

// A transmit beam aimed from tx_pos at aim_pos, interfering at rx_pos.
struct Beam {
  double tx_x = 0.0;
  double tx_y = 0.0;
  double aim_x = 0.0;
  double aim_y = 0.0;
};

// Sum over beams of mW received at (rx_x, rx_y): per beam, pattern gain at
// the angular offset between its aim and the receiver, plus transmit power,
// minus path loss. The receive-antenna gain is excluded for interferers.
double interference_mw(double rx_x, double rx_y, const std::vector<Beam>& beams,
                       const ChannelParams& params = {});

// bandwidth * log2(1 + P_rx / (noise + interference)), all powers in mW.
double shannon_capacity_bps(double rx_power_mw, double interference_mw,
                            const ChannelParams& params = {});

// Rate of the highest-sensitivity row with sensitivity <= rx power; 0 below
// the first row. A 1e-9 dB slack guards exact-threshold round trips.
double mcs_rate_mbps(double rx_dbm,
                     const std::vector<McsRow>& table = default_mcs_table());

// Boresight distance at which rx power equals the row's sensitivity
// (closed form from the path-loss model).
double coverage_radius_m(const McsRow& row, const ChannelParams& params = {});
double coverage_radius_m(std::size_t row_index,
                         const std::vector<McsRow>& table = default_mcs_table(),
                         const ChannelParams& params = {});

}  // namespace quav::channel
