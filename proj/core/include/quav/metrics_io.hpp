#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace quav::io {

// One training epoch (or evaluation episode) of run metrics. The CSV schema
// is fixed: epoch,reward,support_rate,qos_total,energy_remaining_mean,
// epsilon,wall_ms.
struct EpochRow {
  std::uint64_t epoch = 0;
  double reward = 0.0;
  double support_rate = 0.0;
  double qos_total = 0.0;
  double energy_remaining_mean = 0.0;
  double epsilon = 0.0;
  double wall_ms = 0.0;
};

// Per-step episode trace row (opt-in diagnostic dump).
struct TraceRow {
  std::uint64_t episode = 0;
  int step = 0;
  std::vector<double> uav_x;
  std::vector<double> uav_y;
  std::vector<double> uav_energy_j;
  double support_rate = 0.0;
  double qos_total = 0.0;
  double reward = 0.0;
};

// Trailing-window aggregate written next to the CSV as JSON.
struct RunSummary {
  std::string run_kind;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::uint64_t epochs = 0;
  std::size_t window = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
  double support_rate_mean = 0.0;
  double support_rate_std = 0.0;
  double qos_total_mean = 0.0;
  double qos_total_std = 0.0;
  double final_epsilon = 0.0;
  double total_wall_ms = 0.0;
  std::size_t model_param_count = 0;
};

// Write-to-temp-then-rename so readers never observe partial files.
void write_text_atomic(const std::string& path, const std::string& content);

// CSV with two leading stamp comments (# config_hash=..., # seed=...).
std::string metrics_csv(const std::vector<EpochRow>& rows,
                        const std::string& config_hash, std::uint64_t seed);

struct MetricsFile {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<EpochRow> rows;
};
MetricsFile read_metrics_csv(const std::string& path);

std::string trace_csv(const std::vector<TraceRow>& rows, int num_uavs,
                      const std::string& config_hash, std::uint64_t seed);

std::string summary_json(const RunSummary& summary);

// Trailing-window summary over the final fraction of rows (at least one row).
RunSummary summarize(const std::vector<EpochRow>& rows, double window_fraction);

// Trailing moving average: out[i] = mean(x[max(0, i-window+1) .. i]).
std::vector<double> moving_average(const std::vector<double>& series,
                                   int window);

// Smoothed reward / support_rate / qos_total table; the window is recorded in
// a header comment. Window 1 reproduces the input columns.
std::string plot_data_csv(const MetricsFile& metrics, int window);

}  // namespace quav::io
