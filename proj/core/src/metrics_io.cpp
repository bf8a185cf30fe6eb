#include "quav/metrics_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quav/errors.hpp"

namespace quav::io {

namespace {

constexpr const char* kMetricsHeader =
    "epoch,reward,support_rate,qos_total,energy_remaining_mean,epsilon,wall_ms";

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

double parse_double_field(const std::string& field, const std::string& line) {
  try {
    return std::stod(field);
  } catch (const std::exception&) {
    throw DataError("non-numeric metrics field in row: " + line);
  }
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw DataError("cannot create directory " +
                      target.parent_path().string() + ": " + ec.message());
    }
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw DataError("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw DataError("cannot rename " + tmp.string() + " to " + path + ": " +
                    ec.message());
  }
}

std::string metrics_csv(const std::vector<EpochRow>& rows,
                        const std::string& config_hash, std::uint64_t seed) {
  std::string out;
  out += "# config_hash=" + config_hash + "\n";
  out += "# seed=" + std::to_string(seed) + "\n";
  out += kMetricsHeader;
  out += '\n';
  for (const EpochRow& row : rows) {
    out += std::to_string(row.epoch);
    out += ',' + format_number(row.reward);
    out += ',' + format_number(row.support_rate);
    out += ',' + format_number(row.qos_total);
    out += ',' + format_number(row.energy_remaining_mean);
    out += ',' + format_number(row.epsilon);
    out += ',' + format_number(row.wall_ms);
    out += '\n';
  }
  return out;
}

MetricsFile read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open metrics file: " + path);
  }
  MetricsFile metrics;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config_hash=", 0) == 0) {
      metrics.config_hash = line.substr(14);
      continue;
    }
    if (line.rfind("# seed=", 0) == 0) {
      metrics.seed = std::stoull(line.substr(7));
      continue;
    }
    if (line[0] == '#') continue;
    if (!saw_header) {
      if (line != kMetricsHeader) {
        throw DataError("unexpected metrics header: " + line);
      }
      saw_header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    if (parts.size() != 7) {
      throw DataError("metrics row must have 7 fields: " + line);
    }
    EpochRow row;
    row.epoch = static_cast<std::uint64_t>(
        parse_double_field(parts[0], line));
    row.reward = parse_double_field(parts[1], line);
    row.support_rate = parse_double_field(parts[2], line);
    row.qos_total = parse_double_field(parts[3], line);
    row.energy_remaining_mean = parse_double_field(parts[4], line);
    row.epsilon = parse_double_field(parts[5], line);
    row.wall_ms = parse_double_field(parts[6], line);
    metrics.rows.push_back(row);
  }
  if (!saw_header) {
    throw DataError("metrics file has no header: " + path);
  }
  return metrics;
}

std::string trace_csv(const std::vector<TraceRow>& rows, int num_uavs,
                      const std::string& config_hash, std::uint64_t seed) {
  std::string out;
  out += "# config_hash=" + config_hash + "\n";
  out += "# seed=" + std::to_string(seed) + "\n";
  out += "episode,step";
  for (int m = 0; m < num_uavs; ++m) {
    const std::string suffix = std::to_string(m);
    out += ",uav" + suffix + "_x,uav" + suffix + "_y,uav" + suffix + "_energy_j";
  }
  out += ",support_rate,qos_total,reward\n";
  for (const TraceRow& row : rows) {
    out += std::to_string(row.episode);
    out += ',' + std::to_string(row.step);
    for (int m = 0; m < num_uavs; ++m) {
      out += ',' + format_number(row.uav_x.at(m));
      out += ',' + format_number(row.uav_y.at(m));
      out += ',' + format_number(row.uav_energy_j.at(m));
    }
    out += ',' + format_number(row.support_rate);
    out += ',' + format_number(row.qos_total);
    out += ',' + format_number(row.reward);
    out += '\n';
  }
  return out;
}

std::string summary_json(const RunSummary& summary) {
  nlohmann::json doc{
      {"run_kind", summary.run_kind},
      {"seed", summary.seed},
      {"config_hash", summary.config_hash},
      {"epochs", summary.epochs},
      {"window", summary.window},
      {"reward_mean", summary.reward_mean},
      {"reward_std", summary.reward_std},
      {"support_rate_mean", summary.support_rate_mean},
      {"support_rate_std", summary.support_rate_std},
      {"qos_total_mean", summary.qos_total_mean},
      {"qos_total_std", summary.qos_total_std},
      {"final_epsilon", summary.final_epsilon},
      {"total_wall_ms", summary.total_wall_ms},
      {"model_param_count", summary.model_param_count},
  };
  return doc.dump(2) + "\n";
}

RunSummary summarize(const std::vector<EpochRow>& rows,
                     double window_fraction) {
  if (rows.empty()) {
    throw DataError("cannot summarize an empty metrics table");
  }
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw std::invalid_argument("window fraction outside (0, 1]");
  }
  RunSummary s;
  s.epochs = rows.size();
  s.window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(window_fraction * rows.size())));
  s.window = std::min(s.window, rows.size());

  const std::size_t start = rows.size() - s.window;
  auto stats = [&](auto pick, double& mean, double& stddev) {
    double acc = 0.0;
    for (std::size_t i = start; i < rows.size(); ++i) acc += pick(rows[i]);
    mean = acc / static_cast<double>(s.window);
    double sq = 0.0;
    for (std::size_t i = start; i < rows.size(); ++i) {
      const double d = pick(rows[i]) - mean;
      sq += d * d;
    }
    stddev = std::sqrt(sq / static_cast<double>(s.window));
  };
  stats([](const EpochRow& r) { return r.reward; }, s.reward_mean, s.reward_std);
  stats([](const EpochRow& r) { return r.support_rate; }, s.support_rate_mean,
        s.support_rate_std);
  stats([](const EpochRow& r) { return r.qos_total; }, s.qos_total_mean,
        s.qos_total_std);
  s.final_epsilon = rows.back().epsilon;
  for (const EpochRow& row : rows) s.total_wall_ms += row.wall_ms;
  return s;
}

std::vector<double> moving_average(const std::vector<double>& series,
                                   int window) {
  if (window < 1) {
    throw std::invalid_argument("moving-average window must be >= 1");
  }
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<std::size_t>(window)) {
      acc -= series[i - window];
    }
    const std::size_t count = std::min<std::size_t>(i + 1, window);
    out[i] = acc / static_cast<double>(count);
  }
  return out;
}

std::string plot_data_csv(const MetricsFile& metrics, int window) {
  if (metrics.rows.empty()) {
    throw DataError("no metrics rows to smooth");
  }
  std::vector<double> reward, support, qos;
  reward.reserve(metrics.rows.size());
  for (const EpochRow& row : metrics.rows) {
    reward.push_back(row.reward);
    support.push_back(row.support_rate);
    qos.push_back(row.qos_total);
  }
  const auto reward_ma = moving_average(reward, window);
  const auto support_ma = moving_average(support, window);
  const auto qos_ma = moving_average(qos, window);
  std::string out;
  out += "# window=" + std::to_string(window) + "\n";
  out += "# config_hash=" + metrics.config_hash + "\n";
  out += "# seed=" + std::to_string(metrics.seed) + "\n";
  out += "epoch,reward_ma,support_rate_ma,qos_total_ma\n";
  for (std::size_t i = 0; i < metrics.rows.size(); ++i) {
    out += std::to_string(metrics.rows[i].epoch);
    out += ',' + format_number(reward_ma[i]);
    out += ',' + format_number(support_ma[i]);
    out += ',' + format_number(qos_ma[i]);
    out += '\n';
  }
  return out;
}

}  // namespace quav::io
