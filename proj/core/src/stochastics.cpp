#include "quav/stochastics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "quav/errors.hpp"

namespace quav::stochastics {

namespace {

constexpr std::uint64_t kMaxRejections = 1'000'000;

// splitmix64 scramble of (seed, stream) so engines never share a seed even
// for adjacent stream ids.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(mix(mix(seed) ^ mix(stream_id + 0x632be59bd9b4e019ULL))) {}

double RngStream::uniform() {
  // 53 mantissa bits -> uniform double in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_int needs n > 0");
  }
  // Rejection against the largest multiple of n to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % n;
}

double CauchyConfig::sigma_z() const { return std::sqrt(sigma_z_sq); }

void CauchyConfig::validate() const {
  if (!(impulsiveness_k > 0.0) || !std::isfinite(impulsiveness_k)) {
    throw ConfigError("noise.cauchy.k", "must be finite and > 0");
  }
  if (!(shape_v > 0.0) || !std::isfinite(shape_v)) {
    throw ConfigError("noise.cauchy.v", "must be finite and > 0");
  }
  if (!(sigma_z_sq > 0.0) || !std::isfinite(sigma_z_sq)) {
    throw ConfigError("noise.cauchy.sigma_z_sq", "must be finite and > 0");
  }
}

double cauchy_scale_x(const CauchyConfig& cfg) {
  cfg.validate();
  const double k = cfg.impulsiveness_k;
  // Gamma ratios via lgamma: Gamma(1/k) and Gamma(3/k) overflow directly for
  // small k.
  const double log_ratio = std::lgamma(1.0 / k) - std::lgamma(3.0 / k);
  return std::sqrt(cfg.sigma_z_sq * std::exp(log_ratio));
}

double cauchy_peak_y(const CauchyConfig& cfg) {
  cfg.validate();
  const double k = cfg.impulsiveness_k;
  const double v = cfg.shape_v;
  const double x = cauchy_scale_x(cfg);
  const double log_y = std::log(k) - std::log(v) / k +
                       std::lgamma(v + 1.0 / k) - std::log(2.0 * x) -
                       std::lgamma(v) - std::lgamma(1.0 / k);
  return std::exp(log_y);
}

double cauchy_pdf(double z, const CauchyConfig& cfg) {
  if (!std::isfinite(z)) {
    throw std::domain_error("pdf argument must be finite");
  }
  const double k = cfg.impulsiveness_k;
  const double v = cfg.shape_v;
  const double x = cauchy_scale_x(cfg);
  const double y = cauchy_peak_y(cfg);
  // log1p form keeps the (1 + u)^(v + 1/k) denominator accurate for tiny u.
  const double u = std::pow(std::abs(z) / x, k) / v;
  return y * std::exp(-(v + 1.0 / k) * std::log1p(u));
}

CauchySampler::CauchySampler(const CauchyConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  truncation_ = 50.0 * cfg_.sigma_z();
  envelope_scale_ = cfg_.sigma_z() / 50.0;
  scale_x_ = cauchy_scale_x(cfg_);
  peak_y_ = cauchy_peak_y(cfg_);

  // Envelope bound M = sup p(z) / g(z) over the truncated support, found on
  // a dense log grid (the ratio peaks at z = 0 for realistic configs; the
  // grid plus a 1.2 safety factor covers the rest).
  const double s = envelope_scale_;
  const auto envelope = [s](double z) {
    return (1.0 / (std::numbers::pi * s)) / (1.0 + (z / s) * (z / s));
  };
  double worst = pdf(0.0) / envelope(0.0);
  const int grid = 4000;
  const double lo = std::log(truncation_) - 28.0;
  const double hi = std::log(truncation_);
  for (int i = 0; i <= grid; ++i) {
    const double z = std::exp(lo + (hi - lo) * i / grid);
    worst = std::max(worst, pdf(z) / envelope(z));
  }
  bound_ = 1.2 * worst;
}

double CauchySampler::pdf(double z) const {
  const double u =
      std::pow(std::abs(z) / scale_x_, cfg_.impulsiveness_k) / cfg_.shape_v;
  return peak_y_ * std::exp(-(cfg_.shape_v + 1.0 / cfg_.impulsiveness_k) *
                            std::log1p(u));
}

double CauchySampler::sample_axis(RngStream& rng) {
  const double s = envelope_scale_;
  for (std::uint64_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    ++proposals_;
    // Standard Cauchy draw via the tangent transform.
    const double z =
        s * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
    if (std::abs(z) > truncation_) continue;
    const double envelope =
        (1.0 / (std::numbers::pi * s)) / (1.0 + (z / s) * (z / s));
    if (rng.uniform() * bound_ * envelope <= pdf(z)) {
      ++accepts_;
      return z;
    }
  }
  throw NumericError("position-noise envelope exhausted after " +
                     std::to_string(kMaxRejections) + " rejected proposals");
}

std::array<double, 2> CauchySampler::sample_offset(RngStream& rng) {
  const double dx = sample_axis(rng);
  const double dy = sample_axis(rng);
  return {dx, dy};
}

double CauchySampler::acceptance_rate() const {
  return proposals_ == 0
             ? 0.0
             : static_cast<double>(accepts_) / static_cast<double>(proposals_);
}

void WindConfig::validate() const {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ConfigError("noise.wind.shape", "must be finite and > 0");
  }
  if (!(scale_mps > 0.0) || !std::isfinite(scale_mps)) {
    throw ConfigError("noise.wind.scale_mps", "must be finite and > 0");
  }
  double total = 0.0;
  for (double p : direction_pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ConfigError("noise.wind.direction_pmf",
                        "entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("noise.wind.direction_pmf",
                      "must sum to 1 (got " + std::to_string(total) + ")");
  }
}

double weibull_quantile(double u, const WindConfig& cfg) {
  cfg.validate();
  if (!(u >= 0.0) || !(u < 1.0)) {
    throw std::domain_error("quantile argument outside [0, 1)");
  }
  return cfg.scale_mps * std::pow(-std::log1p(-u), 1.0 / cfg.shape);
}

double sample_wind_speed(RngStream& rng, const WindConfig& cfg) {
  return weibull_quantile(rng.uniform(), cfg);
}

int sample_wind_sector(RngStream& rng, const WindConfig& cfg) {
  cfg.validate();
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (int i = 0; i < 12; ++i) {
    cumulative += cfg.direction_pmf[i];
    if (u < cumulative) return i;
  }
  // Rounding can leave the cumulative a hair below 1; last nonzero sector.
  for (int i = 11; i >= 0; --i) {
    if (cfg.direction_pmf[i] > 0.0) return i;
  }
  throw NumericError("direction distribution has no support");
}

double sector_center_angle_rad(int sector) {
  if (sector < 0 || sector >= 12) {
    throw std::invalid_argument("sector index outside [0, 12)");
  }
  return sector * std::numbers::pi / 6.0;
}

std::array<double, 2> sample_wind_velocity(RngStream& rng,
                                           const WindConfig& cfg) {
  const double speed = sample_wind_speed(rng, cfg);
  const double angle = sector_center_angle_rad(sample_wind_sector(rng, cfg));
  return {speed * std::cos(angle), speed * std::sin(angle)};
}

}  // namespace quav::stochastics
