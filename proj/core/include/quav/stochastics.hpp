#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace quav::stochastics {

// Deterministic substream: two engines built from the same seed but different
// stream ids never share draws. All sampling goes through these helpers, so
// replays are bit-identical for a given (seed, stream_id, draw order).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  std::uint64_t uniform_int(std::uint64_t n);  // [0, n)

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Generalized Cauchy position noise: density
//   p(z) = Y / (1 + (|z|/X)^k / v)^(v + 1/k)
// with X, Y derived from (k, v, sigma_z^2) via gamma-function ratios.
struct CauchyConfig {
  double impulsiveness_k = 0.20;
  double shape_v = 40.0;
  double sigma_z_sq = 0.22;

  double sigma_z() const;
  void validate() const;
};

double cauchy_scale_x(const CauchyConfig& cfg);
double cauchy_peak_y(const CauchyConfig& cfg);
double cauchy_pdf(double z, const CauchyConfig& cfg);

// Rejection sampler against a heavy-tailed (standard Cauchy) envelope,
// truncated to |z| <= 50 sigma_z. The envelope bound is precomputed on a
// dense grid at construction. Throws NumericError if 10^6 consecutive
// proposals are rejected (envelope exhaustion).
class CauchySampler {
 public:
  explicit CauchySampler(const CauchyConfig& cfg);

  double sample_axis(RngStream& rng);
  std::array<double, 2> sample_offset(RngStream& rng);  // independent axes

  double truncation_bound() const { return truncation_; }
  double envelope_bound() const { return bound_; }
  // Accept ratio over the sampler's lifetime; meaningful after some draws.
  double acceptance_rate() const;

 private:
  double pdf(double z) const;

  CauchyConfig cfg_;
  double envelope_scale_ = 0.0;
  double truncation_ = 0.0;
  double bound_ = 0.0;
  double scale_x_ = 0.0;
  double peak_y_ = 0.0;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepts_ = 0;
};

// Weibull wind speed with a 12-sector direction distribution. Sector i covers
// the compass slice centred at i * 30 degrees counterclockwise from +x.
struct WindConfig {
  double shape = 2.29;
  double scale_mps = 10.97;
  std::array<double, 12> direction_pmf{
      1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12,
      1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12};

  void validate() const;
};

// Inverse CDF: scale * (-ln(1 - u))^(1/shape), so u = 1 - e^-1 maps exactly
// to the scale parameter.
double weibull_quantile(double u, const WindConfig& cfg);
double sample_wind_speed(RngStream& rng, const WindConfig& cfg);
int sample_wind_sector(RngStream& rng, const WindConfig& cfg);
double sector_center_angle_rad(int sector);

// Velocity vector: speed from the Weibull marginal, direction from the
// sector distribution.
std::array<double, 2> sample_wind_velocity(RngStream& rng,
                                           const WindConfig& cfg);

}  // namespace quav::stochastics
