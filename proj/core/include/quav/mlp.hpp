#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "quav/stochastics.hpp"

namespace quav::mlp {

// Single-hidden-layer perceptron with rectified-linear activation and a
// linear output head (callers apply softmax where needed). Parameters are
// exposed as one flat vector ordered [W1 | b1 | W2 | b2] so optimizers and
// finite-difference checks treat classical and quantum models alike.
class Mlp {
 public:
  Mlp(int input_dim, int hidden_dim, int output_dim);

  // He-style uniform init, deterministic from the stream.
  void init_weights(stochastics::RngStream& rng);

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }
  int output_dim() const { return output_dim_; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> forward(std::span<const double> x) const;

  // Gradient of sum_j out_grad[j] * output_j(x) with respect to every
  // parameter, accumulated into grad (same layout as params).
  void backward(std::span<const double> x, std::span<const double> out_grad,
                std::vector<double>& grad) const;

 private:
  int input_dim_;
  int hidden_dim_;
  int output_dim_;
  std::vector<double> params_;

  std::size_t w1_at(int h, int i) const;
  std::size_t b1_at(int h) const;
  std::size_t w2_at(int o, int h) const;
  std::size_t b2_at(int o) const;
};

std::string to_checkpoint_json(const Mlp& model, const std::string& role);
Mlp from_checkpoint_json(const std::string& text, std::string* role_out);

}  // namespace quav::mlp
