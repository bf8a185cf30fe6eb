#include "quav/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "quav/errors.hpp"

namespace quav::mlp {

Mlp::Mlp(int input_dim, int hidden_dim, int output_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), output_dim_(output_dim) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1) {
    throw std::invalid_argument("all perceptron dimensions must be >= 1");
  }
  params_.assign(static_cast<std::size_t>(hidden_dim) * input_dim + hidden_dim +
                     static_cast<std::size_t>(output_dim) * hidden_dim +
                     output_dim,
                 0.0);
}

std::size_t Mlp::w1_at(int h, int i) const {
  return static_cast<std::size_t>(h) * input_dim_ + i;
}
std::size_t Mlp::b1_at(int h) const {
  return static_cast<std::size_t>(hidden_dim_) * input_dim_ + h;
}
std::size_t Mlp::w2_at(int o, int h) const {
  return static_cast<std::size_t>(hidden_dim_) * input_dim_ + hidden_dim_ +
         static_cast<std::size_t>(o) * hidden_dim_ + h;
}
std::size_t Mlp::b2_at(int o) const {
  return static_cast<std::size_t>(hidden_dim_) * input_dim_ + hidden_dim_ +
         static_cast<std::size_t>(output_dim_) * hidden_dim_ + o;
}

void Mlp::init_weights(stochastics::RngStream& rng) {
  const double w1_bound = std::sqrt(6.0 / input_dim_);
  const double w2_bound = std::sqrt(6.0 / hidden_dim_);
  for (int h = 0; h < hidden_dim_; ++h) {
    for (int i = 0; i < input_dim_; ++i) {
      params_[w1_at(h, i)] = rng.uniform(-w1_bound, w1_bound);
    }
    params_[b1_at(h)] = 0.0;
  }
  for (int o = 0; o < output_dim_; ++o) {
    for (int h = 0; h < hidden_dim_; ++h) {
      params_[w2_at(o, h)] = rng.uniform(-w2_bound, w2_bound);
    }
    params_[b2_at(o)] = 0.0;
  }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw std::invalid_argument("input size mismatch");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("non-finite input entry");
  }
  std::vector<double> hidden(hidden_dim_);
  for (int h = 0; h < hidden_dim_; ++h) {
    double acc = params_[b1_at(h)];
    for (int i = 0; i < input_dim_; ++i) {
      acc += params_[w1_at(h, i)] * x[i];
    }
    hidden[h] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> out(output_dim_);
  for (int o = 0; o < output_dim_; ++o) {
    double acc = params_[b2_at(o)];
    for (int h = 0; h < hidden_dim_; ++h) {
      acc += params_[w2_at(o, h)] * hidden[h];
    }
    out[o] = acc;
  }
  return out;
}

void Mlp::backward(std::span<const double> x, std::span<const double> out_grad,
                   std::vector<double>& grad) const {
  if (static_cast<int>(x.size()) != input_dim_ ||
      static_cast<int>(out_grad.size()) != output_dim_) {
    throw std::invalid_argument("backward size mismatch");
  }
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("gradient buffer size mismatch");
  }
  std::vector<double> pre(hidden_dim_);
  std::vector<double> hidden(hidden_dim_);
  for (int h = 0; h < hidden_dim_; ++h) {
    double acc = params_[b1_at(h)];
    for (int i = 0; i < input_dim_; ++i) {
      acc += params_[w1_at(h, i)] * x[i];
    }
    pre[h] = acc;
    hidden[h] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> hidden_grad(hidden_dim_, 0.0);
  for (int o = 0; o < output_dim_; ++o) {
    const double g = out_grad[o];
    if (g == 0.0) continue;
    grad[b2_at(o)] += g;
    for (int h = 0; h < hidden_dim_; ++h) {
      grad[w2_at(o, h)] += g * hidden[h];
      hidden_grad[h] += g * params_[w2_at(o, h)];
    }
  }
  for (int h = 0; h < hidden_dim_; ++h) {
    if (pre[h] <= 0.0 || hidden_grad[h] == 0.0) continue;
    grad[b1_at(h)] += hidden_grad[h];
    for (int i = 0; i < input_dim_; ++i) {
      grad[w1_at(h, i)] += hidden_grad[h] * x[i];
    }
  }
}

std::string to_checkpoint_json(const Mlp& model, const std::string& role) {
  nlohmann::json doc{
      {"version", 1},
      {"role", role},
      {"kind", "perceptron"},
      {"input_dim", model.input_dim()},
      {"hidden_dim", model.hidden_dim()},
      {"output_dim", model.output_dim()},
      {"params", model.params()},
  };
  return doc.dump(2);
}

Mlp from_checkpoint_json(const std::string& text, std::string* role_out) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint parse failure: ") + e.what());
  }
  try {
    if (doc.at("kind").get<std::string>() != "perceptron") {
      throw DataError("checkpoint is not a perceptron model");
    }
    Mlp model(doc.at("input_dim").get<int>(), doc.at("hidden_dim").get<int>(),
              doc.at("output_dim").get<int>());
    auto params = doc.at("params").get<std::vector<double>>();
    if (params.size() != model.param_count()) {
      throw DataError("perceptron parameter count mismatch");
    }
    model.params() = std::move(params);
    if (role_out != nullptr) {
      *role_out = doc.at("role").get<std::string>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint field failure: ") + e.what());
  }
}

}  // namespace quav::mlp
