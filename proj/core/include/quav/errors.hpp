#pragma once

#include <stdexcept>
#include <string>

namespace quav {

// Invalid experiment configuration. `field` is the dotted path of the
// offending key ("train.gamma"); the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)),
        message_(std::move(message)) {}
  const std::string& field() const noexcept { return field_; }
  // The bare message without the field prefix, for callers that add context
  // (the config parser prepends source line numbers).
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

// Malformed external data (checkpoint files, CSV tables, metrics inputs).
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (envelope exhaustion, non-finite intermediate values).
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace quav
