#pragma once

#include <stdexcept>
#include <string>

namespace ccnli {

/// Invalid configuration or argument supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The sampling grid cannot represent the requested operation without
/// wrap-around (time) or folding (frequency).
class AliasingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), achieved_(achieved) {}

  /// Error estimate (or other diagnostic) reached before giving up.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace ccnli
