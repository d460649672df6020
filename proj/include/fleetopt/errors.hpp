#pragma once

#include <stdexcept>
#include <string>

namespace fleetopt {

/// Raised when an input (solution vector, parameter file, CLI argument)
/// violates its contract. The message names the offending field.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when surrogate training diverges (non-finite loss).
class TrainingError : public std::runtime_error {
  public:
    TrainingError(const std::string& msg, int epoch)
        : std::runtime_error(msg), epoch_(epoch) {}

    int epoch() const { return epoch_; }

  private:
    int epoch_;
};

} // namespace fleetopt
