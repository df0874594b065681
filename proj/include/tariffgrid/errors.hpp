#pragma once

#include <stdexcept>
#include <string>

namespace tariffgrid {

// Error codes used across modules. Exceptions carry one of these so callers
// (and the CLI) can map failures to messages and exit codes without parsing
// strings.
enum class ErrorCode {
    // network topology
    CycleDetected,
    DisconnectedBus,
    NoSlack,
    MultipleSlack,
    UnknownBus,
    // data shape
    DimensionMismatch,
    InvalidPlan,
    // devices
    NonpositiveVoltageParameter,
    OutOfRangeEnergy,
    // solver usage
    NonconvexQuadratic,
    InstanceTooLarge,
    NoFeasiblePattern,
    NonConvergence,
    // scenario I/O
    ParseError,
    ValidationError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace tariffgrid
