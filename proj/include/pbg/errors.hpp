// errors.hpp — Error codes and the exception type thrown by the simulation core

#pragma once

#include <stdexcept>
#include <string>

namespace pbg {

enum class ErrorCode {
    NonPositiveCoupling,
    NonPositiveBandEdge,
    NonPositiveCavityFrequency,
    NegativeTemperature,
    NonPositiveFrequency,
    NonPositiveDelay,
    ToleranceNotMet,
    StepTooLarge,
    GridMismatch,
    TruncationTooSmall,
    ZeroFluctuation,
    MaskGap,
};

const char* to_string(ErrorCode code);

class SimError : public std::runtime_error {
  public:
    SimError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw SimError(code, what);
}

} // namespace pbg
