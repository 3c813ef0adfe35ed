#pragma once

#include <stdexcept>
#include <string>

namespace levyruin {

// Base for all library errors. `code()` is a stable machine-readable tag
// used by the CLI when emitting error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct UnsupportedJumpLawError : Error {
  explicit UnsupportedJumpLawError(const std::string& m) : Error("unsupported_jump_law", m) {}
};

struct DegenerateModelError : Error {
  explicit DegenerateModelError(const std::string& m) : Error("degenerate_model", m) {}
};

struct NoPositiveRootError : Error {
  explicit NoPositiveRootError(const std::string& m) : Error("no_positive_root", m) {}
};

struct InvalidTiltError : Error {
  explicit InvalidTiltError(const std::string& m) : Error("invalid_tilt", m) {}
};

struct NoContractivePowerError : Error {
  explicit NoContractivePowerError(const std::string& m) : Error("no_contractive_power", m) {}
};

struct LadderTimeOverflowError : Error {
  explicit LadderTimeOverflowError(const std::string& m) : Error("ladder_time_overflow", m) {}
};

struct MethodPreconditionError : Error {
  explicit MethodPreconditionError(const std::string& m) : Error("method_precondition", m) {}
};

struct InsufficientTailError : Error {
  explicit InsufficientTailError(const std::string& m) : Error("insufficient_tail", m) {}
};

struct GridTooCoarseError : Error {
  explicit GridTooCoarseError(const std::string& m) : Error("grid_too_coarse", m) {}
};

struct ArithmeticBandError : Error {
  explicit ArithmeticBandError(const std::string& m) : Error("arithmetic_band_unavailable", m) {}
};

struct ConfigError : Error {
  ConfigError(const std::string& m, std::string key = "")
      : Error("config_error", m), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace levyruin
