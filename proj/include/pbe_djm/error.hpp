#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbe {

enum class ErrorCode {
  DivergentTail,
  DivergentMoment,
  UnsupportedClass,
  MixedRates,
  MissingRadius,
  TermBlowup,
  UnknownExample,
  QuadratureFailure,
  Blowup,
  NoExactSolution,
  InvalidConfig,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Typed failure raised by every module. `code()` is stable; the message is
/// for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pbe
