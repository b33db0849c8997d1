#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rabi {

enum class ErrorCode {
  InvalidArgument,
  BlockedRecurrence,
  NonFiniteCoefficient,
  InvalidExponent,
  OutsideDisk,
  NotConverged,
  WrongBeta,
  NotTruncated,
  DegenerateMap,
  MuZero,
  LambdaZero,
  NotEntire,
  SamplePointSingular,
  IntegerX,
  NotOnJuddSet,
  Unclassifiable,
  CurveCountMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rabi
