#pragma once

#include <stdexcept>
#include <string>

namespace mlod {

// Failure kinds surfaced by the library. Parse errors carry enough context
// (line / byte / field index) in the message to locate the bad input.
enum class ErrorCode {
  // input parsing
  LengthNotMultipleOf16,
  NonFiniteValue,
  MissingKey,
  WrongArity,
  ZeroNormal,
  WrongFieldCount,
  // geometry
  BehindCamera,
  DegenerateOnImage,
  DegenerateBox,
  OutsideExtents,
  // masking / features
  InvalidDepthRange,
  ShapeMismatch,
  // codec
  DegenerateCorners,
  ZeroVector,
  // labeling
  UnknownClass,
  // training
  NonFiniteLoss,
  // synthesis
  PlacementFailure,
  // cli / io
  IoFailure,
  BadConfig,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mlod
