#include "mlod/error.hpp"

namespace mlod {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthNotMultipleOf16: return "LengthNotMultipleOf16";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::WrongFieldCount: return "WrongFieldCount";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DegenerateOnImage: return "DegenerateOnImage";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::OutsideExtents: return "OutsideExtents";
    case ErrorCode::InvalidDepthRange: return "InvalidDepthRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateCorners: return "DegenerateCorners";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

}  // namespace mlod
