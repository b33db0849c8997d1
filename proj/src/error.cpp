#include "rabi/error.hpp"

namespace rabi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BlockedRecurrence: return "BlockedRecurrence";
    case ErrorCode::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::OutsideDisk: return "OutsideDisk";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::WrongBeta: return "WrongBeta";
    case ErrorCode::NotTruncated: return "NotTruncated";
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::MuZero: return "MuZero";
    case ErrorCode::LambdaZero: return "LambdaZero";
    case ErrorCode::NotEntire: return "NotEntire";
    case ErrorCode::SamplePointSingular: return "SamplePointSingular";
    case ErrorCode::IntegerX: return "IntegerX";
    case ErrorCode::NotOnJuddSet: return "NotOnJuddSet";
    case ErrorCode::Unclassifiable: return "Unclassifiable";
    case ErrorCode::CurveCountMismatch: return "CurveCountMismatch";
  }
  return "Unknown";
}

}  // namespace rabi
