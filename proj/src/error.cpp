// SPDX-License-Identifier: Apache-2.0
#include "extinctd/error.hpp"

namespace extinctd {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidRateMatrix: return "InvalidRateMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::RateBoundViolated: return "RateBoundViolated";
    case ErrorCode::NonFiniteObservable: return "NonFiniteObservable";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::SingularSolve: return "SingularSolve";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidAdjacency: return "InvalidAdjacency";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::NegativeParameter: return "NegativeParameter";
    case ErrorCode::NonPositiveF: return "NonPositiveF";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace extinctd
