// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace extinctd {

// Stable numeric values: they cross the C API boundary.
enum class ErrorCode : int {
  Ok = 0,
  MissingField = 1,
  InvalidRateMatrix = 2,
  DimensionMismatch = 3,
  NonFiniteState = 4,
  RateBoundViolated = 5,
  NonFiniteObservable = 6,
  EmptyWindow = 7,
  WindowTooShort = 8,
  NonSquare = 9,
  Reducible = 10,
  SingularSolve = 11,
  NoConvergence = 12,
  LengthMismatch = 13,
  IndexOutOfRange = 14,
  InvalidAdjacency = 15,
  NegativeRate = 16,
  NegativeParameter = 17,
  NonPositiveF = 18,
  ParseError = 19,
  UnknownKey = 20,
  UnknownModel = 21,
  InvalidConfig = 22,
  IoError = 23,
  InvalidArgument = 24,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace extinctd
