// Copyright 2026 The GAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAP_ERROR_HPP
#define GAP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace gap {

/// Failure categories raised by the library.
enum class ErrorKind {
  DimensionMismatch,
  NotLowerTriangular,
  ZeroDiagonal,
  NotSquare,
  NotSPD,
  RankDeficient,
  GridMismatch,
  AntipodalOrEqual,
  InvalidSpec,
  InvalidArgument,
  BadCorrelation,
  DegenerateWeights,
  StepProducedSingularL,
  NoConvergence,
  IndefiniteHessian,
  DomainError,
  ParseError,
  IOError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotLowerTriangular: return "NotLowerTriangular";
    case ErrorKind::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::AntipodalOrEqual: return "AntipodalOrEqual";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BadCorrelation: return "BadCorrelation";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::StepProducedSingularL: return "StepProducedSingularL";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IndefiniteHessian: return "IndefiniteHessian";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

/// Exception carrying an ErrorKind so callers can branch on the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gap

#endif
