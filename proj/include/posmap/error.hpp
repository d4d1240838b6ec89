// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posmap {

enum class ErrorCode {
  NotHermitian,
  NotSquare,
  NotPSD,
  SingularForNegativePower,
  DimensionMismatch,
  NonFinite,
  RankOutOfRange,
  KOutOfRange,
  ComponentNotKPositive,
  ComponentNotKCopositive,
  NotFaithful,
  NotAState,
  BetaOutOfRange,
  InconsistentSystem,
  NotInNaturalCone,
  NotInIntersection,
  NotInP,
  ParseError,
  StaleWitness,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posmap
