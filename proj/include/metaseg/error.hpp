// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metaseg {

enum class ErrorKind {
  MalformedHeader,
  DimensionMismatch,
  NotAProbability,
  LabelOutOfRange,
  IoFailure,
  EmptyInterior,
  EmptyDataset,
  EmptyInput,
  SingleClass,
  ZeroVariance,
  NonConvergence,
  SeparableDivergence,
  SingularSystem,
  SpecInfeasible,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// True for failures of the numerical routines (solver divergence, singular
/// systems); false for malformed or inconsistent input data.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace metaseg
