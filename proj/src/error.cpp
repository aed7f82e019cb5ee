// SPDX-License-Identifier: Apache-2.0
#include "metaseg/error.hpp"

namespace metaseg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotAProbability: return "NotAProbability";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SeparableDivergence: return "SeparableDivergence";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::SpecInfeasible: return "SpecInfeasible";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::NonConvergence || kind == ErrorKind::SeparableDivergence ||
         kind == ErrorKind::SingularSystem || kind == ErrorKind::ZeroVariance ||
         kind == ErrorKind::SingleClass;
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace metaseg
