// Copyright 2026 The qqm Authors
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

#include "qqm/error.hpp"

namespace qqm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroDivisor: return "ZeroDivisor";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::NotPureImaginary: return "NotPureImaginary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymplectic: return "NotSymplectic";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotAntiHermitian: return "NotAntiHermitian";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::MissingTable: return "MissingTable";
    case ErrorCode::RegistryFrozen: return "RegistryFrozen";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SuperselectionViolated: return "SuperselectionViolated";
    case ErrorCode::BoundarySupport: return "BoundarySupport";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::EdgeSupport: return "EdgeSupport";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace qqm
