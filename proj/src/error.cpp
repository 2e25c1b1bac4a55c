// Copyright 2026 The ftind Authors
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

#include "ftind/error.hpp"
#include "ftind/types.hpp"

#include <cmath>
#include <string>

namespace ftind
{

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::NonPositiveInnerDiameter: return "NonPositiveInnerDiameter";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ModelError: return "ModelError";
    case ErrorCode::PlateContact: return "PlateContact";
    case ErrorCode::RateError: return "RateError";
    case ErrorCode::PoleError: return "PoleError";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::NonFiniteResidual: return "NonFiniteResidual";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::InsufficientExcitation: return "InsufficientExcitation";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumError: return "ChecksumError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::DegenerateRun: return "DegenerateRun";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::ChannelOverflow: return "ChannelOverflow";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::BadCrc: return "BadCrc";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValueError: return "ValueError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void AxisRanges::validate() const
{
  for (std::size_t i = 0; i < kAxes; ++i) {
    if (!(span[i] > 0.0) || !std::isfinite(span[i])) {
      throw Error(
        ErrorCode::ConfigError,
        "axis range for " + std::string(kAxisNames[i]) + " must be positive");
    }
  }
}

}  // namespace ftind
