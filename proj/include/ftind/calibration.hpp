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

#ifndef FTIND__CALIBRATION_HPP_
#define FTIND__CALIBRATION_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ftind/coil_model.hpp"
#include "ftind/fitting.hpp"
#include "ftind/types.hpp"

namespace ftind::cal
{

using MatrixA = Eigen::Matrix<double, 6, 7>;

/// u = (x_raw - offset) / scale.
struct ChannelNormalization
{
  double offset = 0.0;
  double scale = 1.0;

  double apply(double raw) const {return (raw - offset) / scale;}
};

/// Six per-channel rational maps from normalised counts to a deformation
/// coordinate y_i, followed by F = A [y; 1].
struct Calibration
{
  std::array<fit::FitModel, kChannels> channel_maps;
  MatrixA matrix_a = MatrixA::Zero();
  std::array<ChannelNormalization, kChannels> raw_scale{};
  /// Raw range seen during calibration; decoding outside it is flagged.
  std::array<double, kChannels> raw_min{};
  std::array<double, kChannels> raw_max{};
  std::string geometry_hash;

  /// Throws PoleError (pole in the calibrated domain) or DomainError
  /// (non-finite entries, A not of full row rank).
  void validate() const;
};

struct DecodeResult
{
  Wrench wrench;
  bool extrapolated = false;
};

/// Deformation vector y (without the trailing 1).
std::array<double, kChannels> deformation(
  const Calibration & c, const std::array<double, kChannels> & raw);

DecodeResult decode(const Calibration & c, const std::array<double, kChannels> & raw);
DecodeResult decode(const Calibration & c, const RawCounts & raw);

/// A = [I | 0], identity rationals, identity normalisation.
Calibration identity_calibration();

/// Raw reading that decodes to `w`, searching each channel's calibrated range
/// widened by `margin` (normalised units). DomainError if A's square part is
/// singular or some channel has no solution there.
std::array<double, kChannels> raw_for_wrench(
  const Calibration & c, const Wrench & w, double margin = 0.0);

struct CalibrationOptions
{
  AxisRanges ranges{};
  /// Each axis must be swept over at least this fraction of its span.
  double min_excitation_fraction = 0.1;
  /// Leading samples forming the unloaded segment; 0 detects it from the
  /// reference wrench.
  std::size_t zero_load_samples = 0;
  /// Evenly strided subset used by the optimiser; 0 uses everything.
  std::size_t max_samples = 4000;
  int alternating_rounds = 2;
  /// Joint refinement of all parameters after the alternating seed.
  bool joint_refinement = true;
  /// Channel maps must stay pole-free on [-margin, 1 + margin] (normalised).
  double pole_margin = 0.05;
  fit::LmOptions lm{};
  std::string geometry_hash;
};

struct AxisFit
{
  double rmse = 0.0;
  double mean_pct = 0.0;
  double max_pct = 0.0;
};

struct CalReport
{
  std::array<AxisFit, kAxes> axes{};
  /// sqrt(mean over samples and axes of (error / span)^2).
  double normalized_rmse = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::size_t samples = 0;
  std::size_t samples_used = 0;
  std::array<double, kChannels> zero_load_raw{};
};

struct CalibrationOutcome
{
  Calibration calibration;
  CalReport report;
};

/// Joint nonlinear least squares over the six channel maps and A, seeded by
/// alternating rounds (A by linear least squares, then each channel map by a
/// one-dimensional rational fit). Residuals are weighted by 1 / span so that
/// forces and torques count alike. Each channel map is pinned to y = 0 and
/// dy/du = 1 at the zero-load reading, which removes the offset and scale
/// freedom shared with A.
CalibrationOutcome calibrate(const Dataset & data, const CalibrationOptions & options = {});

/// Per-axis error of a calibration against reference wrenches.
CalReport assess(const Calibration & c, const Dataset & data, const AxisRanges & ranges);

/// Stable FNV-1a hash of the coil geometries a calibration belongs to.
std::string geometry_hash(const std::vector<coil::CoilGeometry> & geometries);

void save_calibration(const Calibration & c, const std::filesystem::path & path);

/// Throws ChecksumError on truncated or altered files and VersionMismatch on
/// an unknown format version or, unless `allow_geometry_mismatch`, a
/// geometry hash different from `expected_geometry_hash`.
Calibration load_calibration(
  const std::filesystem::path & path,
  const std::optional<std::string> & expected_geometry_hash = std::nullopt,
  bool allow_geometry_mismatch = false);

}  // namespace ftind::cal

#endif  // FTIND__CALIBRATION_HPP_
