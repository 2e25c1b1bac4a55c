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

#ifndef FTIND__METRICS_HPP_
#define FTIND__METRICS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ftind/types.hpp"

namespace ftind::metrics
{

/// Errors as a percentage of each axis' full-scale span.
struct AxisError
{
  double mean_pct = 0.0;   // mean |error|
  double std_pct = 0.0;    // sample standard deviation of |error|
  double max_pct = 0.0;
  double rmse = 0.0;       // in axis units
};

/// Throws LengthMismatch or DegenerateData (empty input).
std::array<AxisError, kAxes> full_scale_error(
  std::span<const Wrench> decoded, std::span<const Wrench> reference,
  const AxisRanges & ranges = {});

/// Sample standard deviation (n - 1) per axis. DegenerateWindow below two samples.
std::array<double, kAxes> axis_std(std::span<const Wrench> window);

inline constexpr double kDefaultSigmaMultiplier = 3.0;

/// k times the per-axis standard deviation of an unloaded window.
std::array<double, kAxes> resolution_from_noise(
  std::span<const Wrench> window, double k = kDefaultSigmaMultiplier);

/// Multiplier that maps the measured noise onto a quoted resolution.
double sigma_multiplier_for(double resolution, double noise_std);

/// floor(span / resolution), never below 1. DomainError if resolution <= 0.
std::int64_t quantization_levels(double span, double resolution);

using CrosstalkMatrix = std::array<std::array<double, kAxes>, kAxes>;

/// Row i holds the responses to an excitation of axis i:
///   100 * (peak_j / span_j) / (peak_i / span_i),
/// with peaks measured from `baseline`. The diagonal is 100 by construction.
/// MissingRun if an axis has no run, DegenerateRun if its own peak is zero.
CrosstalkMatrix crosstalk_matrix(
  const std::array<std::vector<Wrench>, kAxes> & runs, const Wrench & baseline,
  const AxisRanges & ranges = {});

struct TimedWrench
{
  std::uint64_t t_us = 0;
  Wrench wrench;
};

/// Pairs each decoded sample with the nearest reference sample in time;
/// pairs further apart than `max_skew_us` are dropped. Both inputs must be
/// sorted by time.
std::vector<std::pair<std::size_t, std::size_t>> align_by_timestamp(
  std::span<const TimedWrench> decoded, std::span<const TimedWrench> reference,
  std::uint64_t max_skew_us = 1000);

struct Segmentation
{
  /// Samples where only axis i is loaded (others within the quiet band).
  std::array<std::vector<std::size_t>, kAxes> runs;
  /// Longest contiguous stretch where every axis is quiet.
  std::vector<std::size_t> unloaded;
};

/// Splits a reference trace into single-axis excitations and the unloaded
/// window. A value counts as loaded above `active_fraction` of the span and
/// as quiet below `quiet_fraction`.
Segmentation segment(
  std::span<const Wrench> reference, const AxisRanges & ranges = {},
  double active_fraction = 0.01, double quiet_fraction = 1e-3);

struct EvalOptions
{
  AxisRanges ranges{};
  double sigma_multiplier = kDefaultSigmaMultiplier;
  std::uint64_t max_skew_us = 1000;
  /// Longest unloaded stretch used for the noise window.
  double noise_window_s = 10.0;
  /// With strict set, a missing excitation run is an error instead of a gap.
  bool strict = false;
};

struct EvalReport
{
  std::size_t aligned = 0;
  std::size_t noise_window = 0;
  std::array<AxisError, kAxes> error{};
  std::array<double, kAxes> noise_std{};
  std::array<double, kAxes> resolution{};
  /// Empty when the noise window is perfectly quiet.
  std::array<std::optional<std::int64_t>, kAxes> quantization_levels{};
  /// Rows are absent when their axis was never excited on its own.
  std::array<std::optional<std::array<double, kAxes>>, kAxes> crosstalk{};
  double sigma_multiplier = kDefaultSigmaMultiplier;
};

EvalReport evaluate(
  std::span<const TimedWrench> decoded, std::span<const TimedWrench> reference,
  const EvalOptions & options = {});

nlohmann::json to_json(const EvalReport & r);

}  // namespace ftind::metrics

#endif  // FTIND__METRICS_HPP_
