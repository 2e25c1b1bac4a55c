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

#ifndef FTIND__TYPES_HPP_
#define FTIND__TYPES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ftind
{

inline constexpr std::size_t kAxes = 6;
inline constexpr std::size_t kChannels = 6;

/// LDC1614 output register width.
inline constexpr std::uint32_t kCountBits = 28;
inline constexpr std::uint32_t kMaxCount = (1u << kCountBits) - 1u;

/// Highest conversion rate of the converter, in Hz.
inline constexpr double kMaxSampleRateHz = 4080.0;

inline constexpr std::array<std::string_view, kAxes> kAxisNames = {
  "fx", "fy", "fz", "tx", "ty", "tz"};

/// Forces in N, torques in N·m. Indexable in axis order fx, fy, fz, tx, ty, tz.
struct Wrench
{
  std::array<double, kAxes> v{};

  double & operator[](std::size_t i) {return v[i];}
  double operator[](std::size_t i) const {return v[i];}

  double fx() const {return v[0];}
  double fy() const {return v[1];}
  double fz() const {return v[2];}
  double tx() const {return v[3];}
  double ty() const {return v[4];}
  double tz() const {return v[5];}

  bool operator==(const Wrench &) const = default;
};

using RawCounts = std::array<std::uint32_t, kChannels>;

/// Full-scale span per axis (twice the symmetric input range).
struct AxisRanges
{
  std::array<double, kAxes> span{1780.0, 1780.0, 2870.0, 54.0, 54.0, 90.0};

  double operator[](std::size_t i) const {return span[i];}
  /// Symmetric limit, i.e. half the span.
  double limit(std::size_t i) const {return 0.5 * span[i];}

  void validate() const;
};

/// One time-stamped pairing of applied wrench and raw converter output.
struct Sample
{
  std::uint64_t t_us = 0;
  Wrench wrench;
  RawCounts counts{};

  bool operator==(const Sample &) const = default;
};

using Dataset = std::vector<Sample>;

}  // namespace ftind

#endif  // FTIND__TYPES_HPP_
