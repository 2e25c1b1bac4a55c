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

#ifndef FTIND__SYNTH_HPP_
#define FTIND__SYNTH_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ftind/coil_model.hpp"
#include "ftind/types.hpp"

namespace ftind::synth
{

using Matrix6d = Eigen::Matrix<double, 6, 6>;

enum class CoilKind {Vertical, Horizontal};

struct CoilSite
{
  Eigen::Vector3d position = Eigen::Vector3d::Zero();      // mm, sensor frame
  Eigen::Vector3d sensing_axis = Eigen::Vector3d::UnitZ();  // unit, coil -> plate
  double nominal_gap = 1.0;                                  // mm
  CoilKind kind = CoilKind::Vertical;
};

/// Rigid metal plate on a linear elastomer. `compliance` maps a wrench
/// (N, N·m) to a small twist (dx, dy, dz in m; rx, ry, rz in rad).
struct PlateKinematics
{
  Matrix6d compliance = Matrix6d::Zero();
  std::array<CoilSite, kChannels> sites{};

  void validate() const;
};

/// Gaussian count noise plus a linear drift.
struct NoiseModel
{
  double count_sigma = 0.0;        // counts
  double drift_per_second = 0.0;   // counts / s
};

/// Electrical side of the twin: one geometry per coil kind.
struct SensorModel
{
  coil::CoilGeometry vertical = coil::vertical_coil();
  coil::CoilGeometry horizontal = coil::horizontal_coil();
  double vertical_coupling_scale = 0.3;
  double horizontal_coupling_scale = 0.3;
  coil::PlateCouplingLaw law = coil::PlateCouplingLaw::FirstOrder;
  coil::ResonantCircuit circuit{};
  std::uint32_t full_scale_counts = 1u << 27;

  const coil::CoilGeometry & geometry(CoilKind kind) const
  {
    return kind == CoilKind::Vertical ? vertical : horizontal;
  }
  double coupling_scale(CoilKind kind) const
  {
    return kind == CoilKind::Vertical ? vertical_coupling_scale : horizontal_coupling_scale;
  }

  /// Unquantised counts of one channel at the given gap.
  double channel_counts(CoilKind kind, double gap_mm) const;
};

struct SynthConfig
{
  SensorModel sensor{};
  PlateKinematics plate{};
  NoiseModel noise{};
};

/// Three vertical sites at 120 degrees sensing z, three horizontal sites
/// interleaved with them sensing the tangential direction. Diagonal compliance
/// sized so that a full-range load on any axis moves the plate by 10% of the
/// nominal gap (rotations measured at the site radius).
PlateKinematics default_plate_kinematics(
  const AxisRanges & ranges = {}, double nominal_gap_mm = 1.0, double site_radius_mm = 20.0);

SynthConfig default_config(const AxisRanges & ranges = {});

/// Adds a symmetric off-diagonal compliance term so that loading axis `from`
/// produces a spurious response on axis `to` equal to `ratio` (fraction of
/// full scale per fraction of full scale), as seen by a decoder calibrated on
/// the unmodified plate.
void inject_coupling(
  PlateKinematics & pk, std::size_t from, std::size_t to, double ratio,
  const AxisRanges & ranges = {});

/// Small-angle twist of the plate, then projected on each sensing axis.
std::array<double, kChannels> gaps_from_wrench(const Wrench & w, const PlateKinematics & pk);

/// Noise-free unquantised counts for a wrench.
std::array<double, kChannels> ideal_counts(const Wrench & w, const SynthConfig & cfg);

/// mt19937_64 feeding a Box-Muller transform. Output depends only on the
/// seed, never on the standard library's distribution implementation.
class GaussianSource
{
public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double standard_normal();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct Keyframe
{
  double t = 0.0;   // s
  Wrench wrench;
};

/// Piecewise-linear wrench trajectory.
class Schedule
{
public:
  Schedule() = default;
  explicit Schedule(std::vector<Keyframe> keyframes);

  const std::vector<Keyframe> & keyframes() const {return keyframes_;}
  double duration() const;
  Wrench at(double t) const;
  /// True when every keyframe lies inside the symmetric ranges.
  bool within(const AxisRanges & ranges) const;

private:
  std::vector<Keyframe> keyframes_;
};

/// CSV with header t_s,fx,fy,fz,tx,ty,tz.
Schedule load_schedule(const std::filesystem::path & path);
void save_schedule(const Schedule & s, const std::filesystem::path & path);

/// 10 s unloaded, one triangular sweep per axis to +/- full range, then a
/// sequence of combined loads at up to 60% of range.
Schedule demo_schedule(const AxisRanges & ranges = {});

/// Samples the schedule at `rate_hz` from t = 0 to its end.
Dataset generate_dataset(
  const Schedule & schedule, const SynthConfig & cfg, double rate_hz, std::uint64_t seed);

}  // namespace ftind::synth

#endif  // FTIND__SYNTH_HPP_
