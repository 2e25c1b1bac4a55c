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

#ifndef FTIND__COIL_MODEL_HPP_
#define FTIND__COIL_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace ftind::coil
{

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 4.0e-7 * kPi;      // H/m
inline constexpr double kMilToMm = 0.0254;

/// Planar spiral coil on a multilayer PCB. All lengths in millimetres; the
/// conversion to SI happens inside layer_inductance() only.
struct CoilGeometry
{
  double outer_diameter = 0.0;
  int turns_per_layer = 0;
  double trace_width = 0.0;
  double trace_spacing = 0.0;
  int layer_count = 1;
  /// Gap between consecutive layers, starting at the layer nearest the target.
  std::vector<double> layer_gaps;
  /// Diameter through the centre of the outermost trace.
  double outermost_trace_center_diameter = 0.0;
  /// Metadata only.
  double copper_weight = 1.0;

  /// Throws InvalidGeometry / NonPositiveInnerDiameter.
  void validate() const;

  bool operator==(const CoilGeometry &) const = default;
};

struct ResonantCircuit
{
  double capacitance = 100e-12;           // F
  double parasitic_capacitance = 4e-12;   // F

  double total() const {return capacitance + parasitic_capacitance;}
};

/// How the conductive plate's mirror image couples into each layer.
enum class PlateCouplingLaw
{
  /// k(h) = 1 / (1.001 + 1.038 h): constant and linear terms of the interlayer law.
  FirstOrder,
  /// The full cubic interlayer law evaluated at the image distance.
  FullCubic,
};

struct TargetCoupling
{
  double gap = 1.0;              // mm
  double coupling_scale = 0.3;   // beta
  PlateCouplingLaw law = PlateCouplingLaw::FirstOrder;
};

/// Converter reading after quantisation to the 28-bit register.
struct CountReading
{
  std::uint32_t counts = 0;
  bool saturated = false;
};

inline constexpr double mil(double v) {return v * kMilToMm;}

CoilGeometry vertical_coil();
CoilGeometry horizontal_coil();

/// Diameter of the circle with the same area as a height x width rectangle.
double equivalent_diameter(double height, double width);

double inner_diameter(const CoilGeometry & g);
double average_diameter(const CoilGeometry & g);
double fill_ratio(const CoilGeometry & g);

/// Single-layer self inductance in henry (modified Wheeler form).
double layer_inductance(const CoilGeometry & g);

/// Interlayer coupling as a function of the normalised layer distance h >= 0.
double coupling_factor(double h);

/// Plate image coupling under the selected law; h >= 0.
double plate_coupling(double h, PlateCouplingLaw law);

/// Distance between layers divided by the average diameter.
std::vector<double> normalized_layer_distances(const CoilGeometry & g);

/// Inductance with no metallic target nearby, in henry.
double total_inductance(const CoilGeometry & g);

double resonant_frequency(double inductance, const ResonantCircuit & rc);

/// Inductance with the conductive plate at t.gap (mirror-image model).
double inductance_with_target(const CoilGeometry & g, const TargetCoupling & t);

/// Unquantised converter output: scales as sqrt(L), with `reference_inductance`
/// mapping exactly to `full_scale_counts`.
double ideal_counts(
  double inductance, double reference_inductance, const ResonantCircuit & rc,
  double full_scale_counts);

CountReading quantize_counts(double value);

CountReading raw_counts(
  double inductance, double reference_inductance, const ResonantCircuit & rc,
  std::uint32_t full_scale_counts = 1u << 27);

/// Sampled response of one coil: x = sqrt(L(d) / L_total), y = d in mm.
struct ResponseCurve
{
  std::vector<double> sqrt_ratio;
  std::vector<double> distance;
};

/// `n` gaps evenly spaced over [lo, hi] times the average diameter.
ResponseCurve response_curve(
  const CoilGeometry & g, double coupling_scale, PlateCouplingLaw law,
  double lo = 0.05, double hi = 3.0, std::size_t n = 200);

void to_json(nlohmann::json & j, const CoilGeometry & g);
void from_json(const nlohmann::json & j, CoilGeometry & g);

/// Accepts either a preset name ("vertical_coil", "horizontal_coil") or an
/// object with CoilGeometry field names.
CoilGeometry geometry_from_config(const nlohmann::json & j);
CoilGeometry load_geometry(const std::filesystem::path & path);

}  // namespace ftind::coil

#endif  // FTIND__COIL_MODEL_HPP_
