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

#include "ftind/coil_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "ftind/error.hpp"
#include "ftind/types.hpp"

namespace ftind::coil
{

namespace
{

// Relative tolerance on "d_L <= D_out", so that presets written in mil do not
// trip over the last ulp.
constexpr double kDiameterSlack = 1e-12;

void require(bool ok, ErrorCode code, const std::string & msg)
{
  if (!ok) {
    throw Error(code, msg);
  }
}

double checked_inner_diameter(const CoilGeometry & g)
{
  g.validate();
  return inner_diameter(g);
}

}  // namespace

void CoilGeometry::validate() const
{
  require(outer_diameter > 0.0, ErrorCode::InvalidGeometry, "outer_diameter must be > 0");
  require(trace_width > 0.0, ErrorCode::InvalidGeometry, "trace_width must be > 0");
  require(trace_spacing > 0.0, ErrorCode::InvalidGeometry, "trace_spacing must be > 0");
  require(turns_per_layer >= 1, ErrorCode::InvalidGeometry, "turns_per_layer must be >= 1");
  require(layer_count >= 1, ErrorCode::InvalidGeometry, "layer_count must be >= 1");
  require(
    layer_gaps.size() == static_cast<std::size_t>(layer_count - 1),
    ErrorCode::InvalidGeometry, "layer_gaps must have layer_count - 1 entries");
  for (double gap : layer_gaps) {
    require(gap > 0.0, ErrorCode::InvalidGeometry, "layer gaps must be > 0");
  }
  const double d_in = inner_diameter(*this);
  require(
    d_in < outermost_trace_center_diameter, ErrorCode::InvalidGeometry,
    "outermost trace centre diameter must exceed the inner diameter");
  require(
    outermost_trace_center_diameter <= outer_diameter * (1.0 + kDiameterSlack),
    ErrorCode::InvalidGeometry,
    "outermost trace centre diameter must not exceed the outer diameter");
}

CoilGeometry vertical_coil()
{
  CoilGeometry g;
  g.outer_diameter = 10.0;
  g.turns_per_layer = 18;
  g.trace_width = mil(4.0);
  g.trace_spacing = mil(4.0);
  g.layer_count = 3;
  g.layer_gaps = {mil(59.0), mil(5.9)};
  g.outermost_trace_center_diameter = g.outer_diameter - g.trace_width;
  g.copper_weight = 1.0;
  return g;
}

CoilGeometry horizontal_coil()
{
  CoilGeometry g;
  g.outer_diameter = equivalent_diameter(4.7, 13.0);
  g.turns_per_layer = 10;
  g.trace_width = mil(4.0);
  g.trace_spacing = mil(4.0);
  g.layer_count = 4;
  // Only the 3-4 spacing is published; the outer pair mirrors it and the core
  // fills a 59 mil stack.
  g.layer_gaps = {mil(5.9), mil(47.2), mil(5.9)};
  g.outermost_trace_center_diameter = g.outer_diameter - g.trace_width;
  g.copper_weight = 1.0;
  return g;
}

double equivalent_diameter(double height, double width)
{
  require(height > 0.0 && width > 0.0, ErrorCode::InvalidGeometry, "rectangle sides must be > 0");
  return std::sqrt(height * width * 4.0 / kPi);
}

double inner_diameter(const CoilGeometry & g)
{
  const double n = g.turns_per_layer;
  const double d_in =
    g.outer_diameter - (2.0 * n + 1.0) * g.trace_spacing - (2.0 * n - 1.0) * g.trace_width;
  if (!(d_in > 0.0)) {
    throw Error(
      ErrorCode::NonPositiveInnerDiameter,
      "inner diameter " + std::to_string(d_in) + " mm is not positive");
  }
  return d_in;
}

double average_diameter(const CoilGeometry & g)
{
  const double d_in = checked_inner_diameter(g);
  const double d_out = g.outer_diameter;
  const double correction = 1.0 + 4.0 / kPi * (g.outermost_trace_center_diameter / d_out - 1.0);
  return correction * 0.5 * (d_in + d_out);
}

double fill_ratio(const CoilGeometry & g)
{
  const double d_in = checked_inner_diameter(g);
  return (g.outer_diameter - d_in) / (g.outer_diameter + d_in);
}

double layer_inductance(const CoilGeometry & g)
{
  if (g.turns_per_layer == 0) {
    return 0.0;
  }
  const double alpha = fill_ratio(g);
  const double d_avg_m = average_diameter(g) * 1e-3;
  const double n = g.turns_per_layer;
  return 0.5 * kMu0 * n * n * d_avg_m * (std::log(2.46 / alpha) + 0.2 * alpha * alpha);
}

double coupling_factor(double h)
{
  if (!(h >= 0.0)) {
    throw Error(ErrorCode::DomainError, "normalized layer distance must be >= 0");
  }
  return 1.0 / (((0.184 * h - 0.525) * h + 1.038) * h + 1.001);
}

double plate_coupling(double h, PlateCouplingLaw law)
{
  if (law == PlateCouplingLaw::FullCubic) {
    return coupling_factor(h);
  }
  if (!(h >= 0.0)) {
    throw Error(ErrorCode::DomainError, "normalized image distance must be >= 0");
  }
  return 1.0 / (1.001 + 1.038 * h);
}

std::vector<double> normalized_layer_distances(const CoilGeometry & g)
{
  const double d_avg = average_diameter(g);
  std::vector<double> h;
  h.reserve(g.layer_gaps.size());
  for (double gap : g.layer_gaps) {
    h.push_back(gap / d_avg);
  }
  return h;
}

double total_inductance(const CoilGeometry & g)
{
  double coupling_sum = 0.0;
  for (double h : normalized_layer_distances(g)) {
    coupling_sum += coupling_factor(h);
  }
  return (2.0 * coupling_sum + g.layer_count) * layer_inductance(g);
}

double resonant_frequency(double inductance, const ResonantCircuit & rc)
{
  if (!(inductance > 0.0)) {
    throw Error(ErrorCode::DomainError, "inductance must be > 0");
  }
  if (!(rc.total() > 0.0) || rc.parasitic_capacitance < 0.0) {
    throw Error(ErrorCode::DomainError, "total capacitance must be > 0");
  }
  return 1.0 / (2.0 * kPi * std::sqrt(inductance * rc.total()));
}

double inductance_with_target(const CoilGeometry & g, const TargetCoupling & t)
{
  if (!(t.gap > 0.0)) {
    throw Error(ErrorCode::DomainError, "target gap must be > 0");
  }
  if (!(t.coupling_scale >= 0.0 && t.coupling_scale <= 1.0)) {
    throw Error(ErrorCode::DomainError, "coupling_scale must lie in [0, 1]");
  }
  const double l_layer = layer_inductance(g);
  const double l_total = total_inductance(g);
  const double d_avg = average_diameter(g);

  double image_sum = 0.0;
  double depth = 0.0;
  for (int layer = 0; layer < g.layer_count; ++layer) {
    image_sum += plate_coupling((2.0 * t.gap + depth) / d_avg, t.law);
    if (layer + 1 < g.layer_count) {
      depth += g.layer_gaps[static_cast<std::size_t>(layer)];
    }
  }
  const double delta = l_layer * 2.0 * t.coupling_scale * image_sum;
  if (delta >= l_total) {
    throw Error(
      ErrorCode::ModelError, "target coupling removes the whole inductance; reduce coupling_scale");
  }
  return l_total - delta;
}

double ideal_counts(
  double inductance, double reference_inductance, const ResonantCircuit & rc,
  double full_scale_counts)
{
  // The converter reports a period-like quantity: counts scale as 1/f.
  const double f = resonant_frequency(inductance, rc);
  const double f_ref = resonant_frequency(reference_inductance, rc);
  return full_scale_counts * f_ref / f;
}

CountReading quantize_counts(double value)
{
  if (std::isnan(value)) {
    throw Error(ErrorCode::DomainError, "count value is NaN");
  }
  const double rounded = std::nearbyint(value);
  if (rounded < 0.0) {
    return {0u, true};
  }
  if (rounded > static_cast<double>(kMaxCount)) {
    return {kMaxCount, true};
  }
  return {static_cast<std::uint32_t>(rounded), false};
}

CountReading raw_counts(
  double inductance, double reference_inductance, const ResonantCircuit & rc,
  std::uint32_t full_scale_counts)
{
  return quantize_counts(
    ideal_counts(inductance, reference_inductance, rc, static_cast<double>(full_scale_counts)));
}

ResponseCurve response_curve(
  const CoilGeometry & g, double coupling_scale, PlateCouplingLaw law, double lo, double hi,
  std::size_t n)
{
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw Error(ErrorCode::DomainError, "response curve needs n >= 2 and 0 < lo < hi");
  }
  const double d_avg = average_diameter(g);
  const double l0 = total_inductance(g);
  ResponseCurve c;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = d_avg * (lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    c.distance.push_back(d);
    c.sqrt_ratio.push_back(std::sqrt(inductance_with_target(g, {d, coupling_scale, law}) / l0));
  }
  return c;
}

void to_json(nlohmann::json & j, const CoilGeometry & g)
{
  j = nlohmann::json{
    {"outer_diameter", g.outer_diameter},
    {"turns_per_layer", g.turns_per_layer},
    {"trace_width", g.trace_width},
    {"trace_spacing", g.trace_spacing},
    {"layer_count", g.layer_count},
    {"layer_gaps", g.layer_gaps},
    {"outermost_trace_center_diameter", g.outermost_trace_center_diameter},
    {"copper_weight", g.copper_weight},
  };
}

void from_json(const nlohmann::json & j, CoilGeometry & g)
{
  try {
    g.outer_diameter = j.at("outer_diameter").get<double>();
    g.turns_per_layer = j.at("turns_per_layer").get<int>();
    g.trace_width = j.at("trace_width").get<double>();
    g.trace_spacing = j.at("trace_spacing").get<double>();
    g.layer_count = j.at("layer_count").get<int>();
    g.layer_gaps = j.value("layer_gaps", std::vector<double>{});
    g.outermost_trace_center_diameter = j.contains("outermost_trace_center_diameter") ?
      j.at("outermost_trace_center_diameter").get<double>() :
      g.outer_diameter - g.trace_width;
    g.copper_weight = j.value("copper_weight", 1.0);
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::ConfigError, std::string("coil geometry: ") + e.what());
  }
}

CoilGeometry geometry_from_config(const nlohmann::json & j)
{
  CoilGeometry g;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "vertical_coil") {
      g = vertical_coil();
    } else if (name == "horizontal_coil") {
      g = horizontal_coil();
    } else {
      throw Error(ErrorCode::ConfigError, "unknown coil preset '" + name + "'");
    }
  } else if (j.is_object()) {
    g = j.get<CoilGeometry>();
  } else {
    throw Error(ErrorCode::ConfigError, "coil geometry must be a preset name or an object");
  }
  try {
    g.validate();
  } catch (const Error & e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return g;
}

CoilGeometry load_geometry(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return geometry_from_config(j);
}

}  // namespace ftind::coil
