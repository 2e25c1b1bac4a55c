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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "ftind/coil_model.hpp"
#include "ftind/types.hpp"
#include "ftind/error.hpp"

using namespace ftind;
using namespace ftind::coil;

namespace
{

// Frozen from tests/oracles/coil_oracle.py (40-digit evaluation).
constexpr double kVerticalDin = 2.6848;
constexpr double kVerticalDavg = 6.2603539919965525;
constexpr double kVerticalAlpha = 0.57669021190716448;
constexpr double kVerticalLayerL = 1.9335051850626198e-6;
constexpr double kVerticalTotalL = 1.2735898551414506e-5;
constexpr double kVerticalCubicL01 = 1.0078196821112821e-5;
constexpr double kVerticalCubicL05 = 1.0790569405334487e-5;
constexpr double kVerticalCubicL10 = 1.1426546220908884e-5;
constexpr double kVerticalCubicGap1 = 1.0240224568340016e-5;
constexpr double kVerticalLinearL01 = 1.0197003183932933e-5;
constexpr double kVerticalLinearL05 = 1.1158082885121592e-5;
constexpr double kVerticalLinearL10 = 1.1663755195795365e-5;
constexpr double kVerticalLinearGap1 = 1.0409226184479707e-5;
constexpr double kVerticalCountsGap1 = 121340089.28858654;
constexpr double kHorizontalDout = 8.820143773392724;
constexpr double kHorizontalDin = 4.756143773392724;
constexpr double kHorizontalDavg = 6.6885850786294556;
constexpr double kHorizontalAlpha = 0.29934545699588261;
constexpr double kHorizontalLayerL = 8.9272497260345442e-7;
constexpr double kHorizontalTotalL = 8.5825246799470307e-6;
constexpr double kK1 = 0.5889281507656066;
constexpr double kF10uH = 4935185.2812409535;

bool rel_close(double a, double b, double tol) {return std::abs(a - b) <= tol * std::abs(b);}

ErrorCode code_of(auto && fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  FAIL("expected an ftind::Error");
  return ErrorCode::IoError;
}

CoilGeometry simple(double d_out, int n, double s, double w)
{
  CoilGeometry g;
  g.outer_diameter = d_out;
  g.turns_per_layer = n;
  g.trace_spacing = s;
  g.trace_width = w;
  g.layer_count = 1;
  g.outermost_trace_center_diameter = d_out - w;
  return g;
}

}  // namespace

TEST_CASE("inner diameter")
{
  CHECK(inner_diameter(vertical_coil()) == doctest::Approx(kVerticalDin).epsilon(1e-14));
  CHECK(inner_diameter(simple(10.0, 0, 1.0, 1.0)) == doctest::Approx(10.0));
  CHECK(code_of([] {inner_diameter(simple(5.0, 10, 0.2, 0.2));}) ==
    ErrorCode::NonPositiveInnerDiameter);
}

TEST_CASE("inner diameter is affine in the turn count")
{
  const double s = 0.05, w = 0.07;
  for (int n = 1; n < 30; ++n) {
    const double step =
      inner_diameter(simple(20.0, n + 1, s, w)) - inner_diameter(simple(20.0, n, s, w));
    CHECK(step == doctest::Approx(-2.0 * (s + w)).epsilon(1e-12));
  }
}

TEST_CASE("average diameter and fill ratio")
{
  const auto v = vertical_coil();
  CHECK(rel_close(average_diameter(v), kVerticalDavg, 1e-14));
  CHECK(average_diameter(v) == doctest::Approx(6.2604).epsilon(1e-5));
  CHECK(rel_close(fill_ratio(v), kVerticalAlpha, 1e-14));

  auto g = simple(10.0, 5, 0.2, 0.2);
  g.outermost_trace_center_diameter = g.outer_diameter;
  CHECK(average_diameter(g) == doctest::Approx(0.5 * (inner_diameter(g) + 10.0)));
  g.outermost_trace_center_diameter = 10.001;
  CHECK(code_of([&] {average_diameter(g);}) == ErrorCode::InvalidGeometry);

  // Thin winding: alpha small; winding filling the centre: alpha near 1.
  CHECK(fill_ratio(simple(10.0, 1, 0.001, 0.001)) < 1e-3);
  CHECK(fill_ratio(simple(10.0, 24, 0.1, 0.1)) > 0.9);
}

TEST_CASE("geometry invariants are enforced")
{
  auto g = vertical_coil();
  g.layer_gaps.pop_back();
  CHECK(code_of([&] {g.validate();}) == ErrorCode::InvalidGeometry);
  g = vertical_coil();
  g.layer_gaps[0] = 0.0;
  CHECK(code_of([&] {g.validate();}) == ErrorCode::InvalidGeometry);
  g = vertical_coil();
  g.trace_width = -1.0;
  CHECK_THROWS_AS(g.validate(), Error);
  CHECK_NOTHROW(horizontal_coil().validate());
}

TEST_CASE("layer inductance")
{
  CHECK(rel_close(layer_inductance(vertical_coil()), kVerticalLayerL, 1e-13));
  auto g = vertical_coil();
  g.turns_per_layer = 0;
  CHECK(layer_inductance(g) == 0.0);

  // N^2 scaling at fixed D_avg and alpha: layer_inductance / N^2 is a pure
  // function of those two, so compare through the closed form.
  const auto v = vertical_coil();
  const double shape = layer_inductance(v) / (18.0 * 18.0);
  const double expected = 0.5 * kMu0 * average_diameter(v) * 1e-3 *
    (std::log(2.46 / fill_ratio(v)) + 0.2 * std::pow(fill_ratio(v), 2));
  CHECK(rel_close(shape, expected, 1e-14));
  CHECK(rel_close(4.0 * shape * 18.0 * 18.0, shape * 36.0 * 36.0, 1e-14));
}

TEST_CASE("coupling factor")
{
  CHECK(std::abs(coupling_factor(0.0) - 1.0 / 1.001) <= 1e-15);
  CHECK(rel_close(coupling_factor(1.0), kK1, 1e-15));
  CHECK(code_of([] {coupling_factor(-1e-9);}) == ErrorCode::DomainError);
  double prev = coupling_factor(0.0);
  for (int k = 1; k <= 3000; ++k) {
    const double v = coupling_factor(k * 1e-3);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("total inductance")
{
  CHECK(rel_close(total_inductance(vertical_coil()), kVerticalTotalL, 1e-13));

  auto one = vertical_coil();
  one.layer_count = 1;
  one.layer_gaps.clear();
  CHECK(total_inductance(one) == layer_inductance(one));

  auto far = vertical_coil();
  far.layer_count = 2;
  far.layer_gaps = {1e6};
  CHECK(total_inductance(far) == doctest::Approx(2.0 * layer_inductance(far)).epsilon(1e-5));

  const auto h = horizontal_coil();
  CHECK(rel_close(h.outer_diameter, kHorizontalDout, 1e-14));
  CHECK(rel_close(inner_diameter(h), kHorizontalDin, 1e-14));
  CHECK(rel_close(average_diameter(h), kHorizontalDavg, 1e-14));
  CHECK(rel_close(fill_ratio(h), kHorizontalAlpha, 1e-14));
  CHECK(rel_close(layer_inductance(h), kHorizontalLayerL, 1e-13));
  CHECK(rel_close(total_inductance(h), kHorizontalTotalL, 1e-13));
}

TEST_CASE("resonant frequency")
{
  const ResonantCircuit unit{1.0, 0.0};
  CHECK(std::abs(resonant_frequency(1.0 / (4.0 * kPi * kPi), unit) - 1.0) <= 1e-12);
  CHECK(rel_close(resonant_frequency(10e-6, {}), kF10uH, 1e-14));
  CHECK(rel_close(resonant_frequency(4e-5, {}), 0.5 * resonant_frequency(1e-5, {}), 1e-14));
  for (double l : {1e-9, 3.3e-6, 0.7}) {
    const ResonantCircuit rc{220e-12, 4e-12};
    CHECK(std::abs(resonant_frequency(l, rc) * 2.0 * kPi * std::sqrt(l * rc.total()) - 1.0) <= 1e-12);
  }
  CHECK(code_of([] {resonant_frequency(0.0, {});}) == ErrorCode::DomainError);
  CHECK(code_of([] {resonant_frequency(1e-6, {0.0, 0.0});}) == ErrorCode::DomainError);
}

TEST_CASE("inductance with target, both coupling laws")
{
  const auto v = vertical_coil();
  const double d = kVerticalDavg;
  const auto cubic = PlateCouplingLaw::FullCubic;
  CHECK(rel_close(inductance_with_target(v, {0.1 * d, 0.3, cubic}), kVerticalCubicL01, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {0.5 * d, 0.3, cubic}), kVerticalCubicL05, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {1.0 * d, 0.3, cubic}), kVerticalCubicL10, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {1.0, 0.3, cubic}), kVerticalCubicGap1, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {0.1 * d, 0.3}), kVerticalLinearL01, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {0.5 * d, 0.3}), kVerticalLinearL05, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {1.0 * d, 0.3}), kVerticalLinearL10, 1e-12));
  CHECK(rel_close(inductance_with_target(v, {1.0, 0.3}), kVerticalLinearGap1, 1e-12));

  CHECK(inductance_with_target(v, {1.0, 0.0}) == total_inductance(v));
  CHECK(inductance_with_target(v, {1e9, 0.3}) ==
    doctest::Approx(total_inductance(v)).epsilon(1e-8));
  CHECK(code_of([&] {inductance_with_target(v, {0.0, 0.3});}) == ErrorCode::DomainError);
  CHECK(code_of([&] {inductance_with_target(v, {1.0, 1.5});}) == ErrorCode::DomainError);

  // A single-layer coil with full coupling at contact loses more than it has.
  auto one = vertical_coil();
  one.layer_count = 1;
  one.layer_gaps.clear();
  CHECK(code_of([&] {inductance_with_target(one, {1e-6, 1.0});}) == ErrorCode::ModelError);
}

TEST_CASE("inductance with target is increasing and bounded for every preset and law")
{
  for (const auto & g : {vertical_coil(), horizontal_coil()}) {
    for (const auto law : {PlateCouplingLaw::FirstOrder, PlateCouplingLaw::FullCubic}) {
      const double l_total = total_inductance(g);
      double prev = 0.0;
      for (int k = 1; k <= 1000; ++k) {
        const double l = inductance_with_target(g, {0.01 * k, 0.3, law});
        CHECK(l > prev);
        CHECK(l < l_total);
        prev = l;
      }
    }
  }
}

TEST_CASE("raw counts")
{
  const auto v = vertical_coil();
  const double l0 = total_inductance(v);
  const auto anchor = raw_counts(l0, l0, {});
  CHECK(anchor.counts == (1u << 27));
  CHECK_FALSE(anchor.saturated);

  const auto quarter = raw_counts(0.25 * l0, l0, {});
  CHECK(std::abs(static_cast<double>(quarter.counts) - (1u << 26)) <= 1.0);

  CHECK(ideal_counts(inductance_with_target(v, {1.0, 0.3}), l0, {}, 1u << 27) ==
    doctest::Approx(kVerticalCountsGap1).epsilon(1e-13));

  const auto hi = raw_counts(4.5 * l0, l0, {});
  CHECK(hi.saturated);
  CHECK(hi.counts == ftind::kMaxCount);

  std::uint32_t prev = 0;
  for (int k = 1; k <= 400; ++k) {
    const auto r = raw_counts(l0 * k / 100.0, l0, {});
    CHECK(r.counts >= prev);
    prev = r.counts;
  }
}

TEST_CASE("response curve spans the requested range")
{
  const auto c = response_curve(vertical_coil(), 0.3, PlateCouplingLaw::FirstOrder, 0.05, 3.0, 50);
  REQUIRE(c.distance.size() == 50);
  CHECK(c.distance.front() == doctest::Approx(0.05 * kVerticalDavg));
  CHECK(c.distance.back() == doctest::Approx(3.0 * kVerticalDavg));
  for (std::size_t k = 1; k < c.sqrt_ratio.size(); ++k) {
    CHECK(c.sqrt_ratio[k] > c.sqrt_ratio[k - 1]);
    CHECK(c.sqrt_ratio[k] < 1.0);
  }
}

TEST_CASE("geometry configuration")
{
  const auto j = nlohmann::json(vertical_coil());
  CHECK(geometry_from_config(j) == vertical_coil());
  CHECK(geometry_from_config(nlohmann::json("horizontal_coil")) == horizontal_coil());
  CHECK(code_of([] {geometry_from_config(nlohmann::json("round_coil"));}) ==
    ErrorCode::ConfigError);
  auto bad = j;
  bad["turns_per_layer"] = 40;
  CHECK(code_of([&] {geometry_from_config(bad);}) == ErrorCode::ConfigError);
}
