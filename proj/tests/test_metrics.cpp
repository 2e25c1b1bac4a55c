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
#include "ftind/error.hpp"
#include "ftind/metrics.hpp"
#include "ftind/synth.hpp"

using namespace ftind;
using namespace ftind::metrics;

namespace
{

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

std::vector<Wrench> gaussian_series(std::size_t n, const std::array<double, kAxes> & sigma, std::uint64_t seed)
{
  synth::GaussianSource rng(seed);
  std::vector<Wrench> out(n);
  for (auto & w : out) {
    for (std::size_t k = 0; k < kAxes; ++k) {w[k] = sigma[k] * rng.standard_normal();}
  }
  return out;
}

}  // namespace

TEST_CASE("full-scale error")
{
  std::vector<Wrench> ref(50), test(50);
  for (std::size_t t = 0; t < ref.size(); ++t) {
    for (std::size_t k = 0; k < kAxes; ++k) {ref[t][k] = std::sin(0.1 * t + k);}
  }
  for (const auto & e : full_scale_error(ref, ref)) {
    CHECK(e.mean_pct == 0.0);
    CHECK(e.std_pct == 0.0);
    CHECK(e.max_pct == 0.0);
    CHECK(e.rmse == 0.0);
  }
  test = ref;
  for (auto & w : test) {w[0] += 1.78;}
  const auto e = full_scale_error(test, ref);
  CHECK(e[0].mean_pct == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(e[0].max_pct == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(e[0].std_pct) < 1e-12);
  CHECK(e[0].rmse == doctest::Approx(1.78).epsilon(1e-12));
  CHECK(e[1].max_pct == 0.0);

  CHECK(code_of([&] {full_scale_error(std::span(test).first(10), ref);}) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] {full_scale_error({}, {});}) == ErrorCode::DegenerateData);
}

TEST_CASE("full-scale error: max >= mean >= 0 on random series")
{
  const auto a = gaussian_series(300, {1, 2, 3, 0.1, 0.2, 0.3}, 11);
  const auto b = gaussian_series(300, {1, 2, 3, 0.1, 0.2, 0.3}, 12);
  for (const auto & e : full_scale_error(a, b)) {
    CHECK(e.max_pct >= e.mean_pct);
    CHECK(e.mean_pct >= 0.0);
    CHECK(e.std_pct >= 0.0);
  }
}

TEST_CASE("resolution from noise")
{
  const std::vector<Wrench> flat(100, Wrench{{1, 2, 3, 4, 5, 6}});
  for (double r : resolution_from_noise(flat)) {CHECK(r == 0.0);}
  CHECK(code_of([&] {axis_std(std::span(flat).first(1));}) == ErrorCode::DegenerateWindow);
  CHECK(code_of([&] {resolution_from_noise(flat, 0.0);}) == ErrorCode::DomainError);

  // Sample (n - 1) standard deviation of {0, 1, 2, 3}.
  std::vector<Wrench> four(4);
  for (std::size_t t = 0; t < 4; ++t) {four[t][0] = static_cast<double>(t);}
  CHECK(axis_std(four)[0] == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));

  const std::array<double, kAxes> sigma{0.0120, 0.0120, 0.05, 0.0006, 0.0006, 0.0007};
  const auto noise = gaussian_series(10000, sigma, 3);
  const auto sd = axis_std(noise);
  for (std::size_t k = 0; k < kAxes; ++k) {CHECK(std::abs(sd[k] / sigma[k] - 1.0) < 0.05);}

  // Linear in k and in sigma.
  const auto r1 = resolution_from_noise(noise, 1.0), r3 = resolution_from_noise(noise, 3.0);
  auto doubled = noise;
  for (auto & w : doubled) {for (auto & v : w.v) {v *= 2.0;}}
  const auto r2s = resolution_from_noise(doubled, 1.0);
  for (std::size_t k = 0; k < kAxes; ++k) {
    CHECK(r3[k] == doctest::Approx(3.0 * r1[k]).epsilon(1e-12));
    CHECK(r2s[k] == doctest::Approx(2.0 * r1[k]).epsilon(1e-12));
  }
}

TEST_CASE("sigma multiplier reproduces the quoted force resolution")
{
  const double k = sigma_multiplier_for(0.0347, 0.0120);
  CHECK(k == doctest::Approx(2.8917).epsilon(1e-4));
  CHECK(k * 0.0120 == doctest::Approx(0.0347).epsilon(1e-12));
}

TEST_CASE("quantization levels")
{
  CHECK(quantization_levels(1780.0, 0.0347) == 51296);
  CHECK(std::abs(51296.0 / 51312.0 - 1.0) < 1e-3);
  CHECK(quantization_levels(90.0, 0.00163) == 55214);
  CHECK(std::abs(55214.0 / 55351.0 - 1.0) < 3e-3);
  CHECK(quantization_levels(7.5, 7.5) == 1);
  CHECK(quantization_levels(1.0, 10.0) == 1);
  CHECK(code_of([] {quantization_levels(1.0, 0.0);}) == ErrorCode::DomainError);
  CHECK(code_of([] {quantization_levels(0.0, 1.0);}) == ErrorCode::DomainError);
  std::int64_t prev = quantization_levels(100.0, 1e-3);
  for (double r = 1.1e-3; r < 10.0; r *= 1.1) {
    const auto q = quantization_levels(100.0, r);
    CHECK(q <= prev);
    prev = q;
  }
}

TEST_CASE("crosstalk matrix")
{
  const AxisRanges ranges;
  std::array<std::vector<Wrench>, kAxes> runs;
  for (std::size_t i = 0; i < kAxes; ++i) {
    for (int t = 0; t < 40; ++t) {
      Wrench w;
      w[i] = 0.3 * ranges[i] * std::sin(0.1 * t);
      runs[i].push_back(w);
    }
  }
  auto m = crosstalk_matrix(runs, Wrench{});
  for (std::size_t i = 0; i < kAxes; ++i) {
    for (std::size_t j = 0; j < kAxes; ++j) {CHECK(m[i][j] == (i == j ? 100.0 : 0.0));}
  }

  // Known coupling: 0.5% of Fy's span while Fx is excited.
  for (auto & w : runs[0]) {w[1] = 0.005 * ranges[1] * (w[0] / (0.3 * ranges[0]));}
  m = crosstalk_matrix(runs, Wrench{});
  CHECK(m[0][1] == doctest::Approx(0.5 / 0.3).epsilon(1e-12));
  CHECK(m[0][0] == 100.0);

  // Baseline subtraction.
  Wrench base{{5, -3, 2, 0.1, 0.2, -0.3}};
  auto shifted = runs;
  for (auto & run : shifted) {for (auto & w : run) {for (std::size_t k = 0; k < kAxes; ++k) {w[k] += base[k];}}}
  const auto ms = crosstalk_matrix(shifted, base);
  for (std::size_t i = 0; i < kAxes; ++i) {
    for (std::size_t j = 0; j < kAxes; ++j) {CHECK(ms[i][j] == doctest::Approx(m[i][j]).epsilon(1e-9).scale(1e-9));}
  }

  // Time shift of every run leaves the matrix unchanged.
  auto rotated = runs;
  for (auto & run : rotated) {std::rotate(run.begin(), run.begin() + 7, run.end());}
  const auto mr = crosstalk_matrix(rotated, Wrench{});
  CHECK(mr == m);

  auto missing = runs;
  missing[4].clear();
  CHECK(code_of([&] {crosstalk_matrix(missing, Wrench{});}) == ErrorCode::MissingRun);
  auto dead = runs;
  for (auto & w : dead[2]) {w[2] = 0.0;}
  CHECK(code_of([&] {crosstalk_matrix(dead, Wrench{});}) == ErrorCode::DegenerateRun);
}

TEST_CASE("timestamp alignment")
{
  std::vector<TimedWrench> ref, dec;
  for (std::uint64_t t = 0; t < 10; ++t) {ref.push_back({t * 1000, {}});}
  dec.push_back({0, {}});
  dec.push_back({1400, {}});   // nearest 1000
  dec.push_back({1600, {}});   // nearest 2000
  dec.push_back({20000, {}});  // beyond the skew bound
  const auto pairs = align_by_timestamp(dec, ref);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(pairs[1] == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(pairs[2] == std::pair<std::size_t, std::size_t>{2, 2});
  CHECK(align_by_timestamp(dec, ref, 300).size() == 1);
}

TEST_CASE("segmentation and evaluation of a demo trace")
{
  const AxisRanges ranges;
  const auto sched = synth::demo_schedule(ranges);
  std::vector<TimedWrench> ref;
  for (std::uint64_t t = 0; t <= static_cast<std::uint64_t>(sched.duration() * 1000.0); t += 1) {
    ref.push_back({t * 1000, sched.at(static_cast<double>(t) / 1000.0)});
  }
  std::vector<Wrench> rw;
  for (const auto & r : ref) {rw.push_back(r.wrench);}
  const auto seg = segment(rw, ranges);
  for (std::size_t i = 0; i < kAxes; ++i) {CHECK_FALSE(seg.runs[i].empty());}
  CHECK(seg.unloaded.size() >= 1000);

  auto dec = ref;
  synth::GaussianSource rng(21);
  for (auto & d : dec) {for (std::size_t k = 0; k < kAxes; ++k) {d.wrench[k] += 1e-3 * ranges[k] * rng.standard_normal();}}
  const auto rep = evaluate(dec, ref);
  CHECK(rep.aligned == ref.size());
  CHECK(rep.noise_window > 0);
  for (std::size_t k = 0; k < kAxes; ++k) {
    CHECK(rep.resolution[k] == doctest::Approx(3.0 * rep.noise_std[k]).epsilon(1e-12));
    REQUIRE(rep.quantization_levels[k].has_value());
    CHECK(*rep.quantization_levels[k] >= 1);
    REQUIRE(rep.crosstalk[k].has_value());
    CHECK((*rep.crosstalk[k])[k] == 100.0);
    CHECK(rep.error[k].max_pct >= rep.error[k].mean_pct);
  }
  const auto j = to_json(rep);
  CHECK(j.at("axes").at("fx").contains("quantization_levels"));
  CHECK(j.at("crosstalk_pct").at("tz").size() == kAxes);

  CHECK(code_of([&] {evaluate(std::span<const TimedWrench>{}, ref);}) == ErrorCode::DegenerateData);
}
