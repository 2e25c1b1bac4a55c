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

#ifndef FTIND_TESTS__TRUTH_CALIBRATION_HPP_
#define FTIND_TESTS__TRUTH_CALIBRATION_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "ftind/calibration.hpp"
#include "ftind/synth.hpp"

namespace ftind::testing
{

/// A known calibration with monotone, pole-free channel maps spanning a
/// 3e7-count window of the 28-bit range.
inline cal::Calibration truth_calibration(const AxisRanges & ranges = {})
{
  cal::Calibration c;
  const double offsets[kChannels] = {1.00e8, 1.05e8, 0.95e8, 1.10e8, 1.02e8, 0.98e8};
  for (std::size_t i = 0; i < kChannels; ++i) {
    const double k = static_cast<double>(i);
    c.channel_maps[i] = fit::FitModel(
      fit::Family::Rational22,
      {0.10 + 0.03 * k, 1.0 - 0.05 * k, -0.45 + 0.02 * k, 0.12 + 0.02 * k, 0.05 - 0.03 * k});
    c.raw_scale[i] = {offsets[i], 3.0e7};
    c.raw_min[i] = offsets[i];
    c.raw_max[i] = offsets[i] + 3.0e7;
  }
  for (std::size_t a = 0; a < kAxes; ++a) {
    for (std::size_t i = 0; i < kChannels; ++i) {
      const double cross = 0.04 * std::sin(1.0 + 3.0 * static_cast<double>(a) + static_cast<double>(i));
      c.matrix_a(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) =
        ranges[a] * (a == i ? 1.6 : cross);
    }
  }
  // Bias puts the zero wrench at the middle of every channel window.
  std::array<double, kChannels> y_mid{};
  for (std::size_t i = 0; i < kChannels; ++i) {y_mid[i] = fit::evaluate(c.channel_maps[i], 0.5);}
  for (std::size_t a = 0; a < kAxes; ++a) {
    double b = 0.0;
    for (std::size_t i = 0; i < kChannels; ++i) {
      b -= c.matrix_a(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) * y_mid[i];
    }
    c.matrix_a(static_cast<Eigen::Index>(a), 6) = b;
  }
  return c;
}

struct TruthData
{
  Dataset data;
  /// Raw counts before noise, decoded by the truth calibration.
  std::vector<Wrench> clean_wrench;
};

/// `zero_samples` unloaded readings followed by `loaded` readings drawn
/// uniformly over every channel window. Reference wrenches are the truth
/// decode of the noise-free integer counts; `count_sigma` noise is added to
/// the reported counts only.
inline TruthData truth_dataset(
  const cal::Calibration & truth, std::size_t zero_samples, std::size_t loaded,
  double count_sigma, std::uint64_t seed)
{
  synth::GaussianSource rng(seed);
  TruthData out;
  const auto zero_raw = cal::raw_for_wrench(truth, Wrench{});
  RawCounts zero{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    zero[i] = static_cast<std::uint32_t>(std::nearbyint(zero_raw[i]));
  }
  for (std::size_t k = 0; k < zero_samples + loaded; ++k) {
    RawCounts clean = zero;
    if (k >= zero_samples) {
      for (std::size_t i = 0; i < kChannels; ++i) {
        clean[i] = static_cast<std::uint32_t>(
          std::nearbyint(truth.raw_min[i] + rng.uniform() * (truth.raw_max[i] - truth.raw_min[i])));
      }
    }
    Sample s;
    s.t_us = 1000 * k;
    s.wrench = cal::decode(truth, clean).wrench;
    for (std::size_t i = 0; i < kChannels; ++i) {
      const double noisy = clean[i] + (count_sigma > 0.0 ? count_sigma * rng.standard_normal() : 0.0);
      s.counts[i] = static_cast<std::uint32_t>(std::nearbyint(noisy));
    }
    out.data.push_back(s);
    out.clean_wrench.push_back(s.wrench);
  }
  return out;
}

/// Count noise that gives the requested standard deviation on one decoded
/// axis, from the local gradient of the truth decode at zero load.
inline double count_sigma_for(const cal::Calibration & truth, std::size_t axis, double target_std)
{
  const auto x0 = cal::raw_for_wrench(truth, Wrench{});
  double g2 = 0.0;
  for (std::size_t i = 0; i < kChannels; ++i) {
    auto xp = x0, xm = x0;
    xp[i] += 100.0;
    xm[i] -= 100.0;
    const double d =
      (cal::decode(truth, xp).wrench[axis] - cal::decode(truth, xm).wrench[axis]) / 200.0;
    g2 += d * d;
  }
  return target_std / std::sqrt(g2);
}

}  // namespace ftind::testing

#endif  // FTIND_TESTS__TRUTH_CALIBRATION_HPP_
