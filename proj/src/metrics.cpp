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

#include "ftind/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ftind/error.hpp"

namespace ftind::metrics
{

namespace
{

std::uint64_t distance(std::uint64_t a, std::uint64_t b) {return a > b ? a - b : b - a;}

// Row of the crosstalk matrix for an excitation of axis i.
std::array<double, kAxes> crosstalk_row(
  std::size_t i, std::span<const Wrench> run, const Wrench & baseline, const AxisRanges & ranges)
{
  if (run.empty()) {
    throw Error(ErrorCode::MissingRun, std::string("no excitation run for ") +
            std::string(kAxisNames[i]));
  }
  std::array<double, kAxes> peak{};
  for (const auto & w : run) {
    for (std::size_t j = 0; j < kAxes; ++j) {
      peak[j] = std::max(peak[j], std::abs(w[j] - baseline[j]));
    }
  }
  if (!(peak[i] > 0.0)) {
    throw Error(ErrorCode::DegenerateRun, std::string("no response on excited axis ") +
            std::string(kAxisNames[i]));
  }
  std::array<double, kAxes> row{};
  const double own = peak[i] / ranges[i];
  for (std::size_t j = 0; j < kAxes; ++j) {
    row[j] = j == i ? 100.0 : 100.0 * (peak[j] / ranges[j]) / own;
  }
  return row;
}

}  // namespace

std::array<AxisError, kAxes> full_scale_error(
  std::span<const Wrench> decoded, std::span<const Wrench> reference, const AxisRanges & ranges)
{
  ranges.validate();
  if (decoded.size() != reference.size()) {
    throw Error(ErrorCode::LengthMismatch, "decoded and reference series differ in length");
  }
  if (decoded.empty()) {throw Error(ErrorCode::DegenerateData, "empty series");}
  const auto n = static_cast<double>(decoded.size());
  std::array<AxisError, kAxes> out{};
  for (std::size_t a = 0; a < kAxes; ++a) {
    double sum = 0.0, sq = 0.0, mx = 0.0;
    for (std::size_t t = 0; t < decoded.size(); ++t) {
      const double e = decoded[t][a] - reference[t][a];
      const double pct = 100.0 * std::abs(e) / ranges[a];
      sum += pct;
      sq += e * e;
      mx = std::max(mx, pct);
    }
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t t = 0; t < decoded.size(); ++t) {
      const double d = 100.0 * std::abs(decoded[t][a] - reference[t][a]) / ranges[a] - mean;
      var += d * d;
    }
    out[a].mean_pct = mean;
    out[a].std_pct = decoded.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    out[a].max_pct = mx;
    out[a].rmse = std::sqrt(sq / n);
  }
  return out;
}

std::array<double, kAxes> axis_std(std::span<const Wrench> window)
{
  if (window.size() < 2) {
    throw Error(ErrorCode::DegenerateWindow, "noise window needs at least two samples");
  }
  const auto n = static_cast<double>(window.size());
  std::array<double, kAxes> out{};
  for (std::size_t a = 0; a < kAxes; ++a) {
    double mean = 0.0;
    for (const auto & w : window) {mean += w[a];}
    mean /= n;
    double var = 0.0;
    for (const auto & w : window) {var += (w[a] - mean) * (w[a] - mean);}
    out[a] = std::sqrt(var / (n - 1.0));
  }
  return out;
}

std::array<double, kAxes> resolution_from_noise(std::span<const Wrench> window, double k)
{
  if (!(k > 0.0)) {throw Error(ErrorCode::DomainError, "sigma multiplier must be positive");}
  auto out = axis_std(window);
  for (auto & v : out) {v *= k;}
  return out;
}

double sigma_multiplier_for(double resolution, double noise_std)
{
  if (!(noise_std > 0.0) || !(resolution > 0.0)) {
    throw Error(ErrorCode::DomainError, "resolution and noise must be positive");
  }
  return resolution / noise_std;
}

std::int64_t quantization_levels(double span, double resolution)
{
  if (!(span > 0.0) || !(resolution > 0.0) || !std::isfinite(span / resolution)) {
    throw Error(ErrorCode::DomainError, "range and resolution must be positive");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(span / resolution)));
}

CrosstalkMatrix crosstalk_matrix(
  const std::array<std::vector<Wrench>, kAxes> & runs, const Wrench & baseline,
  const AxisRanges & ranges)
{
  ranges.validate();
  CrosstalkMatrix m{};
  for (std::size_t i = 0; i < kAxes; ++i) {m[i] = crosstalk_row(i, runs[i], baseline, ranges);}
  return m;
}

std::vector<std::pair<std::size_t, std::size_t>> align_by_timestamp(
  std::span<const TimedWrench> decoded, std::span<const TimedWrench> reference,
  std::uint64_t max_skew_us)
{
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (reference.empty()) {return pairs;}
  std::size_t j = 0;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    const auto t = decoded[i].t_us;
    while (j + 1 < reference.size() &&
      distance(reference[j + 1].t_us, t) <= distance(reference[j].t_us, t))
    {
      ++j;
    }
    if (distance(reference[j].t_us, t) <= max_skew_us) {pairs.emplace_back(i, j);}
  }
  return pairs;
}

Segmentation segment(
  std::span<const Wrench> reference, const AxisRanges & ranges, double active_fraction,
  double quiet_fraction)
{
  ranges.validate();
  Segmentation seg;
  std::size_t run_start = 0, run_len = 0, best_start = 0, best_len = 0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    std::size_t loaded = 0, active_axis = kAxes;
    bool all_quiet = true;
    for (std::size_t a = 0; a < kAxes; ++a) {
      const double rel = std::abs(reference[t][a]) / ranges[a];
      if (rel > quiet_fraction) {all_quiet = false;}
      if (rel > active_fraction) {++loaded; active_axis = a;}
    }
    std::size_t noisy = 0;
    for (std::size_t a = 0; a < kAxes; ++a) {
      if (a != active_axis && std::abs(reference[t][a]) / ranges[a] > quiet_fraction) {++noisy;}
    }
    if (loaded == 1 && noisy == 0) {seg.runs[active_axis].push_back(t);}

    if (all_quiet) {
      if (run_len == 0) {run_start = t;}
      ++run_len;
      if (run_len > best_len) {best_len = run_len; best_start = run_start;}
    } else {
      run_len = 0;
    }
  }
  for (std::size_t k = 0; k < best_len; ++k) {seg.unloaded.push_back(best_start + k);}
  return seg;
}

EvalReport evaluate(
  std::span<const TimedWrench> decoded, std::span<const TimedWrench> reference,
  const EvalOptions & opt)
{
  const auto pairs = align_by_timestamp(decoded, reference, opt.max_skew_us);
  if (pairs.empty()) {
    throw Error(ErrorCode::DegenerateData, "no decoded sample aligns with the reference");
  }
  std::vector<Wrench> dec, ref;
  std::vector<std::uint64_t> times;
  dec.reserve(pairs.size());
  ref.reserve(pairs.size());
  for (const auto & [i, j] : pairs) {
    dec.push_back(decoded[i].wrench);
    ref.push_back(reference[j].wrench);
    times.push_back(decoded[i].t_us);
  }

  EvalReport rep;
  rep.aligned = pairs.size();
  rep.sigma_multiplier = opt.sigma_multiplier;
  rep.error = full_scale_error(dec, ref, opt.ranges);

  const auto seg = segment(ref, opt.ranges);
  std::vector<Wrench> window;
  for (const auto k : seg.unloaded) {
    if (!window.empty() &&
      static_cast<double>(times[k] - times[seg.unloaded.front()]) >= opt.noise_window_s * 1e6)
    {
      break;
    }
    window.push_back(dec[k]);
  }
  rep.noise_window = window.size();
  rep.noise_std = axis_std(window);
  Wrench baseline;
  for (const auto & w : window) {
    for (std::size_t a = 0; a < kAxes; ++a) {baseline[a] += w[a];}
  }
  for (std::size_t a = 0; a < kAxes; ++a) {
    baseline[a] /= static_cast<double>(window.size());
    rep.resolution[a] = opt.sigma_multiplier * rep.noise_std[a];
    if (rep.resolution[a] > 0.0) {
      rep.quantization_levels[a] = quantization_levels(opt.ranges[a], rep.resolution[a]);
    }
  }

  for (std::size_t i = 0; i < kAxes; ++i) {
    if (seg.runs[i].empty() && !opt.strict) {continue;}
    std::vector<Wrench> run;
    for (const auto k : seg.runs[i]) {run.push_back(dec[k]);}
    rep.crosstalk[i] = crosstalk_row(i, run, baseline, opt.ranges);
  }
  return rep;
}

nlohmann::json to_json(const EvalReport & r)
{
  nlohmann::json j;
  j["aligned_samples"] = r.aligned;
  j["noise_window_samples"] = r.noise_window;
  j["sigma_multiplier"] = r.sigma_multiplier;
  nlohmann::json axes = nlohmann::json::object();
  for (std::size_t a = 0; a < kAxes; ++a) {
    nlohmann::json x;
    x["mean_pct"] = r.error[a].mean_pct;
    x["std_pct"] = r.error[a].std_pct;
    x["max_pct"] = r.error[a].max_pct;
    x["rmse"] = r.error[a].rmse;
    x["noise_std"] = r.noise_std[a];
    x["resolution"] = r.resolution[a];
    x["quantization_levels"] = r.quantization_levels[a] ?
      nlohmann::json(*r.quantization_levels[a]) : nlohmann::json(nullptr);
    axes[std::string(kAxisNames[a])] = x;
  }
  j["axes"] = axes;
  nlohmann::json xt = nlohmann::json::object();
  for (std::size_t i = 0; i < kAxes; ++i) {
    xt[std::string(kAxisNames[i])] = r.crosstalk[i] ?
      nlohmann::json(*r.crosstalk[i]) : nlohmann::json(nullptr);
  }
  j["crosstalk_pct"] = xt;
  return j;
}

}  // namespace ftind::metrics
