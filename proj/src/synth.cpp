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

#include "ftind/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include "ftind/error.hpp"

namespace ftind::synth
{

namespace
{

constexpr double kTwoPi = 2.0 * coil::kPi;

}  // namespace

void PlateKinematics::validate() const
{
  if (!compliance.allFinite() || !compliance.isApprox(compliance.transpose(), 1e-12)) {
    throw Error(ErrorCode::ConfigError, "compliance must be symmetric");
  }
  Eigen::LLT<Matrix6d> llt(compliance);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::ConfigError, "compliance must be positive definite");
  }
  for (const auto & site : sites) {
    if (!(site.nominal_gap > 0.0)) {
      throw Error(ErrorCode::ConfigError, "nominal gap must be > 0");
    }
    if (std::abs(site.sensing_axis.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::ConfigError, "sensing axis must be a unit vector");
    }
  }
}

double SensorModel::channel_counts(CoilKind kind, double gap_mm) const
{
  const auto & g = geometry(kind);
  const coil::TargetCoupling target{gap_mm, coupling_scale(kind), law};
  const double l = coil::inductance_with_target(g, target);
  return coil::ideal_counts(
    l, coil::total_inductance(g), circuit, static_cast<double>(full_scale_counts));
}

PlateKinematics default_plate_kinematics(
  const AxisRanges & ranges, double nominal_gap_mm, double site_radius_mm)
{
  ranges.validate();
  PlateKinematics pk;
  const double travel_m = 0.1 * nominal_gap_mm * 1e-3;
  const double tilt_rad = 0.1 * nominal_gap_mm / site_radius_mm;
  for (std::size_t a = 0; a < 3; ++a) {
    pk.compliance(a, a) = travel_m / ranges.limit(a);
    pk.compliance(a + 3, a + 3) = tilt_rad / ranges.limit(a + 3);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double phi_v = coil::kPi / 2.0 + kTwoPi * static_cast<double>(i) / 3.0;
    auto & v = pk.sites[i];
    v.position = {site_radius_mm * std::cos(phi_v), site_radius_mm * std::sin(phi_v), 0.0};
    v.sensing_axis = Eigen::Vector3d::UnitZ();
    v.nominal_gap = nominal_gap_mm;
    v.kind = CoilKind::Vertical;

    const double phi_h = phi_v + coil::kPi / 3.0;
    auto & h = pk.sites[i + 3];
    h.position = {site_radius_mm * std::cos(phi_h), site_radius_mm * std::sin(phi_h), 0.0};
    h.sensing_axis = {-std::sin(phi_h), std::cos(phi_h), 0.0};
    h.nominal_gap = nominal_gap_mm;
    h.kind = CoilKind::Horizontal;
  }
  return pk;
}

SynthConfig default_config(const AxisRanges & ranges)
{
  SynthConfig cfg;
  cfg.plate = default_plate_kinematics(ranges);
  return cfg;
}

void inject_coupling(
  PlateKinematics & pk, std::size_t from, std::size_t to, double ratio,
  const AxisRanges & ranges)
{
  if (from >= kAxes || to >= kAxes || from == to) {
    throw Error(ErrorCode::DomainError, "coupling needs two distinct axes");
  }
  const double term = ratio * pk.compliance(to, to) * ranges[to] / ranges[from];
  pk.compliance(to, from) += term;
  pk.compliance(from, to) += term;
  pk.validate();
}

std::array<double, kChannels> gaps_from_wrench(const Wrench & w, const PlateKinematics & pk)
{
  Eigen::Matrix<double, 6, 1> load;
  for (std::size_t a = 0; a < kAxes; ++a) {
    load(static_cast<Eigen::Index>(a)) = w[a];
  }
  const Eigen::Matrix<double, 6, 1> twist = pk.compliance * load;
  const Eigen::Vector3d translation_mm = twist.head<3>() * 1e3;
  const Eigen::Vector3d rotation = twist.tail<3>();

  std::array<double, kChannels> gaps{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    const auto & site = pk.sites[i];
    const Eigen::Vector3d displacement = translation_mm + rotation.cross(site.position);
    gaps[i] = site.nominal_gap - displacement.dot(site.sensing_axis);
    if (!(gaps[i] > 0.0)) {
      throw Error(
        ErrorCode::PlateContact, "plate touches coil " + std::to_string(i) + " (overload)");
    }
  }
  return gaps;
}

std::array<double, kChannels> ideal_counts(const Wrench & w, const SynthConfig & cfg)
{
  const auto gaps = gaps_from_wrench(w, cfg.plate);
  std::array<double, kChannels> counts{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    counts[i] = cfg.sensor.channel_counts(cfg.plate.sites[i].kind, gaps[i]);
  }
  return counts;
}

double GaussianSource::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::standard_normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return radius * std::cos(kTwoPi * u2);
}

Schedule::Schedule(std::vector<Keyframe> keyframes)
: keyframes_(std::move(keyframes))
{
  if (keyframes_.empty()) {
    throw Error(ErrorCode::ConfigError, "schedule has no keyframes");
  }
  for (std::size_t i = 1; i < keyframes_.size(); ++i) {
    if (!(keyframes_[i].t > keyframes_[i - 1].t)) {
      throw Error(ErrorCode::ConfigError, "schedule times must be strictly increasing");
    }
  }
  if (keyframes_.front().t < 0.0) {
    throw Error(ErrorCode::ConfigError, "schedule must start at t >= 0");
  }
}

double Schedule::duration() const
{
  return keyframes_.empty() ? 0.0 : keyframes_.back().t;
}

Wrench Schedule::at(double t) const
{
  if (keyframes_.empty()) {
    return {};
  }
  if (t <= keyframes_.front().t) {
    return keyframes_.front().wrench;
  }
  if (t >= keyframes_.back().t) {
    return keyframes_.back().wrench;
  }
  const auto upper = std::upper_bound(
    keyframes_.begin(), keyframes_.end(), t,
    [](double value, const Keyframe & k) {return value < k.t;});
  const auto & b = *upper;
  const auto & a = *(upper - 1);
  const double s = (t - a.t) / (b.t - a.t);
  Wrench w;
  for (std::size_t i = 0; i < kAxes; ++i) {
    w[i] = a.wrench[i] + s * (b.wrench[i] - a.wrench[i]);
  }
  return w;
}

bool Schedule::within(const AxisRanges & ranges) const
{
  for (const auto & k : keyframes_) {
    for (std::size_t i = 0; i < kAxes; ++i) {
      if (std::abs(k.wrench[i]) > ranges.limit(i)) {
        return false;
      }
    }
  }
  return true;
}

Schedule load_schedule(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ConfigError, "cannot open schedule " + path.string());
  }
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "t_s,fx,fy,fz,tx,ty,tz") {
    throw Error(ErrorCode::ConfigError, "schedule header must be t_s,fx,fy,fz,tx,ty,tz");
  }
  std::vector<Keyframe> frames;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::array<double, 7> values{};
    std::size_t field = 0;
    const char * p = line.data();
    const char * end = line.data() + line.size();
    while (field < values.size()) {
      const auto [next, ec] = std::from_chars(p, end, values[field]);
      if (ec != std::errc{}) {
        throw Error(
          ErrorCode::ConfigError, path.string() + ":" + std::to_string(line_no) + ": bad number");
      }
      ++field;
      p = next;
      if (p == end) {
        break;
      }
      if (*p != ',') {
        throw Error(
          ErrorCode::ConfigError,
          path.string() + ":" + std::to_string(line_no) + ": expected ','");
      }
      ++p;
    }
    if (field != values.size() || p != end) {
      throw Error(
        ErrorCode::ConfigError,
        path.string() + ":" + std::to_string(line_no) + ": expected 7 columns");
    }
    Keyframe k;
    k.t = values[0];
    for (std::size_t i = 0; i < kAxes; ++i) {
      k.wrench[i] = values[i + 1];
    }
    frames.push_back(k);
  }
  return Schedule(std::move(frames));
}

void save_schedule(const Schedule & s, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << "t_s,fx,fy,fz,tx,ty,tz\n";
  out.precision(17);
  for (const auto & k : s.keyframes()) {
    out << k.t;
    for (double v : k.wrench.v) {
      out << ',' << v;
    }
    out << '\n';
  }
}

Schedule demo_schedule(const AxisRanges & ranges)
{
  std::vector<Keyframe> frames;
  double t = 0.0;
  auto push = [&](double dt, const Wrench & w) {
      t += dt;
      frames.push_back({t, w});
    };
  frames.push_back({0.0, Wrench{}});
  push(10.0, Wrench{});
  for (std::size_t a = 0; a < kAxes; ++a) {
    Wrench hi;
    hi[a] = ranges.limit(a);
    Wrench lo;
    lo[a] = -ranges.limit(a);
    push(1.0, hi);
    push(2.0, lo);
    push(1.0, Wrench{});
    push(0.5, Wrench{});
  }
  // Fixed generator: the schedule must not depend on the run seed.
  GaussianSource pick(0x5eedULL);
  for (int k = 0; k < 12; ++k) {
    Wrench w;
    for (std::size_t a = 0; a < kAxes; ++a) {
      w[a] = (2.0 * pick.uniform() - 1.0) * 0.6 * ranges.limit(a);
    }
    push(1.0, w);
  }
  push(1.0, Wrench{});
  return Schedule(std::move(frames));
}

Dataset generate_dataset(
  const Schedule & schedule, const SynthConfig & cfg, double rate_hz, std::uint64_t seed)
{
  if (!(rate_hz > 0.0) || rate_hz > kMaxSampleRateHz) {
    throw Error(
      ErrorCode::RateError,
      "sample rate must lie in (0, " + std::to_string(kMaxSampleRateHz) + "] Hz");
  }
  cfg.plate.validate();
  if (cfg.noise.count_sigma < 0.0) {
    throw Error(ErrorCode::ConfigError, "count_sigma must be >= 0");
  }
  const auto n = static_cast<std::size_t>(std::floor(schedule.duration() * rate_hz + 1e-9)) + 1;
  GaussianSource noise(seed);
  Dataset out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    Sample s;
    s.t_us = static_cast<std::uint64_t>(std::llround(static_cast<double>(k) * 1e6 / rate_hz));
    s.wrench = schedule.at(t);
    const auto ideal = ideal_counts(s.wrench, cfg);
    for (std::size_t c = 0; c < kChannels; ++c) {
      double value = ideal[c] + cfg.noise.drift_per_second * t;
      if (cfg.noise.count_sigma > 0.0) {
        value += cfg.noise.count_sigma * noise.standard_normal();
      }
      s.counts[c] = coil::quantize_counts(value).counts;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace ftind::synth
