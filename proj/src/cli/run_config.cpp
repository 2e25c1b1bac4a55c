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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ftind/calibration.hpp"
#include "ftind/cli.hpp"
#include "ftind/error.hpp"
#include "ftind/hash.hpp"

namespace ftind::cli
{

namespace
{

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string & what) {throw Error(ErrorCode::ConfigError, what);}

json read_json(const fs::path & path)
{
  std::ifstream is(path);
  if (!is) {bad("cannot read " + path.string());}
  try {
    return json::parse(is);
  } catch (const json::exception & e) {
    bad(path.string() + ": " + e.what());
  }
}

// Relative references: next to the referring file, then the search path.
fs::path locate(const std::string & ref, const fs::path & base_dir)
{
  const fs::path p(ref);
  if (p.is_relative() && !base_dir.empty() && fs::exists(base_dir / p)) {return base_dir / p;}
  return resolve_config_path(ref);
}

std::string_view law_name(coil::PlateCouplingLaw law)
{
  return law == coil::PlateCouplingLaw::FirstOrder ? "first_order" : "full_cubic";
}

coil::PlateCouplingLaw parse_law(const std::string & s)
{
  if (s == "first_order") {return coil::PlateCouplingLaw::FirstOrder;}
  if (s == "full_cubic") {return coil::PlateCouplingLaw::FullCubic;}
  bad("coupling_law must be first_order or full_cubic, got '" + s + "'");
}

coil::CoilGeometry geometry_entry(const json & j, const fs::path & base_dir)
{
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "vertical" || s == "vertical_coil") {return coil::vertical_coil();}
    if (s == "horizontal" || s == "horizontal_coil") {return coil::horizontal_coil();}
    const auto path = locate(s, base_dir);
    return coil::geometry_from_config(read_json(path));
  }
  return coil::geometry_from_config(j);
}

Eigen::Vector3d vec3(const json & j, const char * what)
{
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) {bad(std::string(what) + " needs three components");}
  return {v[0], v[1], v[2]};
}

json plate_to_json(const synth::PlateKinematics & pk)
{
  json c = json::array();
  for (int r = 0; r < 6; ++r) {
    json row = json::array();
    for (int k = 0; k < 6; ++k) {row.push_back(pk.compliance(r, k));}
    c.push_back(row);
  }
  json sites = json::array();
  for (const auto & s : pk.sites) {
    sites.push_back({
        {"position", {s.position.x(), s.position.y(), s.position.z()}},
        {"sensing_axis", {s.sensing_axis.x(), s.sensing_axis.y(), s.sensing_axis.z()}},
        {"nominal_gap", s.nominal_gap},
        {"kind", s.kind == synth::CoilKind::Vertical ? "vertical" : "horizontal"}});
  }
  return {{"compliance", c}, {"sites", sites}};
}

synth::PlateKinematics plate_entry(
  const json & j, const fs::path & base_dir, const AxisRanges & ranges)
{
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "default") {return synth::default_plate_kinematics(ranges);}
    const auto path = locate(s, base_dir);
    return plate_entry(read_json(path), path.parent_path(), ranges);
  }
  synth::PlateKinematics pk;
  if (j.contains("compliance")) {
    const auto rows = j.at("compliance").get<std::vector<std::vector<double>>>();
    if (rows.size() != 6) {bad("compliance needs six rows");}
    for (int r = 0; r < 6; ++r) {
      if (rows[static_cast<std::size_t>(r)].size() != 6) {bad("compliance rows need six entries");}
      for (int k = 0; k < 6; ++k) {
        pk.compliance(r, k) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      }
    }
    const auto & sites = j.at("sites");
    if (!sites.is_array() || sites.size() != kChannels) {bad("plate needs six coil sites");}
    for (std::size_t i = 0; i < kChannels; ++i) {
      const auto & s = sites[i];
      auto & site = pk.sites[i];
      site.position = vec3(s.at("position"), "position");
      site.sensing_axis = vec3(s.at("sensing_axis"), "sensing_axis");
      site.nominal_gap = s.at("nominal_gap").get<double>();
      const auto kind = s.at("kind").get<std::string>();
      if (kind != "vertical" && kind != "horizontal") {bad("site kind must be vertical or horizontal");}
      site.kind = kind == "vertical" ? synth::CoilKind::Vertical : synth::CoilKind::Horizontal;
    }
  } else {
    pk = synth::default_plate_kinematics(
      ranges, j.value("nominal_gap", 1.0), j.value("site_radius", 20.0));
  }
  if (j.contains("couplings")) {
    for (const auto & c : j.at("couplings")) {
      synth::inject_coupling(
        pk, c.at("from").get<std::size_t>(), c.at("to").get<std::size_t>(),
        c.at("ratio").get<double>(), ranges);
    }
  }
  pk.validate();
  return pk;
}

}  // namespace

nlohmann::json RunConfig::canonical() const
{
  const auto & s = synth.sensor;
  return {
    {"vertical_coil", s.vertical},
    {"horizontal_coil", s.horizontal},
    {"coupling_law", law_name(s.law)},
    {"coupling_scale", {{"vertical", s.vertical_coupling_scale},
      {"horizontal", s.horizontal_coupling_scale}}},
    {"circuit", {{"capacitance", s.circuit.capacitance},
      {"parasitic_capacitance", s.circuit.parasitic_capacitance}}},
    {"full_scale_counts", s.full_scale_counts},
    {"plate", plate_to_json(synth.plate)},
    {"noise", {{"count_sigma", synth.noise.count_sigma},
      {"drift_per_second", synth.noise.drift_per_second}}},
    {"ranges", ranges.span},
    {"rate_hz", rate_hz},
    {"schedule", schedule ? schedule->generic_string() : std::string("demo")},
  };
}

std::string RunConfig::config_hash() const {return hex64(fnv1a64(canonical().dump()));}

std::string RunConfig::geometry_hash() const
{
  return cal::geometry_hash({synth.sensor.vertical, synth.sensor.horizontal});
}

fs::path resolve_config_path(const std::string & name)
{
  std::vector<fs::path> candidates{fs::path(name)};
  if (const char * env = std::getenv("FTIND_CONFIG_DIR"); env && fs::path(name).is_relative()) {
    std::stringstream dirs(env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) {continue;}
      candidates.push_back(fs::path(dir) / name);
      candidates.push_back(fs::path(dir) / (name + ".json"));
    }
  }
  for (const auto & c : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(c, ec)) {return c;}
  }
  bad("configuration '" + name + "' not found (searched FTIND_CONFIG_DIR)");
}

RunConfig run_config_from_json(const json & j, const fs::path & base_dir)
{
  if (!j.is_object()) {bad("configuration must be a JSON object");}
  static const std::vector<std::string> known = {
    "vertical_coil", "horizontal_coil", "plate", "noise", "ranges", "coupling_law",
    "coupling_scale", "circuit", "full_scale_counts", "seed", "rate_hz", "out", "schedule"};
  for (const auto & [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      bad("unknown configuration key '" + key + "'");
    }
  }
  RunConfig rc;
  try {
    if (j.contains("ranges")) {
      rc.ranges.span = j.at("ranges").get<std::array<double, kAxes>>();
      rc.ranges.validate();
    }
    auto & s = rc.synth.sensor;
    if (j.contains("vertical_coil")) {s.vertical = geometry_entry(j.at("vertical_coil"), base_dir);}
    if (j.contains("horizontal_coil")) {
      s.horizontal = geometry_entry(j.at("horizontal_coil"), base_dir);
    }
    if (j.contains("coupling_law")) {s.law = parse_law(j.at("coupling_law").get<std::string>());}
    if (j.contains("coupling_scale")) {
      const auto & c = j.at("coupling_scale");
      if (c.is_number()) {
        s.vertical_coupling_scale = s.horizontal_coupling_scale = c.get<double>();
      } else {
        s.vertical_coupling_scale = c.value("vertical", s.vertical_coupling_scale);
        s.horizontal_coupling_scale = c.value("horizontal", s.horizontal_coupling_scale);
      }
    }
    if (j.contains("circuit")) {
      const auto & c = j.at("circuit");
      s.circuit.capacitance = c.value("capacitance", s.circuit.capacitance);
      s.circuit.parasitic_capacitance =
        c.value("parasitic_capacitance", s.circuit.parasitic_capacitance);
    }
    if (j.contains("full_scale_counts")) {
      s.full_scale_counts = j.at("full_scale_counts").get<std::uint32_t>();
      if (s.full_scale_counts == 0 || s.full_scale_counts > kMaxCount) {
        bad("full_scale_counts must lie in [1, 2^28 - 1]");
      }
    }
    rc.synth.plate = plate_entry(j.value("plate", json("default")), base_dir, rc.ranges);
    if (j.contains("noise")) {
      const auto & n = j.at("noise");
      rc.synth.noise.count_sigma = n.value("count_sigma", 0.0);
      rc.synth.noise.drift_per_second = n.value("drift_per_second", 0.0);
      if (!(rc.synth.noise.count_sigma >= 0.0)) {bad("noise.count_sigma must be >= 0");}
    }
    if (j.contains("seed")) {
      const auto & v = j.at("seed");
      if (!v.is_number_unsigned()) {bad("seed must be a non-negative 64-bit integer");}
      rc.seed = v.get<std::uint64_t>();
    }
    if (j.contains("rate_hz")) {rc.rate_hz = j.at("rate_hz").get<double>();}
    if (j.contains("out")) {rc.out_dir = j.at("out").get<std::string>();}
    if (j.contains("schedule")) {
      const auto sched = j.at("schedule").get<std::string>();
      if (sched != "demo") {rc.schedule = locate(sched, base_dir);}
    }
  } catch (const json::exception & e) {
    bad(std::string("bad configuration value: ") + e.what());
  } catch (const Error & e) {
    if (e.code() == ErrorCode::ConfigError) {throw;}
    bad(e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::string & name_or_path)
{
  const auto path = resolve_config_path(name_or_path);
  return run_config_from_json(read_json(path), path.parent_path());
}

}  // namespace ftind::cli
