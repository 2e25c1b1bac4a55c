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

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ftind/calibration.hpp"
#include "ftind/cli.hpp"
#include "ftind/coil_model.hpp"
#include "ftind/error.hpp"
#include "ftind/fitting.hpp"
#include "ftind/hash.hpp"
#include "ftind/metrics.hpp"
#include "ftind/wire.hpp"

namespace ftind::cli
{

namespace
{

using nlohmann::json;
namespace fs = std::filesystem;

/// Count noise of the built-in demo configuration.
constexpr double kDemoCountSigma = 4.7;

struct Options
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> rate;
  std::optional<std::string> schedule;
  bool strict = false;
  std::string input;
  std::string family = "all";
  std::string coil = "vertical";
  std::optional<double> full_scale;
  std::size_t max_samples = 4000;
  std::size_t zero_load_samples = 0;
  std::string calibration;
  bool allow_geometry_mismatch = false;
  std::string decoded;
  std::string reference;
  double sigma_multiplier = metrics::kDefaultSigmaMultiplier;
  std::string sink = "file";
};

int exit_code_for(ErrorCode code)
{
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::SchemaError:
    case ErrorCode::ValueError:
    case ErrorCode::IoError:
    case ErrorCode::VersionMismatch:
    case ErrorCode::ChecksumError:
    case ErrorCode::BadMagic:
    case ErrorCode::RateError:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

struct FileEntry
{
  std::string name;
  std::uintmax_t bytes = 0;
  std::string checksum;
};

FileEntry describe(const fs::path & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {throw Error(ErrorCode::IoError, "cannot read " + path.string());}
  std::uint64_t h = fnv1a64("");
  std::uintmax_t n = 0;
  std::array<char, 1 << 16> buf{};
  while (is) {
    is.read(buf.data(), buf.size());
    const auto got = static_cast<std::size_t>(is.gcount());
    h = fnv1a64(std::string_view(buf.data(), got), h);
    n += got;
  }
  return {path.filename().string(), n, hex64(h)};
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {throw Error(ErrorCode::IoError, "cannot write " + path.string());}
  os << text;
  if (!os) {throw Error(ErrorCode::IoError, "write failed for " + path.string());}
}

json read_json_file(const fs::path & path)
{
  std::ifstream is(path);
  if (!is) {throw Error(ErrorCode::IoError, "cannot read " + path.string());}
  try {
    return json::parse(is);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

fs::path prepare_out(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "output directory " + dir.string() + " is not writable");
  }
  return dir;
}

RunConfig resolve_run_config(const Options & o, bool demo)
{
  RunConfig rc;
  if (!o.config.empty()) {
    rc = load_run_config(o.config);
  } else if (demo) {
    rc.synth.noise.count_sigma = kDemoCountSigma;
  }
  if (o.seed) {rc.seed = *o.seed;}
  if (o.out) {rc.out_dir = *o.out;}
  if (o.rate) {rc.rate_hz = *o.rate;}
  if (o.schedule) {rc.schedule = resolve_config_path(*o.schedule);}
  return rc;
}

std::string table(const std::vector<std::string> & header, const std::vector<std::vector<std::string>> & rows)
{
  std::ostringstream os;
  for (std::size_t k = 0; k < header.size(); ++k) {os << (k ? "," : "") << header[k];}
  os << '\n';
  for (const auto & r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {os << (k ? "," : "") << r[k];}
    os << '\n';
  }
  return os.str();
}

std::string num(const json & v)
{
  if (v.is_null()) {return "";}
  if (v.is_number_integer()) {return v.dump();}
  return wire::format_double(v.get<double>());
}

// ---------------------------------------------------------------------------
// simulate

struct SimOutput
{
  Dataset data;
  std::vector<FileEntry> files;
};

SimOutput simulate(const RunConfig & rc, bool strict, std::ostream & err)
{
  const auto schedule = rc.schedule ? synth::load_schedule(*rc.schedule) :
    synth::demo_schedule(rc.ranges);
  if (!schedule.within(rc.ranges)) {
    if (strict) {throw Error(ErrorCode::ConfigError, "schedule exceeds the axis ranges");}
    err << "warning: schedule exceeds the axis ranges\n";
  }
  const auto dir = prepare_out(rc.out_dir);
  SimOutput out;
  out.data = synth::generate_dataset(schedule, rc.synth, rc.rate_hz, rc.seed);

  wire::write_dataset_csv(dir / "dataset.csv", out.data);
  wire::write_frame_log(dir / "frames.bin", wire::frames_from_dataset(out.data));
  std::vector<wire::TimedRow> ref;
  ref.reserve(out.data.size());
  for (const auto & s : out.data) {ref.push_back({s.t_us, s.wrench});}
  wire::write_wrench_csv(dir / "reference.csv", ref);
  synth::save_schedule(schedule, dir / "schedule.csv");
  json cfg = rc.canonical();
  cfg["seed"] = rc.seed;
  write_text(dir / "config.json", cfg.dump(2) + "\n");

  const auto & s = rc.synth.sensor;
  const auto curve = coil::response_curve(s.vertical, s.vertical_coupling_scale, s.law);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < curve.distance.size(); ++k) {
    rows.push_back({wire::format_double(curve.sqrt_ratio[k]),
        wire::format_double(curve.distance[k])});
  }
  write_text(dir / "response_curve.csv", table({"x", "y"}, rows));

  for (const char * f : {"dataset.csv", "frames.bin", "reference.csv", "schedule.csv",
      "config.json", "response_curve.csv"})
  {
    out.files.push_back(describe(dir / f));
  }
  return out;
}

void write_manifest(
  const fs::path & dir, const RunConfig & rc, std::size_t samples,
  const std::vector<FileEntry> & files)
{
  json m;
  m["seed"] = rc.seed;
  m["config_hash"] = rc.config_hash();
  m["geometry_hash"] = rc.geometry_hash();
  m["rate_hz"] = rc.rate_hz;
  m["samples"] = samples;
  m["checksum"] = "fnv1a64";
  m["files"] = json::array();
  for (const auto & f : files) {
    m["files"].push_back({{"name", f.name}, {"bytes", f.bytes}, {"checksum", f.checksum}});
  }
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

int cmd_simulate(const Options & o, std::ostream & out, std::ostream & err)
{
  const auto rc = resolve_run_config(o, false);
  const auto sim = simulate(rc, o.strict, err);
  write_manifest(rc.out_dir, rc, sim.data.size(), sim.files);
  out << "simulated " << sim.data.size() << " samples into " << rc.out_dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

std::pair<std::vector<double>, std::vector<double>> read_xy(const fs::path & path)
{
  std::ifstream is(path);
  if (!is) {throw Error(ErrorCode::IoError, "cannot read " + path.string());}
  std::string line;
  std::getline(is, line);
  std::vector<double> xs, ys;
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) {continue;}
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) {
      throw Error(ErrorCode::SchemaError, path.string() + " line " + std::to_string(n) +
              ": expected two columns");
    }
    try {
      xs.push_back(std::stod(a));
      ys.push_back(std::stod(b));
    } catch (const std::exception &) {
      throw Error(ErrorCode::ValueError, path.string() + " line " + std::to_string(n) +
              ": not a number");
    }
  }
  return {xs, ys};
}

json fit_all(
  const std::vector<double> & xs, const std::vector<double> & ys,
  const std::vector<fit::Family> & families, const std::string & source,
  std::optional<double> full_scale = std::nullopt)
{
  fit::FitOptions opt;
  opt.full_scale = full_scale;
  json j;
  j["source"] = source;
  j["data"] = {{"x", xs}, {"y", ys}};
  j["fits"] = json::array();
  for (const auto fam : families) {
    const auto r = fit::fit_nls(fam, xs, ys, std::nullopt, opt);
    j["fits"].push_back({
        {"family", fit::family_name(fam)},
        {"n_params", fit::parameter_count(fam)},
        {"coefficients", r.model.coefficients},
        {"rmse", r.report.rmse},
        {"r2", r.report.r_squared_defined ? json(r.report.r_squared) : json(nullptr)},
        {"linearity_pct", r.report.linearity_error_pct},
        {"iterations", r.report.iterations},
        {"converged", r.report.converged}});
  }
  return j;
}

std::vector<FileEntry> write_fit_tables(const json & fits, const fs::path & dir)
{
  std::vector<FileEntry> files;
  std::vector<std::vector<std::string>> rows;
  const auto xs = fits.at("data").at("x").get<std::vector<double>>();
  const auto ys = fits.at("data").at("y").get<std::vector<double>>();
  for (const auto & f : fits.at("fits")) {
    const auto name = f.at("family").get<std::string>();
    rows.push_back({name, num(f.at("n_params")), num(f.at("rmse")), num(f.at("r2")),
        num(f.at("linearity_pct"))});
    const fit::FitModel model(
      fit::parse_family(name), f.at("coefficients").get<std::vector<double>>());
    std::vector<std::vector<std::string>> curve;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      curve.push_back({wire::format_double(xs[k]), wire::format_double(ys[k]),
          wire::format_double(fit::evaluate(model, xs[k]))});
    }
    const auto file = dir / ("curve_" + name + ".csv");
    write_text(file, table({"x", "y", "y_fit"}, curve));
    files.push_back(describe(file));
  }
  write_text(dir / "table_fit_comparison.csv",
    table({"model", "n_params", "rmse", "r2", "linearity_pct"}, rows));
  files.insert(files.begin(), describe(dir / "table_fit_comparison.csv"));
  return files;
}

std::vector<fit::Family> families_from(const std::string & name)
{
  if (name == "all") {return {std::begin(fit::kAllFamilies), std::end(fit::kAllFamilies)};}
  return {fit::parse_family(name)};
}

int cmd_fit(const Options & o, std::ostream & out, std::ostream &)
{
  const auto rc = resolve_run_config(o, false);
  std::vector<double> xs, ys;
  std::string source;
  if (!o.input.empty()) {
    std::tie(xs, ys) = read_xy(o.input);
    source = fs::path(o.input).filename().string();
  } else {
    if (o.coil != "vertical" && o.coil != "horizontal") {
      throw Error(ErrorCode::ConfigError, "--coil must be vertical or horizontal");
    }
    const auto & s = rc.synth.sensor;
    const bool v = o.coil == "vertical";
    const auto c = coil::response_curve(
      v ? s.vertical : s.horizontal, v ? s.vertical_coupling_scale : s.horizontal_coupling_scale,
      s.law);
    xs = c.sqrt_ratio;
    ys = c.distance;
    source = o.coil + "_coil_response";
  }
  const auto dir = prepare_out(rc.out_dir);
  const auto j = fit_all(xs, ys, families_from(o.family), source, o.full_scale);
  write_text(dir / "fit_results.json", j.dump(2) + "\n");
  write_fit_tables(j, dir);
  out << std::setw(18) << std::left << "model" << std::setw(14) << "rmse" << "r2\n";
  for (const auto & f : j.at("fits")) {
    out << std::setw(18) << f.at("family").get<std::string>() << std::setw(14) <<
      num(f.at("rmse")) << num(f.at("r2")) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate / decode

json cal_report_json(const cal::CalReport & r)
{
  json axes = json::object();
  for (std::size_t a = 0; a < kAxes; ++a) {
    axes[std::string(kAxisNames[a])] = {
      {"rmse", r.axes[a].rmse}, {"mean_pct", r.axes[a].mean_pct}, {"max_pct", r.axes[a].max_pct}};
  }
  return {{"axes", axes}, {"normalized_rmse", r.normalized_rmse},
    {"iterations", r.iterations}, {"converged", r.converged}, {"stop_reason", r.stop_reason},
    {"samples", r.samples}, {"samples_used", r.samples_used},
    {"zero_load_raw", r.zero_load_raw}};
}

cal::CalibrationOutcome run_calibrate(
  const Dataset & data, const RunConfig & rc, const Options & o, const fs::path & dir)
{
  cal::CalibrationOptions opt;
  opt.ranges = rc.ranges;
  opt.max_samples = o.max_samples;
  opt.zero_load_samples = o.zero_load_samples;
  opt.geometry_hash = rc.geometry_hash();
  auto outcome = cal::calibrate(data, opt);
  cal::save_calibration(outcome.calibration, dir / "calibration.cal");
  write_text(dir / "calibration_report.json", cal_report_json(outcome.report).dump(2) + "\n");
  return outcome;
}

int cmd_calibrate(const Options & o, std::ostream & out, std::ostream &)
{
  const auto rc = resolve_run_config(o, false);
  const auto data = wire::ingest_csv(o.input).data;
  const auto dir = prepare_out(rc.out_dir);
  const auto r = run_calibrate(data, rc, o, dir).report;
  out << "calibrated on " << r.samples_used << " of " << r.samples << " samples, " <<
    (r.converged ? "converged" : "not converged") << " (" << r.stop_reason << ")\n";
  for (std::size_t a = 0; a < kAxes; ++a) {
    out << kAxisNames[a] << " max " << wire::format_double(r.axes[a].max_pct) << " %FS\n";
  }
  return kExitOk;
}

struct RawRow
{
  std::uint64_t t_us;
  RawCounts counts;
};

std::vector<RawRow> read_raw(const fs::path & path)
{
  std::vector<RawRow> rows;
  if (path.extension() == ".bin") {
    for (const auto & f : wire::read_frame_log(path)) {rows.push_back({f.timestamp_us, f.channels});}
  } else {
    wire::scan_dataset_csv(path, [&](const Sample & s) {rows.push_back({s.t_us, s.counts});});
  }
  return rows;
}

std::string wrench_line(std::uint64_t t_us, const Wrench & w)
{
  std::string line = std::to_string(t_us);
  for (std::size_t a = 0; a < kAxes; ++a) {line += ',' + wire::format_double(w[a]);}
  line += '\n';
  return line;
}

int cmd_decode(const Options & o, std::ostream & out, std::ostream & err)
{
  std::optional<std::string> expected;
  if (!o.config.empty()) {expected = load_run_config(o.config).geometry_hash();}
  const auto c = cal::load_calibration(o.calibration, expected, o.allow_geometry_mismatch);
  const auto rows = read_raw(o.input);

  std::ofstream file;
  std::ostream * sink = nullptr;
  if (o.sink == "stdout") {
    sink = &out;
  } else if (o.sink == "file") {
    if (!o.out) {throw Error(ErrorCode::ConfigError, "--sink file needs --out");}
    file.open(*o.out, std::ios::binary);
    if (!file) {throw Error(ErrorCode::IoError, "cannot write " + *o.out);}
    sink = &file;
  } else if (o.sink != "null") {
    throw Error(ErrorCode::ConfigError, "--sink must be stdout, file or null");
  }
  if (sink) {*sink << "t_us,fx,fy,fz,tx,ty,tz\n";}

  std::size_t extrapolated = 0;
  auto emit = [&](std::uint64_t t, const RawCounts & counts) {
      const auto d = cal::decode(c, counts);
      extrapolated += d.extrapolated ? 1 : 0;
      if (sink) {*sink << wrench_line(t, d.wrench);}
    };
  if (o.rate) {
    std::vector<wire::RawFrame> frames;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      frames.push_back(wire::make_frame(
          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(rows[k].t_us), rows[k].counts));
    }
    const auto stats = wire::replay(
      frames, *o.rate, [&](const wire::RawFrame & f) {emit(f.timestamp_us, f.channels);});
    err << "decoded " << stats.delivered << " frames, dropped " << stats.dropped << '\n';
  } else {
    for (const auto & r : rows) {emit(r.t_us, r.counts);}
  }
  if (extrapolated > 0) {
    err << "warning: " << extrapolated << " samples outside the calibrated raw range\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate / report

std::vector<FileEntry> write_eval_tables(const json & rep, const fs::path & dir)
{
  if (rep.value("aligned_samples", 0) == 0) {
    throw Error(ErrorCode::ConfigError, "evaluation is empty");
  }
  std::vector<std::vector<std::string>> err_rows, noise_rows, xt_rows;
  for (const auto & name : kAxisNames) {
    const auto & a = rep.at("axes").at(std::string(name));
    err_rows.push_back({std::string(name), num(a.at("mean_pct")), num(a.at("std_pct")),
        num(a.at("max_pct")), num(a.at("rmse"))});
    noise_rows.push_back({std::string(name), num(a.at("noise_std")),
        num(rep.at("sigma_multiplier")), num(a.at("resolution")), num(a.at("quantization_levels"))});
    std::vector<std::string> row{std::string(name)};
    const auto & x = rep.at("crosstalk_pct").at(std::string(name));
    for (std::size_t j = 0; j < kAxes; ++j) {row.push_back(x.is_null() ? "" : num(x[j]));}
    xt_rows.push_back(row);
  }
  write_text(dir / "table_error.csv",
    table({"axis", "mean_pct", "std_pct", "max_pct", "rmse"}, err_rows));
  write_text(dir / "table_resolution.csv",
    table({"axis", "noise_std", "sigma_multiplier", "resolution", "quantization_levels"},
    noise_rows));
  write_text(dir / "table_crosstalk.csv",
    table({"excited", "fx", "fy", "fz", "tx", "ty", "tz"}, xt_rows));
  return {describe(dir / "table_error.csv"), describe(dir / "table_resolution.csv"),
    describe(dir / "table_crosstalk.csv")};
}

std::vector<metrics::TimedWrench> timed(const std::vector<wire::TimedRow> & rows)
{
  std::vector<metrics::TimedWrench> out;
  out.reserve(rows.size());
  for (const auto & r : rows) {out.push_back({r.t_us, r.wrench});}
  return out;
}

json run_evaluate(
  const std::vector<wire::TimedRow> & decoded, const std::vector<wire::TimedRow> & reference,
  const RunConfig & rc, const Options & o)
{
  metrics::EvalOptions opt;
  opt.ranges = rc.ranges;
  opt.sigma_multiplier = o.sigma_multiplier;
  opt.strict = o.strict;
  const auto d = timed(decoded), r = timed(reference);
  return metrics::to_json(metrics::evaluate(d, r, opt));
}

int cmd_evaluate(const Options & o, std::ostream & out, std::ostream &)
{
  const auto rc = resolve_run_config(o, false);
  const auto dir = prepare_out(rc.out_dir);
  const auto decoded = wire::read_wrench_csv(o.decoded);
  const auto reference = wire::read_wrench_csv(o.reference);
  if (decoded.empty() || reference.empty()) {
    throw Error(ErrorCode::ConfigError, "nothing to evaluate: decoded or reference series is empty");
  }
  const auto j = run_evaluate(decoded, reference, rc, o);
  write_text(dir / "eval_report.json", j.dump(2) + "\n");
  write_eval_tables(j, dir);
  out << "evaluated " << j.at("aligned_samples").get<std::size_t>() << " aligned samples\n";
  return kExitOk;
}

int cmd_report(const Options & o, std::ostream & out, std::ostream &)
{
  const fs::path in = o.input.empty() ? fs::path(o.out.value_or("ftind_out")) : fs::path(o.input);
  const fs::path dir = prepare_out(o.out ? fs::path(*o.out) : in);
  const bool has_fit = fs::exists(in / "fit_results.json");
  const bool has_eval = fs::exists(in / "eval_report.json");
  if (!has_fit && !has_eval) {
    throw Error(ErrorCode::ConfigError, "no fit_results.json or eval_report.json in " + in.string());
  }
  std::size_t written = 0;
  if (has_fit) {written += write_fit_tables(read_json_file(in / "fit_results.json"), dir).size();}
  if (has_eval) {written += write_eval_tables(read_json_file(in / "eval_report.json"), dir).size();}
  out << "wrote " << written << " report files to " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// replay

int cmd_replay(const Options & o, std::ostream & out, std::ostream & err)
{
  const auto rows = read_raw(o.input);
  std::vector<wire::RawFrame> frames;
  if (fs::path(o.input).extension() == ".bin") {
    frames = wire::read_frame_log(o.input);
  } else {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      frames.push_back(wire::make_frame(
          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(rows[k].t_us), rows[k].counts));
    }
  }
  std::ofstream file;
  std::ostream * sink = nullptr;
  if (o.sink == "stdout") {
    sink = &out;
  } else if (o.sink == "file") {
    if (!o.out) {throw Error(ErrorCode::ConfigError, "--sink file needs --out");}
    file.open(*o.out, std::ios::binary);
    if (!file) {throw Error(ErrorCode::IoError, "cannot write " + *o.out);}
    sink = &file;
  } else if (o.sink != "null") {
    throw Error(ErrorCode::ConfigError, "--sink must be stdout, file or null");
  }
  if (sink) {*sink << "seq,timestamp_us,ch0,ch1,ch2,ch3,ch4,ch5\n";}
  const auto stats = wire::replay(frames, o.rate.value_or(1000.0), [&](const wire::RawFrame & f) {
        if (!sink) {return;}
        *sink << f.seq << ',' << f.timestamp_us;
        for (const auto c : f.channels) {*sink << ',' << c;}
        *sink << '\n';
      });
  const json j = {
    {"requested_rate_hz", stats.requested_rate_hz}, {"achieved_rate_hz", stats.achieved_rate_hz},
    {"elapsed_s", stats.elapsed_s}, {"max_jitter_us", stats.max_jitter_us},
    {"emitted", stats.emitted}, {"delivered", stats.delivered}, {"dropped", stats.dropped},
    {"out_of_order", stats.out_of_order}, {"sequence_gaps", wire::sequence_gaps(frames)}};
  (o.sink == "stdout" ? err : out) << j.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// demo

int cmd_demo(const Options & o, std::ostream & out, std::ostream & err)
{
  const auto rc = resolve_run_config(o, true);
  const auto sim = simulate(rc, o.strict, err);
  const fs::path dir = rc.out_dir;
  auto files = sim.files;

  const auto & s = rc.synth.sensor;
  const auto curve = coil::response_curve(s.vertical, s.vertical_coupling_scale, s.law);
  const auto fits = fit_all(
    curve.sqrt_ratio, curve.distance, families_from("all"), "vertical_coil_response");
  write_text(dir / "fit_results.json", fits.dump(2) + "\n");
  files.push_back(describe(dir / "fit_results.json"));
  for (auto & f : write_fit_tables(fits, dir)) {files.push_back(f);}

  const auto outcome = run_calibrate(sim.data, rc, o, dir);
  files.push_back(describe(dir / "calibration.cal"));
  files.push_back(describe(dir / "calibration_report.json"));

  std::vector<wire::TimedRow> decoded, reference;
  decoded.reserve(sim.data.size());
  reference.reserve(sim.data.size());
  for (const auto & smp : sim.data) {
    decoded.push_back({smp.t_us, cal::decode(outcome.calibration, smp.counts).wrench});
    reference.push_back({smp.t_us, smp.wrench});
  }
  wire::write_wrench_csv(dir / "decoded.csv", decoded);
  files.push_back(describe(dir / "decoded.csv"));

  const auto eval = run_evaluate(decoded, reference, rc, o);
  write_text(dir / "eval_report.json", eval.dump(2) + "\n");
  files.push_back(describe(dir / "eval_report.json"));
  for (auto & f : write_eval_tables(eval, dir)) {files.push_back(f);}

  write_manifest(dir, rc, sim.data.size(), files);

  out << "demo: " << sim.data.size() << " samples at " << wire::format_double(rc.rate_hz) <<
    " Hz, seed " << rc.seed << '\n';
  for (const auto & f : fits.at("fits")) {
    out << "  fit " << f.at("family").get<std::string>() << " rmse " << num(f.at("rmse")) <<
      " r2 " << num(f.at("r2")) << '\n';
  }
  for (const auto & name : kAxisNames) {
    const auto & a = eval.at("axes").at(std::string(name));
    out << "  " << name << " max " << num(a.at("max_pct")) << " %FS, resolution " <<
      num(a.at("resolution")) << '\n';
  }
  out << "outputs in " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Inductive six-axis force/torque sensor toolkit", "ftind"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ftind 1.0.0");
  Options o;

  auto common = [&](CLI::App * sub) {
      sub->add_option("--config", o.config, "Run configuration (file or name on FTIND_CONFIG_DIR)");
      sub->add_option("--seed", o.seed, "64-bit random seed");
      sub->add_option("--out", o.out, "Output directory");
    };

  auto * sim = app.add_subcommand("simulate", "Generate a synthetic dataset from a load schedule");
  common(sim);
  sim->add_option("--rate", o.rate, "Sample rate in Hz");
  sim->add_option("--schedule", o.schedule, "Load schedule CSV (default: built-in demo)");
  sim->add_flag("--strict", o.strict, "Reject schedules outside the axis ranges");

  auto * fit = app.add_subcommand("fit", "Fit the four curve families to a coil response");
  common(fit);
  fit->add_option("--input", o.input, "Two-column CSV (x,y); default: modelled coil response");
  fit->add_option("--family", o.family,
    "polynomial4, sigmoid_sum, gaussian_mixture, rational22 or all");
  fit->add_option("--full-scale", o.full_scale, "Basis of the linearity error (default: span of y)");
  fit->add_option("--coil", o.coil, "Coil for the modelled response: vertical or horizontal");

  auto * calib = app.add_subcommand("calibrate", "Fit channel maps and the 6x7 matrix to a dataset");
  common(calib);
  calib->add_option("--input", o.input, "Dataset CSV")->required();
  calib->add_option("--max-samples", o.max_samples, "Samples used by the optimiser (0 = all)");
  calib->add_option("--zero-load-samples", o.zero_load_samples,
    "Leading unloaded samples (0 = detect)");

  auto * dec = app.add_subcommand("decode", "Turn raw counts into wrenches");
  dec->add_option("--config", o.config, "Run configuration whose geometry must match");
  dec->add_option("--calibration", o.calibration, "Calibration file")->required();
  dec->add_option("--input", o.input, "Dataset CSV or frame log (.bin)")->required();
  dec->add_option("--out", o.out, "Wrench CSV for --sink file");
  dec->add_option("--sink", o.sink, "stdout, file or null");
  dec->add_option("--rate", o.rate, "Stream through the replay source at this rate in Hz");
  dec->add_flag("--allow-geometry-mismatch", o.allow_geometry_mismatch,
    "Accept a calibration made for other coils");

  auto * ev = app.add_subcommand("evaluate", "Compare decoded wrenches with a reference");
  common(ev);
  ev->add_option("--decoded", o.decoded, "Decoded wrench CSV")->required();
  ev->add_option("--reference", o.reference, "Reference wrench CSV")->required();
  ev->add_option("--sigma-multiplier", o.sigma_multiplier, "Resolution = k * noise std");
  ev->add_flag("--strict", o.strict, "Fail when an axis has no single-axis excitation");

  auto * rep = app.add_subcommand("report", "Regenerate tables and curves from saved results");
  rep->add_option("--input", o.input, "Directory holding fit_results.json / eval_report.json");
  rep->add_option("--out", o.out, "Output directory (default: the input directory)");

  auto * rp = app.add_subcommand("replay", "Stream frames at a fixed rate");
  rp->add_option("--input", o.input, "Frame log (.bin) or dataset CSV")->required();
  rp->add_option("--rate", o.rate, "Frames per second, 1 to 4080 (default 1000)");
  rp->add_option("--sink", o.sink, "stdout, file or null");
  rp->add_option("--out", o.out, "Output file for --sink file");

  auto * demo = app.add_subcommand("demo", "Run simulate, fit, calibrate, decode and evaluate");
  common(demo);
  demo->add_option("--rate", o.rate, "Sample rate in Hz");
  demo->add_option("--sigma-multiplier", o.sigma_multiplier, "Resolution = k * noise std");
  demo->add_flag("--strict", o.strict, "Reject schedules outside the axis ranges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) {return cmd_simulate(o, out, err);}
    if (*fit) {return cmd_fit(o, out, err);}
    if (*calib) {return cmd_calibrate(o, out, err);}
    if (*dec) {return cmd_decode(o, out, err);}
    if (*ev) {return cmd_evaluate(o, out, err);}
    if (*rep) {return cmd_report(o, out, err);}
    if (*rp) {return cmd_replay(o, out, err);}
    if (*demo) {return cmd_demo(o, out, err);}
  } catch (const Error & e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ftind::cli
