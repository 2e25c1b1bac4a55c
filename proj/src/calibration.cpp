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

#include "ftind/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "ftind/error.hpp"
#include "ftind/hash.hpp"
#include "json.hpp"

namespace ftind::cal
{

namespace
{

using nlohmann::json;

constexpr std::string_view kMagic = "FTIND-CALIBRATION";
constexpr int kFormatVersion = 1;
constexpr std::size_t kGaugedParams = 3;   // d1, d4, d5 per channel
constexpr std::size_t kMapParams = kGaugedParams * kChannels;
constexpr std::size_t kParams = kMapParams + kAxes * 7;

// Channel map with y(u0) = 0 and y'(u0) = 1:
//   y(u) = (d1 (u - u0)^2 + D(u0) (u - u0)) / D(u),  D(u) = d4 u^2 + d5 u + 1.
struct GaugedMap
{
  double d1 = 0.0;
  double d4 = 0.0;
  double d5 = 0.0;

  double denominator(double u) const {return (d4 * u + d5) * u + 1.0;}

  std::vector<double> full(double u0) const
  {
    const double d0 = denominator(u0);
    return {d1, d0 - 2.0 * d1 * u0, d1 * u0 * u0 - d0 * u0, d4, d5};
  }
};

// Re-expresses an arbitrary rational in the gauge. y_old = c + s y_new.
std::optional<GaugedMap> regauge(const std::vector<double> & d, double u0, double & c, double & s)
{
  const double n = (d[0] * u0 + d[1]) * u0 + d[2];
  const double dn = 2.0 * d[0] * u0 + d[1];
  const double den = (d[3] * u0 + d[4]) * u0 + 1.0;
  const double dden = 2.0 * d[3] * u0 + d[4];
  if (std::abs(den) < fit::kPoleThreshold) {return std::nullopt;}
  c = n / den;
  s = (dn * den - n * dden) / (den * den);
  if (!std::isfinite(s) || std::abs(s) < 1e-9) {return std::nullopt;}
  return GaugedMap{(d[0] - c * d[3]) / s, d[3], d[4]};
}

bool pole_free(const GaugedMap & g, double u0, double margin)
{
  return !fit::has_pole_in(
    fit::FitModel(fit::Family::Rational22, g.full(u0)), -margin, 1.0 + margin);
}

std::array<GaugedMap, kChannels> maps_from(const Eigen::VectorXd & p)
{
  std::array<GaugedMap, kChannels> m;
  for (std::size_t i = 0; i < kChannels; ++i) {
    m[i] = {p[kGaugedParams * i], p[kGaugedParams * i + 1], p[kGaugedParams * i + 2]};
  }
  return m;
}

MatrixA matrix_from(const Eigen::VectorXd & p)
{
  MatrixA a;
  for (std::size_t r = 0; r < kAxes; ++r) {
    for (std::size_t c = 0; c < 7; ++c) {a(r, c) = p[kMapParams + 7 * r + c];}
  }
  return a;
}

double median(std::vector<double> v)
{
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) {return *mid;}
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

// Least squares A with F ~ A [y; 1], rows independent.
MatrixA solve_matrix(const Eigen::MatrixXd & y7, const Eigen::MatrixXd & f)
{
  const Eigen::MatrixXd at = y7.colPivHouseholderQr().solve(f);
  return at.transpose();
}

Eigen::MatrixXd design(
  const std::array<GaugedMap, kChannels> & maps, const std::array<double, kChannels> & u0,
  const Eigen::MatrixXd & u)
{
  Eigen::MatrixXd y7(u.rows(), 7);
  for (Eigen::Index s = 0; s < u.rows(); ++s) {
    for (std::size_t i = 0; i < kChannels; ++i) {
      const auto & g = maps[i];
      const double x = u(s, static_cast<Eigen::Index>(i));
      const double dx = x - u0[i];
      y7(s, static_cast<Eigen::Index>(i)) =
        (g.d1 * dx * dx + g.denominator(u0[i]) * dx) / g.denominator(x);
    }
    y7(s, 6) = 1.0;
  }
  return y7;
}

}  // namespace

void Calibration::validate() const
{
  if (!matrix_a.allFinite()) {
    throw Error(ErrorCode::DomainError, "calibration matrix has non-finite entries");
  }
  if (Eigen::ColPivHouseholderQR<MatrixA>(matrix_a).rank() < 6) {
    throw Error(ErrorCode::DomainError, "calibration matrix is not of full row rank");
  }
  for (std::size_t i = 0; i < kChannels; ++i) {
    const auto & n = raw_scale[i];
    if (!std::isfinite(n.offset) || !std::isfinite(n.scale) || n.scale == 0.0) {
      throw Error(ErrorCode::DomainError, "channel " + std::to_string(i) + " has a bad scale");
    }
    if (!(raw_min[i] <= raw_max[i])) {
      throw Error(ErrorCode::DomainError, "channel " + std::to_string(i) + " has an empty range");
    }
    const double a = n.apply(raw_min[i]);
    const double b = n.apply(raw_max[i]);
    if (fit::has_pole_in(channel_maps[i], std::min(a, b), std::max(a, b))) {
      throw Error(
        ErrorCode::PoleError,
        "channel " + std::to_string(i) + " map has a pole in the calibrated range");
    }
  }
}

std::array<double, kChannels> deformation(
  const Calibration & c, const std::array<double, kChannels> & raw)
{
  std::array<double, kChannels> y{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    y[i] = fit::evaluate(c.channel_maps[i], c.raw_scale[i].apply(raw[i]));
  }
  return y;
}

DecodeResult decode(const Calibration & c, const std::array<double, kChannels> & raw)
{
  const auto y = deformation(c, raw);
  DecodeResult out;
  for (std::size_t a = 0; a < kAxes; ++a) {
    double f = c.matrix_a(static_cast<Eigen::Index>(a), 6);
    for (std::size_t i = 0; i < kChannels; ++i) {
      f += c.matrix_a(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) * y[i];
    }
    out.wrench[a] = f;
  }
  for (std::size_t i = 0; i < kChannels; ++i) {
    if (raw[i] < c.raw_min[i] || raw[i] > c.raw_max[i]) {out.extrapolated = true;}
  }
  return out;
}

DecodeResult decode(const Calibration & c, const RawCounts & raw)
{
  std::array<double, kChannels> x{};
  for (std::size_t i = 0; i < kChannels; ++i) {x[i] = static_cast<double>(raw[i]);}
  return decode(c, x);
}

Calibration identity_calibration()
{
  Calibration c;
  for (std::size_t i = 0; i < kChannels; ++i) {
    c.channel_maps[i] = fit::FitModel(fit::Family::Rational22, {0.0, 1.0, 0.0, 0.0, 0.0});
    c.raw_scale[i] = {0.0, 1.0};
    c.raw_min[i] = 0.0;
    c.raw_max[i] = static_cast<double>(kMaxCount);
  }
  c.matrix_a.leftCols<6>().setIdentity();
  return c;
}

std::array<double, kChannels> raw_for_wrench(
  const Calibration & c, const Wrench & w, double margin)
{
  const Eigen::Matrix<double, 6, 6> a6 = c.matrix_a.leftCols<6>();
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(a6);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::DomainError, "calibration matrix cannot be inverted");
  }
  Eigen::Matrix<double, 6, 1> f;
  for (std::size_t k = 0; k < kAxes; ++k) {f[static_cast<Eigen::Index>(k)] = w[k];}
  const Eigen::Matrix<double, 6, 1> y = lu.solve(f - c.matrix_a.col(6));

  std::array<double, kChannels> raw{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    const auto & n = c.raw_scale[i];
    const double ua = n.apply(c.raw_min[i]), ub = n.apply(c.raw_max[i]);
    const double lo = std::min(ua, ub) - margin, hi = std::max(ua, ub) + margin;
    const double yi = y[static_cast<Eigen::Index>(i)];
    const auto & m = c.channel_maps[i];
    // Brackets a sign change of m(u) - y on a fine grid, then bisects.
    constexpr int kGrid = 256;
    auto g = [&](double u) {return fit::evaluate(m, u) - yi;};
    std::optional<double> root;
    double u_prev = lo, g_prev = g(lo);
    for (int k = 1; k <= kGrid && !root; ++k) {
      const double u_k = lo + (hi - lo) * k / kGrid;
      const double g_k = g(u_k);
      if (g_prev == 0.0) {
        root = u_prev;
      } else if ((g_prev < 0.0) != (g_k < 0.0) || g_k == 0.0) {
        double a = u_prev, b = u_k, ga = g_prev;
        for (int it = 0; it < 200 && b - a > 0.0; ++it) {
          const double mid = 0.5 * (a + b);
          if (mid <= a || mid >= b) {break;}
          const double gm = g(mid);
          if ((gm < 0.0) == (ga < 0.0)) {a = mid; ga = gm;} else {b = mid;}
        }
        root = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
      }
      u_prev = u_k;
      g_prev = g_k;
    }
    if (!root) {
      throw Error(
        ErrorCode::DomainError, "channel " + std::to_string(i) + " cannot reach the wrench");
    }
    raw[i] = n.offset + n.scale * *root;
  }
  return raw;
}

CalReport assess(const Calibration & c, const Dataset & data, const AxisRanges & ranges)
{
  if (data.empty()) {throw Error(ErrorCode::DegenerateData, "no samples to assess");}
  CalReport rep;
  rep.samples = data.size();
  std::array<double, kAxes> sq{}, sum_pct{}, max_pct{};
  double total = 0.0;
  for (const auto & s : data) {
    const auto w = decode(c, s.counts).wrench;
    for (std::size_t a = 0; a < kAxes; ++a) {
      const double e = w[a] - s.wrench[a];
      const double pct = 100.0 * std::abs(e) / ranges[a];
      sq[a] += e * e;
      sum_pct[a] += pct;
      max_pct[a] = std::max(max_pct[a], pct);
      total += (e / ranges[a]) * (e / ranges[a]);
    }
  }
  const auto n = static_cast<double>(data.size());
  for (std::size_t a = 0; a < kAxes; ++a) {
    rep.axes[a] = {std::sqrt(sq[a] / n), sum_pct[a] / n, max_pct[a]};
  }
  rep.normalized_rmse = std::sqrt(total / (n * kAxes));
  return rep;
}

CalibrationOutcome calibrate(const Dataset & data, const CalibrationOptions & opt)
{
  opt.ranges.validate();
  if (data.size() < 2 * kParams / kAxes) {
    throw Error(ErrorCode::DegenerateData, "too few samples to calibrate");
  }

  std::string weak;
  for (std::size_t a = 0; a < kAxes; ++a) {
    double lo = data[0].wrench[a], hi = lo;
    for (const auto & s : data) {
      lo = std::min(lo, s.wrench[a]);
      hi = std::max(hi, s.wrench[a]);
    }
    if (hi - lo < opt.min_excitation_fraction * opt.ranges[a]) {
      weak += (weak.empty() ? "" : ",") + std::string(kAxisNames[a]);
    }
  }
  if (!weak.empty()) {
    throw Error(ErrorCode::InsufficientExcitation, "axes not swept: " + weak);
  }

  Calibration cal;
  cal.geometry_hash = opt.geometry_hash;
  for (std::size_t i = 0; i < kChannels; ++i) {
    double lo = data[0].counts[i], hi = lo;
    for (const auto & s : data) {
      lo = std::min<double>(lo, s.counts[i]);
      hi = std::max<double>(hi, s.counts[i]);
    }
    if (hi <= lo) {
      throw Error(
        ErrorCode::InsufficientExcitation, "channel " + std::to_string(i) + " never changes");
    }
    cal.raw_min[i] = lo;
    cal.raw_max[i] = hi;
    cal.raw_scale[i] = {lo, hi - lo};
  }

  // Zero-load reading: leading unloaded segment, else the least loaded sample.
  std::size_t zero_n = opt.zero_load_samples;
  if (zero_n > data.size()) {
    throw Error(ErrorCode::DomainError, "zero-load segment longer than the data");
  }
  if (zero_n == 0) {
    auto quiet = [&](const Sample & s) {
        for (std::size_t a = 0; a < kAxes; ++a) {
          if (std::abs(s.wrench[a]) > 2e-3 * opt.ranges[a]) {return false;}
        }
        return true;
      };
    while (zero_n < data.size() && quiet(data[zero_n])) {++zero_n;}
  }
  std::array<double, kChannels> zero_raw{};
  if (zero_n > 0) {
    for (std::size_t i = 0; i < kChannels; ++i) {
      std::vector<double> v(zero_n);
      for (std::size_t k = 0; k < zero_n; ++k) {v[k] = data[k].counts[i];}
      zero_raw[i] = median(std::move(v));
    }
  } else {
    std::size_t best = 0;
    double best_norm = INFINITY;
    for (std::size_t k = 0; k < data.size(); ++k) {
      double n = 0.0;
      for (std::size_t a = 0; a < kAxes; ++a) {
        n += std::pow(data[k].wrench[a] / opt.ranges[a], 2);
      }
      if (n < best_norm) {best_norm = n; best = k;}
    }
    for (std::size_t i = 0; i < kChannels; ++i) {zero_raw[i] = data[best].counts[i];}
  }
  std::array<double, kChannels> u0{};
  for (std::size_t i = 0; i < kChannels; ++i) {u0[i] = cal.raw_scale[i].apply(zero_raw[i]);}

  // Evenly strided working set.
  const std::size_t stride = (opt.max_samples == 0 || data.size() <= opt.max_samples) ?
    1 : (data.size() + opt.max_samples - 1) / opt.max_samples;
  const auto rows = static_cast<Eigen::Index>((data.size() + stride - 1) / stride);
  Eigen::MatrixXd u(rows, kChannels), f(rows, kAxes);
  for (Eigen::Index s = 0; s < rows; ++s) {
    const auto & smp = data[static_cast<std::size_t>(s) * stride];
    for (std::size_t i = 0; i < kChannels; ++i) {
      u(s, static_cast<Eigen::Index>(i)) = cal.raw_scale[i].apply(smp.counts[i]);
      f(s, static_cast<Eigen::Index>(i)) = smp.wrench[i];
    }
  }

  // Alternating seed.
  std::array<GaugedMap, kChannels> maps{};
  MatrixA a = solve_matrix(design(maps, u0, u), f);
  for (int round = 0; round < opt.alternating_rounds; ++round) {
    const Eigen::Matrix<double, 6, 6> a6 = a.leftCols<6>();
    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(a6);
    if (!lu.isInvertible()) {break;}
    const Eigen::MatrixXd target =
      lu.solve((f.rowwise() - a.col(6).transpose()).transpose()).transpose();
    for (std::size_t i = 0; i < kChannels; ++i) {
      const auto ci = static_cast<Eigen::Index>(i);
      std::vector<double> xs(u.col(ci).data(), u.col(ci).data() + rows);
      std::vector<double> ys(target.col(ci).data(), target.col(ci).data() + rows);
      try {
        const auto r = fit::fit_nls(
          fit::Family::Rational22, xs, ys,
          fit::FitModel(fit::Family::Rational22, maps[i].full(u0[i])));
        double c = 0.0, s = 1.0;
        const auto g = regauge(r.model.coefficients, u0[i], c, s);
        if (g && pole_free(*g, u0[i], opt.pole_margin)) {maps[i] = *g;}
      } catch (const Error &) {
        // keep the previous map for this channel
      }
    }
    a = solve_matrix(design(maps, u0, u), f);
  }

  std::array<double, kAxes> w{};
  for (std::size_t k = 0; k < kAxes; ++k) {w[k] = 1.0 / opt.ranges[k];}

  fit::LeastSquaresProblem prob;
  prob.residuals = [&](const Eigen::VectorXd & p, Eigen::VectorXd & r) {
      const auto m = maps_from(p);
      for (std::size_t i = 0; i < kChannels; ++i) {
        if (!pole_free(m[i], u0[i], opt.pole_margin)) {return false;}
      }
      const MatrixA am = matrix_from(p);
      const Eigen::MatrixXd e = design(m, u0, u) * am.transpose() - f;
      r.resize(rows * static_cast<Eigen::Index>(kAxes));
      for (Eigen::Index s = 0; s < rows; ++s) {
        for (std::size_t k = 0; k < kAxes; ++k) {
          r[s * static_cast<Eigen::Index>(kAxes) + static_cast<Eigen::Index>(k)] =
            w[k] * e(s, static_cast<Eigen::Index>(k));
        }
      }
      return r.allFinite();
    };
  prob.jacobian = [&](const Eigen::VectorXd & p, Eigen::MatrixXd & jac) {
      const auto m = maps_from(p);
      const MatrixA am = matrix_from(p);
      const Eigen::MatrixXd y7 = design(m, u0, u);
      jac.setZero(rows * static_cast<Eigen::Index>(kAxes), static_cast<Eigen::Index>(kParams));
      for (Eigen::Index s = 0; s < rows; ++s) {
        std::array<std::array<double, kGaugedParams>, kChannels> dy{};
        for (std::size_t i = 0; i < kChannels; ++i) {
          const auto & g = m[i];
          const double x = u(s, static_cast<Eigen::Index>(i));
          const double dx = x - u0[i];
          const double den = g.denominator(x);
          const double num = g.d1 * dx * dx + g.denominator(u0[i]) * dx;
          dy[i] = {
            dx * dx / den,
            u0[i] * u0[i] * dx / den - num * x * x / (den * den),
            u0[i] * dx / den - num * x / (den * den)};
        }
        for (std::size_t k = 0; k < kAxes; ++k) {
          const Eigen::Index row = s * static_cast<Eigen::Index>(kAxes) +
            static_cast<Eigen::Index>(k);
          for (std::size_t i = 0; i < kChannels; ++i) {
            const double aki = am(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
            for (std::size_t q = 0; q < kGaugedParams; ++q) {
              jac(row, static_cast<Eigen::Index>(kGaugedParams * i + q)) = w[k] * aki * dy[i][q];
            }
          }
          for (Eigen::Index c = 0; c < 7; ++c) {
            jac(row, static_cast<Eigen::Index>(kMapParams + 7 * k) + c) = w[k] * y7(s, c);
          }
        }
      }
    };

  Eigen::VectorXd p0(static_cast<Eigen::Index>(kParams));
  for (std::size_t i = 0; i < kChannels; ++i) {
    p0[kGaugedParams * i] = maps[i].d1;
    p0[kGaugedParams * i + 1] = maps[i].d4;
    p0[kGaugedParams * i + 2] = maps[i].d5;
  }
  for (std::size_t r = 0; r < kAxes; ++r) {
    for (std::size_t c = 0; c < 7; ++c) {
      p0[kMapParams + 7 * r + c] = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  fit::LmResult lm;
  if (opt.joint_refinement) {
    lm = fit::levenberg_marquardt(prob, p0, opt.lm);
  } else {
    lm.params = p0;
    lm.stop_reason = "alternating seed only";
  }

  const auto final_maps = maps_from(lm.params);
  for (std::size_t i = 0; i < kChannels; ++i) {
    cal.channel_maps[i] = fit::FitModel(fit::Family::Rational22, final_maps[i].full(u0[i]));
  }
  cal.matrix_a = matrix_from(lm.params);
  cal.validate();

  CalibrationOutcome out{cal, assess(cal, data, opt.ranges)};
  out.report.iterations = lm.iterations;
  out.report.converged = lm.converged;
  out.report.stop_reason = lm.stop_reason;
  out.report.samples_used = static_cast<std::size_t>(rows);
  out.report.zero_load_raw = zero_raw;
  return out;
}

std::string geometry_hash(const std::vector<coil::CoilGeometry> & geometries)
{
  json j = json::array();
  for (const auto & g : geometries) {j.push_back(g);}
  return hex64(fnv1a64(j.dump()));
}

void save_calibration(const Calibration & c, const std::filesystem::path & path)
{
  c.validate();
  json body;
  body["channel_maps"] = json::array();
  for (const auto & m : c.channel_maps) {
    body["channel_maps"].push_back(
      {{"family", fit::family_name(m.family)}, {"coefficients", m.coefficients}});
  }
  json a = json::array();
  for (Eigen::Index r = 0; r < 6; ++r) {
    std::vector<double> row(7);
    for (Eigen::Index k = 0; k < 7; ++k) {row[static_cast<std::size_t>(k)] = c.matrix_a(r, k);}
    a.push_back(row);
  }
  body["matrix_a"] = a;
  std::array<double, kChannels> off{}, scl{};
  for (std::size_t i = 0; i < kChannels; ++i) {
    off[i] = c.raw_scale[i].offset;
    scl[i] = c.raw_scale[i].scale;
  }
  body["raw_offset"] = off;
  body["raw_scale"] = scl;
  body["raw_min"] = c.raw_min;
  body["raw_max"] = c.raw_max;
  const std::string text = body.dump(2) + "\n";

  std::ofstream os(path, std::ios::binary);
  if (!os) {throw Error(ErrorCode::IoError, "cannot write " + path.string());}
  os << kMagic << ' ' << kFormatVersion << '\n'
     << "geometry " << (c.geometry_hash.empty() ? "-" : c.geometry_hash) << '\n'
     << "checksum " << hex64(fnv1a64(text)) << '\n'
     << text;
  if (!os) {throw Error(ErrorCode::IoError, "write failed for " + path.string());}
}

Calibration load_calibration(
  const std::filesystem::path & path, const std::optional<std::string> & expected,
  bool allow_geometry_mismatch)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {throw Error(ErrorCode::IoError, "cannot read " + path.string());}
  std::string magic_line, geometry_line, checksum_line;
  if (!std::getline(is, magic_line) || !std::getline(is, geometry_line) ||
    !std::getline(is, checksum_line))
  {
    throw Error(ErrorCode::ChecksumError, "truncated calibration header");
  }
  std::istringstream ms(magic_line);
  std::string magic;
  int version = 0;
  if (!(ms >> magic >> version) || magic != kMagic) {
    throw Error(ErrorCode::ChecksumError, "not a calibration file");
  }
  if (version != kFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "unsupported format version " + std::to_string(version));
  }
  const std::string geo_prefix = "geometry ", sum_prefix = "checksum ";
  if (geometry_line.rfind(geo_prefix, 0) != 0 || checksum_line.rfind(sum_prefix, 0) != 0) {
    throw Error(ErrorCode::ChecksumError, "malformed calibration header");
  }
  std::string geometry = geometry_line.substr(geo_prefix.size());
  if (geometry == "-") {geometry.clear();}
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  if (checksum_line.substr(sum_prefix.size()) != hex64(fnv1a64(text))) {
    throw Error(ErrorCode::ChecksumError, "calibration body does not match its checksum");
  }
  if (expected && *expected != geometry && !allow_geometry_mismatch) {
    throw Error(
      ErrorCode::VersionMismatch,
      "calibration belongs to geometry " + geometry + ", expected " + *expected);
  }

  Calibration c;
  c.geometry_hash = geometry;
  try {
    const json body = json::parse(text);
    const auto & maps = body.at("channel_maps");
    const auto & a = body.at("matrix_a");
    if (maps.size() != kChannels || a.size() != kAxes) {
      throw Error(ErrorCode::ChecksumError, "calibration body has wrong dimensions");
    }
    for (std::size_t i = 0; i < kChannels; ++i) {
      c.channel_maps[i] = fit::FitModel(
        fit::parse_family(maps[i].at("family").get<std::string>()),
        maps[i].at("coefficients").get<std::vector<double>>());
      const auto row = a[i].get<std::vector<double>>();
      if (row.size() != 7) {
        throw Error(ErrorCode::ChecksumError, "calibration matrix row has wrong length");
      }
      for (std::size_t k = 0; k < 7; ++k) {
        c.matrix_a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
      }
    }
    const auto off = body.at("raw_offset").get<std::array<double, kChannels>>();
    const auto scl = body.at("raw_scale").get<std::array<double, kChannels>>();
    for (std::size_t i = 0; i < kChannels; ++i) {c.raw_scale[i] = {off[i], scl[i]};}
    c.raw_min = body.at("raw_min").get<std::array<double, kChannels>>();
    c.raw_max = body.at("raw_max").get<std::array<double, kChannels>>();
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::ChecksumError, std::string("calibration body unreadable: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace ftind::cal
