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

#include "ftind/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/QR>

#include "ftind/error.hpp"

namespace ftind::fit
{

namespace
{

double rational_denominator(const std::vector<double> & d, double x)
{
  return (d[3] * x + d[4]) * x + 1.0;
}

double logistic(double z)
{
  return 1.0 / (1.0 + std::exp(-z));
}

double binomial(int n, int k)
{
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

void jacobian_row(const FitModel & m, double x, double * row)
{
  const auto & c = m.coefficients;
  switch (m.family) {
    case Family::Polynomial4: {
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
          row[k] = p;
          p *= x;
        }
        break;
      }
    case Family::SigmoidSum:
      for (int k = 0; k < 2; ++k) {
        const double amp = c[3 * k];
        const double slope = c[3 * k + 1];
        const double centre = c[3 * k + 2];
        const double s = logistic(slope * (x - centre));
        const double ds = s * (1.0 - s);
        row[3 * k] = s;
        row[3 * k + 1] = amp * ds * (x - centre);
        row[3 * k + 2] = -amp * ds * slope;
      }
      break;
    case Family::GaussianMixture:
      for (int k = 0; k < 2; ++k) {
        const double amp = c[3 * k];
        const double centre = c[3 * k + 1];
        const double width = c[3 * k + 2];
        const double dx = x - centre;
        const double g = std::exp(-dx * dx / (2.0 * width * width));
        row[3 * k] = g;
        row[3 * k + 1] = amp * g * dx / (width * width);
        row[3 * k + 2] = amp * g * dx * dx / (width * width * width);
      }
      break;
    case Family::Rational22: {
        const double den = rational_denominator(c, x);
        if (std::abs(den) < kPoleThreshold) {
          throw Error(ErrorCode::PoleError, "rational denominator vanishes at x = " + std::to_string(x));
        }
        const double num = (c[0] * x + c[1]) * x + c[2];
        const double q = num / (den * den);
        row[0] = x * x / den;
        row[1] = x / den;
        row[2] = 1.0 / den;
        row[3] = -q * x * x;
        row[4] = -q * x;
        break;
      }
  }
}

/// Linear least squares via column-pivoting QR.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd & a, const Eigen::VectorXd & b)
{
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < a.cols()) {
    throw Error(ErrorCode::DegenerateData, "design matrix is rank deficient");
  }
  return qr.solve(b);
}

double quantile_sorted(std::span<const double> sorted, double p)
{
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FitModel polynomial_seed(std::span<const double> us, std::span<const double> ys, int degree)
{
  const auto n = static_cast<Eigen::Index>(us.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(i, k) = p;
      p *= us[static_cast<std::size_t>(i)];
    }
    b(i) = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = solve_linear(a, b);
  std::vector<double> coeffs(5, 0.0);
  for (int k = 0; k <= degree; ++k) {
    coeffs[static_cast<std::size_t>(k)] = c(k);
  }
  return FitModel(Family::Polynomial4, coeffs);
}

/// Seed in the unit coordinate; us must be sorted ascending.
FitModel seed_unit(Family family, std::span<const double> us, std::span<const double> ys)
{
  const auto [y_lo, y_hi] = std::minmax_element(ys.begin(), ys.end());
  const double span = *y_hi - *y_lo;
  const double q1 = quantile_sorted(us, 1.0 / 3.0);
  const double q2 = quantile_sorted(us, 2.0 / 3.0);

  switch (family) {
    case Family::Polynomial4:
      return polynomial_seed(us, ys, 4);
    case Family::SigmoidSum: {
        const double mean_u = std::accumulate(us.begin(), us.end(), 0.0) / static_cast<double>(us.size());
        const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double cov = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i) {
          cov += (us[i] - mean_u) * (ys[i] - mean_y);
        }
        const double slope = cov < 0.0 ? -8.0 : 8.0;
        return FitModel(Family::SigmoidSum, {span / 2, slope, q1, span / 2, slope, q2});
      }
    case Family::GaussianMixture:
      return FitModel(
        Family::GaussianMixture, {span / 2, q1, 1.0 / 3.0, span / 2, q2, 1.0 / 3.0});
    case Family::Rational22: {
        // y (d4 u^2 + d5 u + 1) = d1 u^2 + d2 u + d3, linear in d.
        const auto n = static_cast<Eigen::Index>(us.size());
        Eigen::MatrixXd a(n, 5);
        Eigen::VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double u = us[static_cast<std::size_t>(i)];
          const double y = ys[static_cast<std::size_t>(i)];
          a.row(i) << u * u, u, 1.0, -u * u * y, -u * y;
          b(i) = y;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() == 5) {
          const Eigen::VectorXd d = qr.solve(b);
          FitModel m(Family::Rational22, {d(0), d(1), d(2), d(3), d(4)});
          if (d.allFinite() && !has_pole_in(m, 0.0, 1.0)) {
            return m;
          }
        }
        // Pole inside the data: restart from the pole-free quadratic.
        const auto quad = polynomial_seed(us, ys, 2);
        const auto & q = quad.coefficients;
        return FitModel(Family::Rational22, {q[2], q[1], q[0], 0.0, 0.0});
      }
  }
  throw Error(ErrorCode::DomainError, "unknown family");
}

void check_pairs(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch, "xs and ys differ in length");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw Error(ErrorCode::NonFiniteResidual, "data contain non-finite values");
    }
  }
}

struct UnitData
{
  std::vector<double> us;
  std::vector<double> ys;
  double shift = 0.0;
  double scale = 1.0;
};

/// Sorted copy with x mapped onto [0, 1].
UnitData to_unit(std::span<const double> xs, std::span<const double> ys)
{
  std::vector<std::pair<double, double>> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts[i] = {xs[i], ys[i]};
  }
  std::sort(pts.begin(), pts.end());
  UnitData out;
  out.shift = pts.front().first;
  out.scale = pts.back().first - pts.front().first;
  if (!(out.scale > 0.0)) {
    throw Error(ErrorCode::DegenerateData, "all x values are equal");
  }
  out.us.reserve(pts.size());
  out.ys.reserve(pts.size());
  for (const auto & [x, y] : pts) {
    out.us.push_back((x - out.shift) / out.scale);
    out.ys.push_back(y);
  }
  return out;
}

}  // namespace

std::size_t parameter_count(Family family)
{
  switch (family) {
    case Family::Polynomial4: return 5;
    case Family::SigmoidSum: return 6;
    case Family::GaussianMixture: return 6;
    case Family::Rational22: return 5;
  }
  return 0;
}

std::string_view family_name(Family family)
{
  switch (family) {
    case Family::Polynomial4: return "polynomial4";
    case Family::SigmoidSum: return "sigmoid_sum";
    case Family::GaussianMixture: return "gaussian_mixture";
    case Family::Rational22: return "rational22";
  }
  return "unknown";
}

Family parse_family(std::string_view name)
{
  if (name == "polynomial4" || name == "poly4" || name == "polynomial") {
    return Family::Polynomial4;
  }
  if (name == "sigmoid_sum" || name == "sigmoid") {
    return Family::SigmoidSum;
  }
  if (name == "gaussian_mixture" || name == "gaussian") {
    return Family::GaussianMixture;
  }
  if (name == "rational22" || name == "rational") {
    return Family::Rational22;
  }
  throw Error(ErrorCode::ConfigError, "unknown fit family '" + std::string(name) + "'");
}

FitModel::FitModel(Family f, std::vector<double> c)
: family(f), coefficients(std::move(c))
{
  if (coefficients.size() != parameter_count(family)) {
    throw Error(
      ErrorCode::DomainError,
      std::string(family_name(family)) + " takes " + std::to_string(parameter_count(family)) +
      " coefficients, got " + std::to_string(coefficients.size()));
  }
}

double evaluate(const FitModel & m, double x)
{
  const auto & c = m.coefficients;
  switch (m.family) {
    case Family::Polynomial4:
      return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
    case Family::SigmoidSum:
      return c[0] * logistic(c[1] * (x - c[2])) + c[3] * logistic(c[4] * (x - c[5]));
    case Family::GaussianMixture: {
        const double d1 = x - c[1];
        const double d2 = x - c[4];
        return c[0] * std::exp(-d1 * d1 / (2.0 * c[2] * c[2])) +
               c[3] * std::exp(-d2 * d2 / (2.0 * c[5] * c[5]));
      }
    case Family::Rational22: {
        const double den = rational_denominator(c, x);
        if (std::abs(den) < kPoleThreshold) {
          throw Error(ErrorCode::PoleError, "rational denominator vanishes at x = " + std::to_string(x));
        }
        return ((c[0] * x + c[1]) * x + c[2]) / den;
      }
  }
  return 0.0;
}

Eigen::MatrixXd jacobian(const FitModel & m, std::span<const double> xs)
{
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto p = static_cast<Eigen::Index>(parameter_count(m.family));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> jac(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    jacobian_row(m, xs[static_cast<std::size_t>(i)], jac.row(i).data());
  }
  return jac;
}

FitModel compose_affine(const FitModel & m, double shift, double scale)
{
  const auto & c = m.coefficients;
  switch (m.family) {
    case Family::Polynomial4: {
        std::vector<double> out(5, 0.0);
        for (int k = 0; k < 5; ++k) {
          for (int j = 0; j <= k; ++j) {
            out[static_cast<std::size_t>(j)] +=
              c[static_cast<std::size_t>(k)] * binomial(k, j) * std::pow(shift, k - j) *
              std::pow(scale, j);
          }
        }
        return FitModel(Family::Polynomial4, out);
      }
    case Family::SigmoidSum:
      return FitModel(
        Family::SigmoidSum,
        {c[0], c[1] * scale, (c[2] - shift) / scale, c[3], c[4] * scale, (c[5] - shift) / scale});
    case Family::GaussianMixture:
      return FitModel(
        Family::GaussianMixture,
        {c[0], (c[1] - shift) / scale, c[2] / scale, c[3], (c[4] - shift) / scale, c[5] / scale});
    case Family::Rational22: {
        const double norm = rational_denominator(c, shift);
        if (std::abs(norm) < kPoleThreshold) {
          throw Error(ErrorCode::PoleError, "affine change of variable lands on a pole");
        }
        const double s = shift;
        const double k = scale;
        return FitModel(
          Family::Rational22, {
            c[0] * k * k / norm,
            (2.0 * c[0] * s + c[1]) * k / norm,
            ((c[0] * s + c[1]) * s + c[2]) / norm,
            c[3] * k * k / norm,
            (2.0 * c[3] * s + c[4]) * k / norm});
      }
  }
  return m;
}

bool has_pole_in(const FitModel & m, double lo, double hi)
{
  if (m.family != Family::Rational22) {
    return false;
  }
  const auto & c = m.coefficients;
  const double a = c[3];
  const double b = c[4];
  if (std::abs(rational_denominator(c, lo)) < kPoleThreshold ||
    std::abs(rational_denominator(c, hi)) < kPoleThreshold)
  {
    return true;
  }
  // A sign change between the ends means a root inside.
  if ((rational_denominator(c, lo) > 0.0) != (rational_denominator(c, hi) > 0.0)) {
    return true;
  }
  // Same sign at both ends: only a vertex dipping through zero can hide a pair.
  if (a == 0.0) {
    return false;
  }
  const double vertex = -b / (2.0 * a);
  if (vertex <= lo || vertex >= hi) {
    return false;
  }
  const double at_vertex = rational_denominator(c, vertex);
  return std::abs(at_vertex) < kPoleThreshold ||
         (at_vertex > 0.0) != (rational_denominator(c, lo) > 0.0);
}

FitMetrics fit_metrics(
  std::span<const double> ys, std::span<const double> y_hats, double full_scale)
{
  if (ys.size() != y_hats.size()) {
    throw Error(ErrorCode::LengthMismatch, "ys and y_hats differ in length");
  }
  if (ys.size() < 2) {
    throw Error(ErrorCode::DegenerateData, "need at least two points");
  }
  if (!(full_scale > 0.0)) {
    throw Error(ErrorCode::DomainError, "full scale must be > 0");
  }
  const double n = static_cast<double>(ys.size());
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double e = ys[i] - y_hats[i];
    ss_res += e * e;
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
    max_abs = std::max(max_abs, std::abs(e));
  }
  FitMetrics out;
  out.rmse = std::sqrt(ss_res / n);
  out.linearity_error_pct = 100.0 * max_abs / full_scale;
  if (ss_tot > 0.0) {
    out.r_squared = 1.0 - ss_res / ss_tot;
  } else {
    out.r_squared_defined = false;
    out.r_squared = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

FitModel initial_guess(Family family, std::span<const double> xs, std::span<const double> ys)
{
  check_pairs(xs, ys);
  if (xs.size() < parameter_count(family)) {
    throw Error(ErrorCode::DegenerateData, "fewer points than coefficients");
  }
  const auto unit = to_unit(xs, ys);
  const auto seed = seed_unit(family, unit.us, unit.ys);
  return compose_affine(seed, -unit.shift / unit.scale, 1.0 / unit.scale);
}

FitResult fit_nls(
  Family family, std::span<const double> xs, std::span<const double> ys,
  const std::optional<FitModel> & init, const FitOptions & options)
{
  check_pairs(xs, ys);
  const std::size_t n_coeffs = parameter_count(family);
  if (xs.size() < n_coeffs) {
    throw Error(ErrorCode::DegenerateData, "fewer points than coefficients");
  }
  if (init && init->family != family) {
    throw Error(ErrorCode::DomainError, "initial model belongs to another family");
  }
  const auto unit = to_unit(xs, ys);

  FitModel start = init ? compose_affine(*init, unit.shift, unit.scale) :
    seed_unit(family, unit.us, unit.ys);
  for (double v : start.coefficients) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteResidual, "initial coefficients are not finite");
    }
  }
  if (has_pole_in(start, 0.0, 1.0)) {
    start = seed_unit(family, unit.us, unit.ys);
  }

  const auto n = static_cast<Eigen::Index>(unit.us.size());
  FitModel work(family, start.coefficients);
  LeastSquaresProblem problem;
  problem.residuals = [&](const Eigen::VectorXd & p, Eigen::VectorXd & r) {
      std::copy(p.data(), p.data() + p.size(), work.coefficients.begin());
      if (has_pole_in(work, 0.0, 1.0)) {
        return false;
      }
      r.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        r(i) = evaluate(work, unit.us[k]) - unit.ys[k];
      }
      return true;
    };
  problem.jacobian = [&](const Eigen::VectorXd & p, Eigen::MatrixXd & jac) {
      std::copy(p.data(), p.data() + p.size(), work.coefficients.begin());
      jac = jacobian(work, unit.us);
    };

  const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(
    start.coefficients.data(), static_cast<Eigen::Index>(n_coeffs));
  const LmResult lm = levenberg_marquardt(problem, p0, options.lm);

  const FitModel unit_model(family, std::vector<double>(lm.params.data(), lm.params.data() + lm.params.size()));
  FitResult out;
  out.model = compose_affine(unit_model, -unit.shift / unit.scale, 1.0 / unit.scale);

  std::vector<double> y_hat(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    y_hat[i] = evaluate(out.model, xs[i]);
  }
  const auto [y_lo, y_hi] = std::minmax_element(ys.begin(), ys.end());
  double full_scale = options.full_scale.value_or(*y_hi - *y_lo);
  if (!(full_scale > 0.0)) {
    full_scale = 1.0;
  }
  const auto metrics = fit_metrics(ys, y_hat, full_scale);
  out.report.rmse = metrics.rmse;
  out.report.r_squared = metrics.r_squared;
  out.report.r_squared_defined = metrics.r_squared_defined;
  out.report.linearity_error_pct = metrics.linearity_error_pct;
  out.report.iterations = lm.iterations;
  out.report.converged = lm.converged;
  out.report.stop_reason = lm.stop_reason;
  out.report.cost_history = lm.cost_history;
  return out;
}

}  // namespace ftind::fit
