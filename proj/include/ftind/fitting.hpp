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

#ifndef FTIND__FITTING_HPP_
#define FTIND__FITTING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ftind/levenberg_marquardt.hpp"

namespace ftind::fit
{

enum class Family
{
  Polynomial4,      // a0 + a1 x + ... + a4 x^4
  SigmoidSum,       // b1 / (1 + e^{-b2 (x - b3)}) + b4 / (1 + e^{-b5 (x - b6)})
  GaussianMixture,  // c1 e^{-(x - c2)^2 / (2 c3^2)} + c4 e^{-(x - c5)^2 / (2 c6^2)}
  Rational22,       // (d1 x^2 + d2 x + d3) / (d4 x^2 + d5 x + 1)
};

inline constexpr Family kAllFamilies[] = {
  Family::Polynomial4, Family::SigmoidSum, Family::GaussianMixture, Family::Rational22};

std::size_t parameter_count(Family family);
std::string_view family_name(Family family);
/// Accepts the names returned by family_name() and the short forms
/// poly4, sigmoid, gaussian, rational.
Family parse_family(std::string_view name);

/// Below this the rational denominator counts as a pole.
inline constexpr double kPoleThreshold = 1e-12;

struct FitModel
{
  Family family = Family::Polynomial4;
  std::vector<double> coefficients;

  FitModel() = default;
  /// Throws DomainError if the coefficient count does not match the family.
  FitModel(Family f, std::vector<double> c);
};

/// Throws PoleError where a rational denominator vanishes.
double evaluate(const FitModel & m, double x);

/// Analytic partial derivatives, one row per point.
Eigen::MatrixXd jacobian(const FitModel & m, std::span<const double> xs);

/// Same curve in a shifted and scaled coordinate: result(u) = m(shift + scale u).
FitModel compose_affine(const FitModel & m, double shift, double scale);

/// Rational22 only: true if the denominator has a real root in [lo, hi].
/// Other families never have poles.
bool has_pole_in(const FitModel & m, double lo, double hi);

struct FitMetrics
{
  double rmse = 0.0;
  double r_squared = 0.0;
  /// False when the data are constant (SS_tot = 0); r_squared is then NaN.
  bool r_squared_defined = true;
  double linearity_error_pct = 0.0;
};

FitMetrics fit_metrics(
  std::span<const double> ys, std::span<const double> y_hats, double full_scale);

struct FitReport
{
  double rmse = 0.0;
  double r_squared = 0.0;
  bool r_squared_defined = true;
  double linearity_error_pct = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> cost_history;
};

struct FitResult
{
  FitModel model;
  FitReport report;
};

struct FitOptions
{
  LmOptions lm{};
  /// Basis for the linearity error; defaults to the span of ys.
  std::optional<double> full_scale;
};

/// Deterministic starting point: linear least squares for the polynomial and
/// the linearised rational, data-range heuristics for the two mixtures.
FitModel initial_guess(Family family, std::span<const double> xs, std::span<const double> ys);

/// Nonlinear least squares fit. Data are put in canonical order and x is
/// mapped to [0, 1] internally; the returned coefficients are in the caller's
/// coordinates. A rational fit never keeps a pole inside [min x, max x].
FitResult fit_nls(
  Family family, std::span<const double> xs, std::span<const double> ys,
  const std::optional<FitModel> & init = std::nullopt, const FitOptions & options = {});

}  // namespace ftind::fit

#endif  // FTIND__FITTING_HPP_
