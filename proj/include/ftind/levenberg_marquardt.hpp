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

#ifndef FTIND__LEVENBERG_MARQUARDT_HPP_
#define FTIND__LEVENBERG_MARQUARDT_HPP_

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ftind::fit
{

struct LmOptions
{
  int max_iters = 200;
  /// Marquardt schedule: start, multiply on reject, divide on accept. A zero
  /// start means the first step is plain Gauss-Newton.
  double initial_lambda = 1e-3;
  double lambda_increase = 10.0;
  double lambda_decrease = 10.0;
  double max_lambda = 1e20;
  /// Converged when an accepted step lowers the cost by less than this fraction.
  double relative_cost_tolerance = 1e-12;
  /// Converged when ||J^T r||_inf drops below this.
  double gradient_tolerance = 1e-10;
  /// Converged when a step is this small relative to the parameter norm.
  double step_tolerance = 1e-14;
};

/// Sum-of-squares problem  min ||r(p)||^2.
struct LeastSquaresProblem
{
  /// Fills r; returns false when p is outside the feasible set (a pole in the
  /// domain, a non-finite value), which the solver treats as a rejected step.
  std::function<bool(const Eigen::VectorXd & p, Eigen::VectorXd & r)> residuals;
  std::function<void(const Eigen::VectorXd & p, Eigen::MatrixXd & jac)> jacobian;
};

struct LmResult
{
  Eigen::VectorXd params;
  double cost = 0.0;   // ||r||^2
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  /// Cost after the start point and after every accepted step.
  std::vector<double> cost_history;
};

/// Damped Gauss-Newton with Marquardt's diagonal scaling. Each trial step
/// solves the augmented system [J; sqrt(lambda) D] dp = [-r; 0] by QR, which
/// keeps the accuracy of the undamped step on ill-conditioned problems.
///
/// Throws NonFiniteResidual if the start point is infeasible and
/// SingularNormalEquations if no finite step exists.
LmResult levenberg_marquardt(
  const LeastSquaresProblem & problem, const Eigen::VectorXd & start,
  const LmOptions & options = {});

}  // namespace ftind::fit

#endif  // FTIND__LEVENBERG_MARQUARDT_HPP_
