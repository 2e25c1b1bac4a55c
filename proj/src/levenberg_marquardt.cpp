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

#include "ftind/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "ftind/error.hpp"

namespace ftind::fit
{

namespace
{

bool evaluate_feasible(
  const LeastSquaresProblem & problem, const Eigen::VectorXd & p, Eigen::VectorXd & r)
{
  if (!p.allFinite()) {
    return false;
  }
  return problem.residuals(p, r) && r.allFinite();
}

}  // namespace

LmResult levenberg_marquardt(
  const LeastSquaresProblem & problem, const Eigen::VectorXd & start,
  const LmOptions & options)
{
  LmResult result;
  result.params = start;

  Eigen::VectorXd r;
  if (!evaluate_feasible(problem, result.params, r)) {
    throw Error(ErrorCode::NonFiniteResidual, "start point gives non-finite residuals");
  }
  const Eigen::Index n = start.size();
  const Eigen::Index m = r.size();
  result.cost = r.squaredNorm();
  result.cost_history.push_back(result.cost);

  double lambda = options.initial_lambda;
  Eigen::VectorXd scale_sq = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd jac(m, n);
  Eigen::MatrixXd augmented(m + n, n);
  Eigen::VectorXd rhs(m + n);
  Eigen::VectorXd r_trial(m);

  if (result.cost == 0.0) {
    result.converged = true;
    result.stop_reason = "zero residual";
    return result;
  }

  for (int iter = 0; iter < options.max_iters; ++iter) {
    problem.jacobian(result.params, jac);
    if (!jac.allFinite()) {
      throw Error(ErrorCode::NonFiniteResidual, "jacobian is not finite");
    }
    const Eigen::VectorXd gradient = jac.transpose() * r;
    if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      result.stop_reason = "gradient tolerance";
      break;
    }
    // Running maximum of the column norms (Moré's scaling).
    const Eigen::VectorXd col_sq = jac.colwise().squaredNorm().transpose();
    scale_sq = scale_sq.cwiseMax(col_sq);
    const double floor = std::max(scale_sq.maxCoeff() * 1e-12, std::numeric_limits<double>::min());
    if (!(scale_sq.maxCoeff() > 0.0)) {
      throw Error(ErrorCode::SingularNormalEquations, "jacobian is identically zero");
    }

    bool accepted = false;
    bool stop = false;
    while (!accepted && !stop) {
      augmented.topRows(m) = jac;
      rhs.head(m) = -r;
      rhs.tail(n).setZero();
      augmented.bottomRows(n).setZero();
      if (lambda > 0.0) {
        for (Eigen::Index j = 0; j < n; ++j) {
          augmented(m + j, j) = std::sqrt(lambda * std::max(scale_sq(j), floor));
        }
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(augmented);
      if (lambda == 0.0 && qr.rank() < n) {
        // Undamped step undefined: fall back onto the damped schedule.
        lambda = options.initial_lambda > 0.0 ? options.initial_lambda : 1e-3;
        continue;
      }
      const Eigen::VectorXd step = qr.solve(rhs);
      if (!step.allFinite()) {
        throw Error(ErrorCode::SingularNormalEquations, "damped normal equations are singular");
      }
      const Eigen::VectorXd trial = result.params + step;
      const bool tiny_step =
        step.norm() <= options.step_tolerance * (result.params.norm() + options.step_tolerance);

      if (evaluate_feasible(problem, trial, r_trial)) {
        const double trial_cost = r_trial.squaredNorm();
        if (trial_cost < result.cost) {
          const double relative_decrease = (result.cost - trial_cost) / result.cost;
          result.params = trial;
          r = r_trial;
          result.cost = trial_cost;
          result.cost_history.push_back(trial_cost);
          lambda /= options.lambda_decrease;
          accepted = true;
          if (trial_cost == 0.0) {
            result.converged = true;
            result.stop_reason = "zero residual";
            stop = true;
          } else if (relative_decrease < options.relative_cost_tolerance) {
            result.converged = true;
            result.stop_reason = "relative cost tolerance";
            stop = true;
          } else if (tiny_step) {
            result.converged = true;
            result.stop_reason = "step tolerance";
            stop = true;
          }
          continue;
        }
      }
      if (tiny_step) {
        result.converged = true;
        result.stop_reason = "step tolerance";
        stop = true;
        break;
      }
      lambda = lambda > 0.0 ? lambda * options.lambda_increase :
        (options.initial_lambda > 0.0 ? options.initial_lambda : 1e-3);
      if (lambda > options.max_lambda) {
        throw Error(
          ErrorCode::SingularNormalEquations, "damping exhausted without a descent step");
      }
    }
    result.iterations = iter + 1;
    if (stop) {
      break;
    }
  }
  if (!result.converged && result.stop_reason.empty()) {
    result.stop_reason = "iteration limit";
  }
  return result;
}

}  // namespace ftind::fit
