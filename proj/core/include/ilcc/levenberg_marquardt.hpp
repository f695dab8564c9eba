#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace ilcc {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmOptions {
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 10.0;
  double lambda_max = 1e12;
  double gradient_tol = 1e-10;
  double relative_cost_tol = 1e-12;
  int max_iterations = 200;
  double fd_step = 1e-6;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // ½‖r‖²
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;  // cost after each accepted step, starting at the initial cost
};

/// Forward-difference Jacobian with a fixed absolute step per parameter.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x, double step);

/// Damped Gauss-Newton on ½‖r(x)‖² with Marquardt diagonal scaling. λ starts
/// at lambda0, multiplies by lambda_up on a rejected step and divides by
/// lambda_down on an accepted one. Stops on a small gradient norm, a small
/// relative cost change, or the iteration cap; `converged` is false when the
/// damping runs away (best iterate still returned).
LmResult levenberg_marquardt(const ResidualFn& residual, const Eigen::VectorXd& x0, const LmOptions& options = {});

}  // namespace ilcc
