#include "ilcc/levenberg_marquardt.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace ilcc {

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x, double step) {
  const Eigen::VectorXd r0 = residual(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  Eigen::VectorXd probe = x;
  for (int j = 0; j < x.size(); ++j) {
    probe(j) = x(j) + step;
    jac.col(j) = (residual(probe) - r0) / step;
    probe(j) = x(j);
  }
  return jac;
}

LmResult levenberg_marquardt(const ResidualFn& residual, const Eigen::VectorXd& x0, const LmOptions& options) {
  LmResult result;
  result.x = x0;

  Eigen::VectorXd r = residual(result.x);
  result.cost = 0.5 * r.squaredNorm();
  result.cost_trace.push_back(result.cost);
  if (!std::isfinite(result.cost)) return result;

  double lambda = options.lambda0;
  for (int it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;

    const Eigen::MatrixXd jac = finite_difference_jacobian(residual, result.x, options.fd_step);
    const Eigen::VectorXd gradient = jac.transpose() * r;
    if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
      result.converged = true;
      return result;
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::VectorXd damping = normal.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += lambda * damping;
      const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      const Eigen::VectorXd x_new = result.x + step;
      const Eigen::VectorXd r_new = residual(x_new);
      const double cost_new = 0.5 * r_new.squaredNorm();

      if (std::isfinite(cost_new) && cost_new < result.cost) {
        const double relative_change = (result.cost - cost_new) / std::max(result.cost, 1e-300);
        result.x = x_new;
        r = r_new;
        result.cost = cost_new;
        result.cost_trace.push_back(result.cost);
        lambda = std::max(lambda / options.lambda_down, 1e-15);
        accepted = true;
        if (relative_change < options.relative_cost_tol) {
          result.converged = true;
          return result;
        }
      } else {
        lambda *= options.lambda_up;
        if (lambda > options.lambda_max) {
          // Damping ran away: no descent direction left at this scale.
          return result;
        }
      }
    }
  }
  // Iteration cap: best iterate returned, convergence flag stays false.
  return result;
}

}  // namespace ilcc
