#pragma once

#include <Eigen/Core>
#include <functional>

#include "ilcc/config.hpp"

namespace ilcc {

struct PowellResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int cycles = 0;
  bool converged = false;
  long evaluations = 0;
};

/// Powell's conjugate-direction minimization: cycles of derivative-free line
/// minimizations (bracketing with golden growth, then golden-section search)
/// along a maintained direction set; after each cycle the oldest direction
/// is replaced by the cycle displacement. Line searches only accept strict
/// improvements, so a minimizing start point is returned unchanged. Stops
/// when the relative cost decrease per cycle drops below ftol or after
/// max_cycles. Throws NonFiniteCost if the objective returns a non-finite
/// value anywhere.
PowellResult powell_minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const PowellParams& params = {});

}  // namespace ilcc
