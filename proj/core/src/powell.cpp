#include "ilcc/powell.hpp"

#include <cmath>

#include "ilcc/errors.hpp"

namespace ilcc {

namespace {

constexpr double kGolden = 0.6180339887498949;      // 1/φ
constexpr double kGrowth = 1.618033988749895;       // bracket expansion factor
constexpr int kMaxBracketSteps = 60;

struct LineSearch {
  const std::function<double(const Eigen::VectorXd&)>& f;
  const Eigen::VectorXd& origin;
  const Eigen::VectorXd& direction;
  long* evaluations;

  double eval(double t) const {
    const double v = f(origin + t * direction);
    ++(*evaluations);
    if (!std::isfinite(v)) raise(ErrorCode::NonFiniteCost, "objective returned a non-finite value");
    return v;
  }
};

/// Minimize f along a line from t = 0. Returns (t*, f(t*)) with t* = 0 when
/// no strict improvement over f(0) is found.
std::pair<double, double> line_minimize(const LineSearch& line, double f0, double step, double tol) {
  // Bracket a minimum. Try both directions from 0.
  double a = 0.0, fa = f0;
  double b = step, fb = line.eval(b);
  if (fb > fa) {
    b = -step;
    fb = line.eval(b);
  }

  double lo, hi;
  if (fb > fa) {
    // f rises both ways within one step: [−step, step] brackets t = 0.
    lo = -step;
    hi = step;
  } else {
    // Walk downhill until the function turns upward.
    double c = b + kGrowth * (b - a);
    double fc = line.eval(c);
    int steps = 0;
    while (fc < fb && steps++ < kMaxBracketSteps) {
      a = b;
      fa = fb;
      b = c;
      fb = fc;
      c = b + kGrowth * (b - a);
      fc = line.eval(c);
    }
    lo = std::min(a, c);
    hi = std::max(a, c);
  }

  // Golden-section search on [lo, hi].
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = line.eval(x1);
  double f2 = line.eval(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = line.eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = line.eval(x2);
    }
  }

  double t_best = f1 <= f2 ? x1 : x2;
  double f_best = std::min(f1, f2);
  if (fb < f_best) {  // keep the best bracketing sample too
    t_best = b;
    f_best = fb;
  }
  if (f_best < f0) return {t_best, f_best};
  return {0.0, f0};
}

}  // namespace

PowellResult powell_minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const PowellParams& params) {
  const int dim = static_cast<int>(x0.size());
  PowellResult result;
  result.x = x0;
  result.evaluations = 0;

  result.fx = f(result.x);
  ++result.evaluations;
  if (!std::isfinite(result.fx)) raise(ErrorCode::NonFiniteCost, "objective non-finite at the start point");

  Eigen::MatrixXd directions = Eigen::MatrixXd::Identity(dim, dim);

  for (int cycle = 0; cycle < params.max_cycles; ++cycle) {
    const double f_start = result.fx;
    const Eigen::VectorXd x_start = result.x;

    for (int i = 0; i < dim; ++i) {
      const Eigen::VectorXd dir = directions.col(i);
      LineSearch line{f, result.x, dir, &result.evaluations};
      const auto [t, ft] = line_minimize(line, result.fx, params.step0, params.line_tol);
      if (t != 0.0) {
        result.x += t * dir;
        result.fx = ft;
      }
    }

    Eigen::VectorXd displacement = result.x - x_start;
    const double disp_norm = displacement.norm();
    if (disp_norm > 0.0) {
      displacement /= disp_norm;
      LineSearch line{f, result.x, displacement, &result.evaluations};
      const auto [t, ft] = line_minimize(line, result.fx, params.step0, params.line_tol);
      if (t != 0.0) {
        result.x += t * displacement;
        result.fx = ft;
      }
      // Basic replacement scheme: drop the oldest direction, append the
      // cycle displacement.
      for (int i = 0; i + 1 < dim; ++i) directions.col(i) = directions.col(i + 1);
      directions.col(dim - 1) = displacement;
    }

    result.cycles = cycle + 1;
    const double decrease = f_start - result.fx;
    if (2.0 * std::abs(decrease) <= params.ftol * (std::abs(f_start) + std::abs(result.fx) + 1e-300)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace ilcc
