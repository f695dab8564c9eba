#include "ilcc/intensity_fit.hpp"

#include <Eigen/Geometry>

#include <cmath>

#include "ilcc/errors.hpp"

namespace ilcc {

BoardPoseFit fit_board_pose(std::span<const Eigen::Vector2d> points, std::span<const PointClass> classes,
                            const ChessboardModel& model, const PowellParams& params) {
  if (points.empty()) raise(ErrorCode::FitRejected, "no classified points to fit");

  auto objective = [&](const Eigen::VectorXd& x) {
    return board_cost(points, classes, model, InPlanePose{x(0), x(1), x(2)});
  };
  const PowellResult opt = powell_minimize(objective, Eigen::Vector3d::Zero(), params);

  BoardPoseFit fit;
  fit.pose = InPlanePose{opt.x(0), opt.x(1), opt.x(2)};
  fit.cost = opt.fx;
  fit.classified_points = static_cast<int>(points.size());
  fit.cycles = opt.cycles;
  return fit;
}

std::vector<Eigen::Vector3d> lift_and_order_corners(const ChessboardModel& model, const InPlanePose& pose,
                                                    const PlaneTransform& transform) {
  const int nx = model.cells_x() - 1;
  const int ny = model.cells_y() - 1;
  const double c = std::cos(pose.theta_z), s = std::sin(pose.theta_z);

  // Grid of lifted corners indexed by the model lattice.
  std::vector<Eigen::Vector3d> grid(static_cast<std::size_t>(nx) * ny);
  Eigen::Vector3d center_sum = Eigen::Vector3d::Zero();
  for (int a = 0; a < nx; ++a) {
    for (int b = 0; b < ny; ++b) {
      const Eigen::Vector2d m(-model.length_x() / 2.0 + (a + 1) * model.square(),
                              -model.length_y() / 2.0 + (b + 1) * model.square());
      // Inverse in-plane pose: p = R(−θ)·(m − t).
      const double dx = m.x() - pose.tx, dy = m.y() - pose.ty;
      const Eigen::Vector3d canonical(c * dx + s * dy, -s * dx + c * dy, 0.0);
      const Eigen::Vector3d lifted = transform.to_lidar(canonical);
      grid[static_cast<std::size_t>(a) * ny + b] = lifted;
      center_sum += lifted;
    }
  }
  const Eigen::Vector3d center = center_sum / static_cast<double>(nx * ny);
  auto at = [&](int a, int b) -> const Eigen::Vector3d& { return grid[static_cast<std::size_t>(a) * ny + b]; };

  // Identify the vertical (row-stacking) grid axis and orient both axes.
  const Eigen::Vector3d step_a = at(nx - 1, 0) - at(0, 0);
  const Eigen::Vector3d step_b = at(0, ny - 1) - at(0, 0);
  const bool a_is_vertical = std::abs(step_a.z()) >= std::abs(step_b.z());
  const Eigen::Vector3d vertical = a_is_vertical ? step_a : step_b;
  const Eigen::Vector3d horizontal = a_is_vertical ? step_b : step_a;

  const bool flip_vertical = vertical.z() < 0.0;
  Eigen::Vector3d ground = center;
  ground.z() = 0.0;
  const Eigen::Vector3d tangent = Eigen::Vector3d::UnitZ().cross(ground.normalized());
  const bool flip_horizontal = horizontal.dot(tangent) < 0.0;

  const int n_rows = a_is_vertical ? nx : ny;
  const int n_cols = a_is_vertical ? ny : nx;
  std::vector<Eigen::Vector3d> ordered;
  ordered.reserve(grid.size());
  for (int row = 0; row < n_rows; ++row) {
    const int rr = flip_vertical ? n_rows - 1 - row : row;
    for (int col = 0; col < n_cols; ++col) {
      const int cc = flip_horizontal ? n_cols - 1 - col : col;
      ordered.push_back(a_is_vertical ? at(rr, cc) : at(cc, rr));
    }
  }
  return ordered;
}

CornerFit estimate_corners(const BoardDetection& detection, const PointCloud& cloud, const BoardSpec& spec,
                           const FitParams& params) {
  std::vector<double> intensities;
  intensities.reserve(detection.point_indices.size());
  for (int idx : detection.point_indices) intensities.push_back(cloud.points[idx].intensity);

  CornerFit result;
  result.zone = estimate_gray_zone(intensities, params.gray.corner_eps, params.gray.bins);

  const auto [points, classes] = classify_for_fit(detection.canonical, intensities, result.zone);
  const ChessboardModel model = ChessboardModel::from_spec(spec);
  result.fit = fit_board_pose(points, classes, model, params.powell);

  const double mean_cost = result.fit.cost / std::max(1, result.fit.classified_points);
  if (mean_cost > params.cost_ceiling) {
    raise(ErrorCode::FitRejected, "mean per-point cost " + std::to_string(mean_cost) + " exceeds ceiling " +
                                      std::to_string(params.cost_ceiling));
  }

  result.corners = lift_and_order_corners(model, result.fit.pose, detection.transform);
  return result;
}

}  // namespace ilcc
