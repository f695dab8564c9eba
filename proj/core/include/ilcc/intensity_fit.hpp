#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ilcc/board_locator.hpp"
#include "ilcc/chessboard.hpp"
#include "ilcc/config.hpp"
#include "ilcc/powell.hpp"
#include "ilcc/types.hpp"

namespace ilcc {

struct BoardPoseFit {
  InPlanePose pose;
  double cost = 0.0;
  int classified_points = 0;
  int cycles = 0;
};

struct CornerFit {
  std::vector<Eigen::Vector3d> corners;  // LiDAR frame, counting order
  BoardPoseFit fit;
  GrayZone zone;
};

/// Powell-minimize the board cost over (θz, tx, ty) from the zero pose.
/// `points`/`classes` are pre-classified canonical points with gray points
/// removed.
BoardPoseFit fit_board_pose(std::span<const Eigen::Vector2d> points, std::span<const PointClass> classes,
                            const ChessboardModel& model, const PowellParams& params);

/// Model corners mapped back through the fitted in-plane pose and the plane
/// transform, then ordered by the counting convention: corner rows run
/// bottom-to-top in the LiDAR frame (grid axis with the dominant |z|
/// component), corners left-to-right within a row (toward increasing
/// azimuth at the board centroid).
std::vector<Eigen::Vector3d> lift_and_order_corners(const ChessboardModel& model, const InPlanePose& pose,
                                                    const PlaneTransform& transform);

/// Estimate the interior chessboard corners of a located board. Classifies
/// intensities through the ε_g gray zone, fits the full-scale model, rejects
/// fits whose mean per-point cost exceeds the ceiling, and lifts the model
/// corners to the LiDAR frame. Errors: UnimodalIntensity, NonFiniteCost,
/// FitRejected.
CornerFit estimate_corners(const BoardDetection& detection, const PointCloud& cloud, const BoardSpec& spec,
                           const FitParams& params);

}  // namespace ilcc
