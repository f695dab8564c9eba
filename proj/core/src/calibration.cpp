#include "ilcc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "ilcc/errors.hpp"
#include "ilcc/geometry.hpp"
#include "ilcc/intensity_fit.hpp"
#include "ilcc/io.hpp"
#include "ilcc/pipeline.hpp"

namespace ilcc {

namespace {

constexpr double kPoleTolerance = 1e-6;

std::size_t total_pairs(const CorrespondenceSet& corr) {
  std::size_t n = 0;
  for (const auto& frame : corr) n += frame.corners3d.size();
  return n;
}

}  // namespace

void validate_corner_order(std::span<const Pixel> corners, const BoardSpec& board, const PanoramaSpec& spec) {
  const int expected = board.corner_count();
  if (static_cast<int>(corners.size()) != expected) {
    raise(ErrorCode::BadCorners, "expected " + std::to_string(expected) + " corners, got " +
                                     std::to_string(corners.size()));
  }
  for (const Pixel& px : corners) {
    if (px.u < 0.0 || px.u >= spec.width || px.v < 0.0 || px.v >= spec.height) {
      raise(ErrorCode::BadCorners, "corner out of image bounds");
    }
  }

  const int per_row = board.corners_per_row();
  const int rows = board.corner_rows();
  double previous_row_v = std::numeric_limits<double>::infinity();
  for (int row = 0; row < rows; ++row) {
    double v_sum = 0.0;
    for (int col = 0; col < per_row; ++col) {
      const Pixel& px = corners[row * per_row + col];
      v_sum += px.v;
      if (col > 0 && !(px.u > corners[row * per_row + col - 1].u)) {
        raise(ErrorCode::BadCorners, "u must increase within corner row " + std::to_string(row));
      }
    }
    const double v_mean = v_sum / per_row;
    // Counting order starts at the image bottom, where v is largest.
    if (!(v_mean < previous_row_v)) {
      raise(ErrorCode::BadCorners, "corner rows are not ordered bottom-to-top");
    }
    previous_row_v = v_mean;
  }
}

std::vector<Pixel> load_image_corners(const std::string& path, const BoardSpec& board, const PanoramaSpec& spec) {
  const std::vector<Pixel> corners = read_pixels_csv(path);
  validate_corner_order(corners, board, spec);
  return corners;
}

Eigen::VectorXd angular_residuals(const Pose& extrinsics, const CorrespondenceSet& corr, const PanoramaSpec& spec) {
  if (corr.empty()) raise(ErrorCode::InsufficientCorrespondences, "empty correspondence set");
  const Eigen::Matrix3d rotation = rotation_from_angles(extrinsics.theta);

  Eigen::VectorXd residuals(2 * static_cast<long>(total_pairs(corr)));
  long k = 0;
  for (const auto& frame : corr) {
    for (std::size_t i = 0; i < frame.corners3d.size(); ++i) {
      const SphericalAngles measured = pixel_to_angles(frame.corners2d[i], spec);
      const SphericalAngles projected = point_to_angles(rotation * frame.corners3d[i] + extrinsics.t);
      residuals(k++) = projected.inclination - measured.inclination;
      const bool at_pole = measured.inclination < kPoleTolerance || measured.inclination > M_PI - kPoleTolerance;
      residuals(k++) = at_pole ? 0.0
                               : wrap_angle(projected.azimuth - measured.azimuth) * std::sin(measured.inclination);
    }
  }
  return residuals;
}

RefineResult refine(const CorrespondenceSet& corr, const PanoramaSpec& spec, const Pose& init) {
  if (corr.empty()) raise(ErrorCode::InsufficientCorrespondences, "empty correspondence set");

  auto residual_fn = [&](const Eigen::VectorXd& x) {
    Pose pose;
    pose.theta = x.head<3>();
    pose.t = x.tail<3>();
    return angular_residuals(pose, corr, spec);
  };

  Eigen::VectorXd x0(6);
  x0 << init.theta, init.t;
  const LmResult lm = levenberg_marquardt(residual_fn, x0);

  RefineResult result;
  // Report the principal Euler branch (θy in [−π/2, π/2], others in (−π, π]).
  result.pose.theta = angles_from_rotation(rotation_from_angles(lm.x.head<3>()));
  result.pose.t = lm.x.tail<3>();
  result.cost = lm.cost;
  result.iterations = lm.iterations;
  result.converged = lm.converged;
  result.cost_trace = lm.cost_trace;
  const long n = 2 * static_cast<long>(total_pairs(corr));
  result.rms_residual = std::sqrt(2.0 * lm.cost / static_cast<double>(n));
  return result;
}

namespace {

/// The 24 orientation-preserving symmetries of the cube: signed axis
/// permutations with determinant +1.
std::vector<Eigen::Matrix3d> octahedral_rotations() {
  std::vector<Eigen::Matrix3d> out;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const int perm_signs[6] = {1, -1, -1, 1, 1, -1};
  for (int p = 0; p < 6; ++p) {
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        for (int sz = -1; sz <= 1; sz += 2) {
          if (perm_signs[p] * sx * sy * sz != 1) continue;
          Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
          m(0, perms[p][0]) = sx;
          m(1, perms[p][1]) = sy;
          m(2, perms[p][2]) = sz;
          out.push_back(m);
        }
      }
    }
  }
  return out;
}

}  // namespace

Pose initial_pose(const CorrespondenceSet& corr, const PanoramaSpec& spec) {
  const std::size_t pairs = total_pairs(corr);
  if (pairs < 4) {
    raise(ErrorCode::InsufficientCorrespondences, "need at least 4 corner pairs, got " + std::to_string(pairs));
  }

  Eigen::Vector3d centroid3d = Eigen::Vector3d::Zero();
  Eigen::Vector3d bearing_sum = Eigen::Vector3d::Zero();
  for (const auto& frame : corr) {
    for (std::size_t i = 0; i < frame.corners3d.size(); ++i) {
      centroid3d += frame.corners3d[i];
      bearing_sum += angles_to_direction(pixel_to_angles(frame.corners2d[i], spec));
    }
  }
  centroid3d /= static_cast<double>(pairs);
  const Eigen::Vector3d bearing_target = bearing_sum.normalized() * centroid3d.norm();

  bool found = false;
  double best_cost = std::numeric_limits<double>::infinity();
  RefineResult best;
  for (const Eigen::Matrix3d& rotation : octahedral_rotations()) {
    const Eigen::Vector3d theta = angles_from_rotation(rotation);
    const Eigen::Vector3d t_candidates[2] = {Eigen::Vector3d::Zero(), bearing_target - rotation * centroid3d};
    for (const Eigen::Vector3d& t0 : t_candidates) {
      Pose seed;
      seed.theta = theta;
      seed.t = t0;
      try {
        const RefineResult run = refine(corr, spec, seed);
        if (std::isfinite(run.cost) && run.cost < best_cost) {
          best_cost = run.cost;
          best = run;
          found = true;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ZeroNorm) continue;  // degenerate seed placed a corner at the camera center
        throw;
      }
    }
  }
  if (!found) raise(ErrorCode::NoConvergence, "every multi-start seed diverged");
  return best.pose;
}

double compose_reprojection_error(double cost_px, int counted_points, double board_range, int counted_cells,
                                  int total_cells, int total_points) {
  if (counted_points <= 0) raise(ErrorCode::NoPointsInside, "no points inside the corner quadrilaterals");
  return (cost_px / counted_points) * board_range *
         (static_cast<double>(counted_cells) * total_points) /
         (static_cast<double>(total_cells) * counted_points);
}

namespace {

bool point_in_quad(const Eigen::Vector2d& p, const Eigen::Vector2d quad[4]) {
  // Ray-crossing test; works for either winding.
  bool inside = false;
  for (int i = 0, j = 3; i < 4; j = i++) {
    const Eigen::Vector2d& a = quad[i];
    const Eigen::Vector2d& b = quad[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

ReprojectionReport reprojection_error(const Pose& extrinsics, std::span<const Eigen::Vector3d> board_points,
                                      std::span<const double> intensities, std::span<const Pixel> image_corners,
                                      const GrayZone& zone, const BoardSpec& board, const PanoramaSpec& spec) {
  validate_corner_order(image_corners, board, spec);

  const int per_row = board.corners_per_row();
  const int corner_rows = board.corner_rows();
  const int quad_cols = per_row - 1;
  const int quad_rows = corner_rows - 1;
  if (quad_cols < 1 || quad_rows < 1) raise(ErrorCode::BadInput, "board too small for corner-bounded cells");

  struct Quad {
    Eigen::Vector2d corners[4];
    RectBounds bbox;
    int color;  // 1 white, 0 black
  };
  std::vector<Quad> quads;
  quads.reserve(static_cast<std::size_t>(quad_cols) * quad_rows);
  const int origin = board.origin_cell_color == CellColor::White ? 1 : 0;
  for (int row = 0; row < quad_rows; ++row) {
    for (int col = 0; col < quad_cols; ++col) {
      auto corner_at = [&](int r, int c) {
        const Pixel& px = image_corners[r * per_row + c];
        return Eigen::Vector2d(px.u, px.v);
      };
      Quad quad;
      quad.corners[0] = corner_at(row, col);
      quad.corners[1] = corner_at(row, col + 1);
      quad.corners[2] = corner_at(row + 1, col + 1);
      quad.corners[3] = corner_at(row + 1, col);
      double min_u = quad.corners[0].x(), max_u = min_u, min_v = quad.corners[0].y(), max_v = min_v;
      for (int k = 1; k < 4; ++k) {
        min_u = std::min(min_u, quad.corners[k].x());
        max_u = std::max(max_u, quad.corners[k].x());
        min_v = std::min(min_v, quad.corners[k].y());
        max_v = std::max(max_v, quad.corners[k].y());
      }
      quad.bbox = {min_u, max_u, min_v, max_v};
      // The quad between corner rows (row, row+1) is full-board cell
      // (row+1, col+1); parity relative to the origin cell.
      quad.color = (((row + 1) + (col + 1)) & 1) ^ origin;
      quads.push_back(quad);
    }
  }

  ReprojectionReport report;
  report.total_points = static_cast<int>(board_points.size());
  report.total_cells = board.rows * board.cols;
  report.counted_cells = quad_rows * quad_cols;

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : board_points) centroid += p;
  if (!board_points.empty()) centroid /= static_cast<double>(board_points.size());
  report.board_range = centroid.norm();

  const Eigen::Matrix3d rotation = rotation_from_angles(extrinsics.theta);
  for (std::size_t i = 0; i < board_points.size(); ++i) {
    const PointClass cls = classify_point(intensities[i], zone);
    if (cls == PointClass::Gray) continue;
    const Pixel px = angles_to_pixel(point_to_angles(rotation * board_points[i] + extrinsics.t), spec);
    const Eigen::Vector2d p(px.u, px.v);
    for (const Quad& quad : quads) {
      if (p.x() < quad.bbox.x0 || p.x() > quad.bbox.x1 || p.y() < quad.bbox.y0 || p.y() > quad.bbox.y1) continue;
      if (!point_in_quad(p, quad.corners)) continue;
      report.counted_points++;
      if (static_cast<int>(cls) != quad.color) report.cost_px += l1_margin(p, quad.bbox);
      break;
    }
  }

  report.e = compose_reprojection_error(report.cost_px, report.counted_points, report.board_range,
                                        report.counted_cells, report.total_cells, report.total_points);
  return report;
}

CalibrationResult calibrate(const std::vector<FrameInput>& frames, const Config& config, int jobs) {
  if (frames.empty()) raise(ErrorCode::BadInput, "calibrate needs at least one frame");
  jobs = std::max(1, jobs);

  struct FrameData {
    std::size_t report_index = 0;
    bool ok = false;
    std::string error;
    FrameCorrespondence correspondence;
    std::vector<Eigen::Vector3d> board_points;
    std::vector<double> intensities;
  };
  std::vector<FrameData> processed(frames.size());

  auto process = [&](std::size_t f) {
    FrameData& data = processed[f];
    const FrameInput& frame = frames[f];
    try {
      validate_corner_order(frame.corners2d, config.board, config.panorama);
      const BoardDetection detection = locate_board(frame.cloud, config);
      const CornerFit fit = estimate_corners(detection, frame.cloud, config.board, config.fit);

      data.correspondence.frame_id = frame.frame_id;
      data.correspondence.corners3d = fit.corners;
      data.correspondence.corners2d = frame.corners2d;
      data.board_points.reserve(detection.point_indices.size());
      data.intensities.reserve(detection.point_indices.size());
      for (int idx : detection.point_indices) {
        data.board_points.push_back(frame.cloud.points[idx].position());
        data.intensities.push_back(frame.cloud.points[idx].intensity);
      }
      data.ok = true;
    } catch (const Error& e) {
      data.ok = false;
      data.error = e.what();
    }
  };

  if (jobs == 1) {
    for (std::size_t f = 0; f < frames.size(); ++f) process(f);
  } else {
    std::vector<std::future<void>> pending;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      pending.push_back(std::async(std::launch::async, process, f));
      if (static_cast<int>(pending.size()) >= jobs) {
        for (auto& fut : pending) fut.get();
        pending.clear();
      }
    }
    for (auto& fut : pending) fut.get();
  }

  CalibrationResult result;
  CorrespondenceSet corr;
  std::vector<FrameData> usable;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    FrameReport report;
    report.frame_id = frames[f].frame_id;
    report.used = processed[f].ok;
    report.error = processed[f].error;
    if (processed[f].ok) {
      corr.push_back(processed[f].correspondence);
      processed[f].report_index = result.frames.size();
      usable.push_back(std::move(processed[f]));
    }
    result.frames.push_back(std::move(report));
  }

  result.frames_used = static_cast<int>(corr.size());
  if (result.frames_used < 1) raise(ErrorCode::BoardNotFound, "no frame produced usable correspondences");
  result.low_confidence = result.frames_used == 1;

  const Pose init = initial_pose(corr, config.panorama);
  result.refinement = refine(corr, config.panorama, init);
  result.extrinsics = result.refinement.pose;

  // Per-frame residual statistics and re-projection scores at the solution.
  for (std::size_t k = 0; k < usable.size(); ++k) {
    FrameReport& report = result.frames[usable[k].report_index];
    const CorrespondenceSet single{corr[k]};
    const Eigen::VectorXd residuals = angular_residuals(result.extrinsics, single, config.panorama);
    report.rms_residual = std::sqrt(residuals.squaredNorm() / residuals.size());
    try {
      const GrayZone zone = estimate_gray_zone(usable[k].intensities, config.fit.gray.eval_eps, config.fit.gray.bins);
      report.reprojection = reprojection_error(result.extrinsics, usable[k].board_points, usable[k].intensities,
                                               corr[k].corners2d, zone, config.board, config.panorama);
    } catch (const Error& e) {
      report.error = std::string("reprojection: ") + e.what();
    }
  }
  return result;
}

}  // namespace ilcc
