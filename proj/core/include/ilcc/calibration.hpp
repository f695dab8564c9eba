#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "ilcc/chessboard.hpp"
#include "ilcc/config.hpp"
#include "ilcc/levenberg_marquardt.hpp"
#include "ilcc/types.hpp"

namespace ilcc {

/// One frame's ordered 3D/2D corner pairs; both sequences follow the
/// counting order (lower-left first, rows bottom-to-top, left-to-right).
struct FrameCorrespondence {
  std::string frame_id;
  std::vector<Eigen::Vector3d> corners3d;  // LiDAR frame
  std::vector<Pixel> corners2d;
};

using CorrespondenceSet = std::vector<FrameCorrespondence>;

/// Read `u,v` rows and validate count, bounds and counting-order structure
/// (u strictly increasing within each corner row, mean v strictly decreasing
/// between rows). Throws BadCorners.
std::vector<Pixel> load_image_corners(const std::string& path, const BoardSpec& board, const PanoramaSpec& spec);

/// Validation used by load_image_corners, exposed for in-memory corner sets.
void validate_corner_order(std::span<const Pixel> corners, const BoardSpec& board, const PanoramaSpec& spec);

/// Per-pair angular residuals, interleaved (inclination, azimuth): transform
/// the 3D corner, compare spherical angles against the pixel's; the azimuth
/// difference is wrapped into (−π, π] and scaled by sin(inclination) so both
/// components approximate great-circle arcs. Poles (inclination within 1e-6
/// of 0 or π) contribute zero azimuth residual.
Eigen::VectorXd angular_residuals(const Pose& extrinsics, const CorrespondenceSet& corr, const PanoramaSpec& spec);

struct RefineResult {
  Pose pose;
  double cost = 0.0;
  double rms_residual = 0.0;  // radians
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;
};

/// Levenberg-Marquardt on the six pose parameters from the given start.
RefineResult refine(const CorrespondenceSet& corr, const PanoramaSpec& spec, const Pose& init);

/// Deterministic multi-start initialization: LM from the 24 rotational
/// octahedral seeds, each with a zero translation seed and a bearing-derived
/// one; lowest final cost wins. Throws InsufficientCorrespondences (< 4
/// pairs) and NoConvergence (every start diverged).
Pose initial_pose(const CorrespondenceSet& corr, const PanoramaSpec& spec);

struct ReprojectionReport {
  double e = 0.0;            // Eq.-(9)-style normalized error
  double cost_px = 0.0;      // C_m, pixel L1 cost
  int counted_points = 0;    // N_c
  int total_points = 0;      // N_a
  int counted_cells = 0;     // P_c
  int total_cells = 0;       // P_a
  double board_range = 0.0;  // r^M, meters
};

/// e = (C_m/N_c)·r^M·(P_c·N_a)/(P_a·N_c).
double compose_reprojection_error(double cost_px, int counted_points, double board_range, int counted_cells,
                                  int total_cells, int total_points);

/// Intensity re-projection metric: project every board point, assign it to
/// the interior-corner-bounded quadrilateral containing it, skip gray-zone
/// points, and charge the Eq.-(8) pixel margin to the quad's bounding box
/// when the measured color disagrees with the pattern. Throws NoPointsInside
/// when nothing lands in a quadrilateral.
ReprojectionReport reprojection_error(const Pose& extrinsics, std::span<const Eigen::Vector3d> board_points,
                                      std::span<const double> intensities, std::span<const Pixel> image_corners,
                                      const GrayZone& zone, const BoardSpec& board, const PanoramaSpec& spec);

struct FrameInput {
  std::string frame_id;
  PointCloud cloud;
  std::vector<Pixel> corners2d;
};

struct FrameReport {
  std::string frame_id;
  bool used = false;
  std::string error;  // taxonomy name + message when skipped
  ReprojectionReport reprojection;
  double rms_residual = 0.0;  // radians, at the final extrinsics
};

struct CalibrationResult {
  Pose extrinsics;
  RefineResult refinement;
  std::vector<FrameReport> frames;
  int frames_used = 0;
  bool low_confidence = false;  // single usable frame
};

/// Full pipeline over a set of frames: per-frame board location and corner
/// estimation (failures isolate the frame), multi-start initialization on
/// the pooled correspondences, LM refinement, per-frame re-projection
/// scoring. Throws only when no frame survives. Frame preprocessing runs
/// concurrently when jobs > 1; results are identical either way.
CalibrationResult calibrate(const std::vector<FrameInput>& frames, const Config& config, int jobs = 1);

}  // namespace ilcc
