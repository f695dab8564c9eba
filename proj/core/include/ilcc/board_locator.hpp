#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "ilcc/config.hpp"
#include "ilcc/segmentation.hpp"
#include "ilcc/types.hpp"

namespace ilcc {

/// PCA basis of a point set: rows μ1, μ2, μ3 sorted by descending component
/// ratio; λ values are eigenvalues normalized to sum 1. μ3 is the plane
/// normal for planar sets.
struct PlaneBasis {
  Eigen::Matrix3d basis = Eigen::Matrix3d::Identity();  // rows μ1, μ2, μ3
  Eigen::Vector3d lambdas = Eigen::Vector3d::Zero();    // λ1 >= λ2 >= λ3, sum 1
};

/// Rigid map q = rotation·p + translation taking board points onto the
/// canonical plane (z ≈ 0, zero mean).
struct PlaneTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d to_plane(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  Eigen::Vector3d to_lidar(const Eigen::Vector3d& q) const { return rotation.transpose() * (q - translation); }
};

struct RansacPlaneResult {
  Eigen::Vector4d coefficients = Eigen::Vector4d::Zero();  // n·p + d = 0, ‖n‖ = 1
  std::vector<int> inliers;                                // indices into the input span
  std::vector<Eigen::Vector3d> projected;                  // inliers projected onto the plane
};

struct UniformityResult {
  bool accepted = false;
  bool box_ok = false;
  double uniformity = 0.0;  // ε_norm
};

struct BoardDetection {
  Segment segment;                          // the selected object segment
  std::vector<int> point_indices;           // cloud indices, aligned with canonical
  std::vector<Eigen::Vector3d> canonical;   // RANSAC inliers mapped to the plane
  PlaneTransform transform;
  double uniformity = 0.0;
};

/// Theoretical maximum return count for a board of the given size seen at
/// range r: ⌊d_W/(2r·sin(Δh/2))⌋·⌊d_H/(2r·sin(Δv/2))⌋.
long theoretical_count(const BoardSpec& spec, const SensorModel& sensor, double range);

/// Keep segments whose count lies in [ε_theo·n_theo, n_theo] at their
/// centroid range.
std::vector<Segment> count_prefilter(const std::vector<Segment>& segments, const BoardSpec& spec,
                                     const SensorModel& sensor, double count_ratio);

/// Eigen-decomposition of the covariance of centered points. Throws
/// DegenerateGeometry when the points are (near-)collinear.
PlaneBasis pca_plane(std::span<const Eigen::Vector3d> points);

/// Best plane by inlier count over seeded random 3-point hypotheses; the
/// returned plane is least-squares refit on the winning inlier set and the
/// inliers are orthogonally projected onto it. Throws DegenerateGeometry if
/// no hypothesis reaches 50% inliers.
RansacPlaneResult ransac_plane(std::span<const Eigen::Vector3d> points, double inlier_tol, int iterations,
                               std::uint64_t seed);

/// Canonical-plane transform for a planar point set. The basis satisfies:
/// right-handed, μ3 pointing to the sensor-origin side, and μ1 within 90° of
/// the sensor x-axis. Output points have zero mean. Throws
/// DegenerateGeometry when the plane passes through the origin (μ3 side
/// undecidable).
std::pair<PlaneTransform, std::vector<Eigen::Vector3d>> canonicalize(
    std::span<const Eigen::Vector3d> planar_points, const Eigen::Vector3d& lidar_origin = Eigen::Vector3d::Zero());

/// Bounding-box and quadrant-uniformity screen on canonical points. The box
/// check compares the larger canonical extent against the larger board
/// dimension (PCA orders axes by variance). ε_norm = 1 − (n_max − n_min)/n_all
/// over the four sign quadrants.
UniformityResult bounding_and_uniformity(std::span<const Eigen::Vector3d> canonical, const BoardSpec& spec,
                                         const DetectionParams& params);

/// Full screen: count prefilter, PCA planarity, RANSAC plane, canonical
/// transform, box and uniformity; returns the surviving segment with the
/// highest uniformity. Throws BoardNotFound when nothing survives.
BoardDetection find_board(const std::vector<Segment>& segments, const PointCloud& cloud, const BoardSpec& spec,
                          const SensorModel& sensor, const DetectionParams& params);

}  // namespace ilcc
