#include "ilcc/board_locator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "ilcc/errors.hpp"

namespace ilcc {

long theoretical_count(const BoardSpec& spec, const SensorModel& sensor, double range) {
  if (!(range > 0.0)) raise(ErrorCode::NonPositiveRange, "theoretical_count needs range > 0");
  const double step_w = 2.0 * range * std::sin(sensor.horizontal_res / 2.0);
  const double step_h = 2.0 * range * std::sin(sensor.vertical_res / 2.0);
  const double along_w = std::floor(spec.width() / step_w);
  const double along_h = std::floor(spec.height() / step_h);
  return static_cast<long>(along_w) * static_cast<long>(along_h);
}

std::vector<Segment> count_prefilter(const std::vector<Segment>& segments, const BoardSpec& spec,
                                     const SensorModel& sensor, double count_ratio) {
  std::vector<Segment> out;
  for (const Segment& seg : segments) {
    const double r = seg.range();
    if (!(r > 0.0)) continue;
    const long n_theo = theoretical_count(spec, sensor, r);
    const double n = static_cast<double>(seg.count());
    if (n >= count_ratio * static_cast<double>(n_theo) && n <= static_cast<double>(n_theo)) {
      out.push_back(seg);
    }
  }
  return out;
}

namespace {

Eigen::Vector3d centroid_of(std::span<const Eigen::Vector3d> points) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

Eigen::Matrix3d covariance_of(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& mean) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(points.size());
}

}  // namespace

PlaneBasis pca_plane(std::span<const Eigen::Vector3d> points) {
  if (points.size() < 3) raise(ErrorCode::DegenerateGeometry, "pca_plane needs at least 3 points");
  const Eigen::Vector3d mean = centroid_of(points);
  const Eigen::Matrix3d cov = covariance_of(points, mean);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  // Eigen returns ascending eigenvalues; we want descending.
  Eigen::Vector3d values = solver.eigenvalues().reverse();
  Eigen::Matrix3d vectors;
  for (int i = 0; i < 3; ++i) vectors.row(i) = solver.eigenvectors().col(2 - i).transpose();

  const double total = values.sum();
  if (!(total > 0.0)) raise(ErrorCode::DegenerateGeometry, "pca_plane: zero total variance");
  PlaneBasis basis;
  basis.lambdas = (values / total).cwiseMax(0.0);
  basis.basis = vectors;
  if (basis.lambdas(1) < 1e-9) {
    raise(ErrorCode::DegenerateGeometry, "pca_plane: points are collinear");
  }
  return basis;
}

RansacPlaneResult ransac_plane(std::span<const Eigen::Vector3d> points, double inlier_tol, int iterations,
                               std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (n < 3) raise(ErrorCode::DegenerateGeometry, "ransac_plane needs at least 3 points");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  int best_count = -1;
  Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
  double best_offset = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const int a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    const Eigen::Vector3d normal = (points[b] - points[a]).cross(points[c] - points[a]);
    const double norm = normal.norm();
    if (norm < 1e-12) continue;
    const Eigen::Vector3d unit = normal / norm;
    const double offset = -unit.dot(points[a]);
    int count = 0;
    for (const auto& p : points) {
      if (std::abs(unit.dot(p) + offset) <= inlier_tol) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_normal = unit;
      best_offset = offset;
    }
  }

  if (best_count < (n + 1) / 2) {
    raise(ErrorCode::DegenerateGeometry, "ransac_plane: no hypothesis reached 50% inliers");
  }

  RansacPlaneResult result;
  for (int i = 0; i < n; ++i) {
    if (std::abs(best_normal.dot(points[i]) + best_offset) <= inlier_tol) result.inliers.push_back(i);
  }

  // Least-squares refit on the winning inlier set.
  std::vector<Eigen::Vector3d> inlier_points;
  inlier_points.reserve(result.inliers.size());
  for (int i : result.inliers) inlier_points.push_back(points[i]);
  const Eigen::Vector3d mean = centroid_of(inlier_points);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance_of(inlier_points, mean));
  Eigen::Vector3d normal = solver.eigenvectors().col(0);
  if (normal.dot(best_normal) < 0.0) normal = -normal;
  const double offset = -normal.dot(mean);

  result.coefficients << normal.x(), normal.y(), normal.z(), offset;
  result.projected.reserve(result.inliers.size());
  for (int i : result.inliers) {
    const Eigen::Vector3d& p = points[i];
    result.projected.push_back(p - (normal.dot(p) + offset) * normal);
  }
  return result;
}

std::pair<PlaneTransform, std::vector<Eigen::Vector3d>> canonicalize(
    std::span<const Eigen::Vector3d> planar_points, const Eigen::Vector3d& lidar_origin) {
  PlaneBasis pca = pca_plane(planar_points);
  Eigen::Vector3d mu1 = pca.basis.row(0);
  Eigen::Vector3d mu3 = pca.basis.row(2);
  const Eigen::Vector3d mean = centroid_of(planar_points);

  // μ3 points to the side of the sensor origin.
  const double side = mu3.dot(lidar_origin - mean);
  if (std::abs(side) < 1e-6) {
    raise(ErrorCode::DegenerateGeometry, "canonicalize: board plane passes through the sensor origin");
  }
  if (side < 0.0) mu3 = -mu3;

  // μ1 within 90° of the sensor x-axis.
  if (mu1.x() < 0.0) mu1 = -mu1;

  // Right-hand rule fixes μ2.
  const Eigen::Vector3d mu2 = mu3.cross(mu1);

  PlaneTransform transform;
  transform.rotation.row(0) = mu1;
  transform.rotation.row(1) = mu2;
  transform.rotation.row(2) = mu3;
  transform.translation = -(transform.rotation * mean);

  std::vector<Eigen::Vector3d> canonical;
  canonical.reserve(planar_points.size());
  for (const auto& p : planar_points) canonical.push_back(transform.to_plane(p));
  return {transform, std::move(canonical)};
}

UniformityResult bounding_and_uniformity(std::span<const Eigen::Vector3d> canonical, const BoardSpec& spec,
                                         const DetectionParams& params) {
  UniformityResult result;
  if (canonical.empty()) return result;

  double min_x = canonical[0].x(), max_x = min_x;
  double min_y = canonical[0].y(), max_y = min_y;
  int quadrant[4] = {0, 0, 0, 0};
  for (const auto& q : canonical) {
    min_x = std::min(min_x, q.x());
    max_x = std::max(max_x, q.x());
    min_y = std::min(min_y, q.y());
    max_y = std::max(max_y, q.y());
    quadrant[(q.x() >= 0.0 ? 0 : 1) + (q.y() >= 0.0 ? 0 : 2)]++;
  }
  const double extent_x = max_x - min_x;
  const double extent_y = max_y - min_y;

  // PCA puts the larger extent on x, so compare against the sorted board dims.
  const double long_dim = std::max(spec.width(), spec.height());
  const double short_dim = std::min(spec.width(), spec.height());
  result.box_ok = extent_x >= params.box_low * long_dim && extent_x <= params.box_high * long_dim &&
                  extent_y >= params.box_low * short_dim && extent_y <= params.box_high * short_dim;

  const int n_max = *std::max_element(quadrant, quadrant + 4);
  const int n_min = *std::min_element(quadrant, quadrant + 4);
  result.uniformity = 1.0 - static_cast<double>(n_max - n_min) / static_cast<double>(canonical.size());
  result.accepted = result.box_ok && result.uniformity >= params.uniformity_min;
  return result;
}

BoardDetection find_board(const std::vector<Segment>& segments, const PointCloud& cloud, const BoardSpec& spec,
                          const SensorModel& sensor, const DetectionParams& params) {
  const std::vector<Segment> candidates = count_prefilter(segments, spec, sensor, params.count_ratio);

  bool found = false;
  BoardDetection best;
  for (const Segment& seg : candidates) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(seg.indices.size());
    for (int idx : seg.indices) pts.push_back(cloud.points[idx].position());

    try {
      const PlaneBasis pca = pca_plane(pts);
      if (!(pca.lambdas(2) < params.planarity_max)) continue;

      const RansacPlaneResult plane = ransac_plane(pts, params.ransac_tol, params.ransac_iterations,
                                                   params.ransac_seed);
      auto [transform, canonical] = canonicalize(plane.projected);

      const UniformityResult uni = bounding_and_uniformity(canonical, spec, params);
      if (!uni.accepted) continue;

      if (!found || uni.uniformity > best.uniformity) {
        found = true;
        best.segment = seg;
        best.point_indices.clear();
        best.point_indices.reserve(plane.inliers.size());
        for (int local : plane.inliers) best.point_indices.push_back(seg.indices[local]);
        best.canonical = std::move(canonical);
        best.transform = transform;
        best.uniformity = uni.uniformity;
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateGeometry) continue;  // not board-like, keep scanning
      throw;
    }
  }

  if (!found) raise(ErrorCode::BoardNotFound, "no segment passed the chessboard filters");
  return best;
}

}  // namespace ilcc
