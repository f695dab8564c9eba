#include "ilcc/pipeline.hpp"

namespace ilcc {

BoardDetection locate_board(const PointCloud& cloud, const Config& config) {
  const std::vector<Segment> segments = segment_cloud(cloud, config.segmentation);
  return find_board(segments, cloud, config.board, config.sensor, config.detection);
}

CornerFit estimate_corners_from_cloud(const PointCloud& cloud, const Config& config) {
  const BoardDetection detection = locate_board(cloud, config);
  return estimate_corners(detection, cloud, config.board, config.fit);
}

BoardDetection board_geometry_from_indices(const PointCloud& cloud, std::vector<int> indices, const Config& config) {
  std::vector<Eigen::Vector3d> points;
  points.reserve(indices.size());
  for (int idx : indices) points.push_back(cloud.points[idx].position());

  const RansacPlaneResult plane =
      ransac_plane(points, config.detection.ransac_tol, config.detection.ransac_iterations, config.detection.ransac_seed);
  auto [transform, canonical] = canonicalize(plane.projected);

  BoardDetection detection;
  detection.segment.indices = indices;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  detection.segment.centroid = sum / static_cast<double>(points.size());
  detection.point_indices.reserve(plane.inliers.size());
  for (int local : plane.inliers) detection.point_indices.push_back(indices[local]);
  detection.canonical = std::move(canonical);
  detection.transform = transform;
  return detection;
}

}  // namespace ilcc
