#pragma once

#include <Eigen/Core>
#include <vector>

#include "ilcc/config.hpp"
#include "ilcc/types.hpp"

namespace ilcc {

/// A run of consecutive returns from one laser ring.
struct ScanlineSegment {
  int ring = 0;
  std::vector<int> indices;  // into PointCloud, acquisition order
};

/// An object segment after agglomeration.
struct Segment {
  std::vector<int> indices;  // sorted ascending
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();

  int count() const { return static_cast<int>(indices.size()); }
  double range() const { return centroid.norm(); }
};

/// Split every ring's point sequence at distance or direction
/// discontinuities. Consecutive points stay together iff their distance is
/// <= gap_dist and the turn between successive difference vectors is
/// <= gap_angle. Every point lands in exactly one segment.
std::vector<ScanlineSegment> split_scanlines(const PointCloud& cloud, double gap_dist, double gap_angle);

/// Merge scanline segments whose minimum point-to-point distance is
/// <= merge_dist, taking the transitive closure. Output segments carry
/// sorted indices and are ordered by their smallest index, so the result is
/// independent of the input segment order.
std::vector<Segment> agglomerate(const std::vector<ScanlineSegment>& segments, const PointCloud& cloud,
                                 double merge_dist);

/// split_scanlines + agglomerate with the configured thresholds.
std::vector<Segment> segment_cloud(const PointCloud& cloud, const SegmentationParams& params);

}  // namespace ilcc
