#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace ilcc {

/// One LiDAR return: position in the sensor frame, reflectance intensity,
/// and the laser ring that produced it.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;  // unitless, [0, 255] for HDL-32e
  int ring = 0;            // laser index, [0, 31]

  Eigen::Vector3d position() const { return {x, y, z}; }
};

/// One frame of LiDAR data. Point order preserves acquisition order within
/// each ring; scanline segmentation depends on this.
struct PointCloud {
  std::vector<Point3> points;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Rigid transform parameterized as rotation angles (radians) and a
/// translation (meters). The rotation matrix composes as Rz(θz)·Ry(θy)·Rx(θx).
struct Pose {
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

/// Continuous pixel coordinates on the panorama.
struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

/// Equirectangular panorama geometry. Full sphere, so width = 2·height.
/// Conventions frozen here: u = 0 maps to azimuth −π, v = 0 to inclination 0.
struct PanoramaSpec {
  int width = 8000;
  int height = 4000;
};

/// Spherical direction in the camera frame: inclination from +z in [0, π],
/// azimuth from +x toward +y in (−π, π].
struct SphericalAngles {
  double inclination = 0.0;
  double azimuth = 0.0;
};

}  // namespace ilcc
