#pragma once

#include <Eigen/Core>

#include "ilcc/types.hpp"

namespace ilcc {

/// Rotation matrix for a Pose angle vector: Rz(θz)·Ry(θy)·Rx(θx).
Eigen::Matrix3d rotation_from_angles(const Eigen::Vector3d& theta);

/// Recover angles (θx, θy, θz) with R = Rz·Ry·Rx. θy is clamped to
/// [−π/2, π/2]; at the gimbal singularity θx is set to 0.
Eigen::Vector3d angles_from_rotation(const Eigen::Matrix3d& rotation);

Eigen::Vector3d apply_pose(const Pose& pose, const Eigen::Vector3d& p);
Point3 apply_pose(const Pose& pose, const Point3& p);

/// (Rᵀ, −Rᵀt).
Pose inverse(const Pose& pose);

/// Wrap an angle into (−π, π].
double wrap_angle(double angle);

/// inclination = arccos(z/‖p‖), azimuth = atan2(y, x). Azimuth is 0 by
/// convention when x = y = 0. Throws ZeroNorm for the zero vector.
SphericalAngles point_to_angles(const Eigen::Vector3d& p);

/// Unit direction for spherical angles.
Eigen::Vector3d angles_to_direction(const SphericalAngles& angles);

/// inclination = π·v/H, azimuth = 2π·u/W − π; u wraps modulo W.
SphericalAngles pixel_to_angles(const Pixel& pixel, const PanoramaSpec& spec);

/// Exact inverse of pixel_to_angles on [0, W) × [0, H].
Pixel angles_to_pixel(const SphericalAngles& angles, const PanoramaSpec& spec);

}  // namespace ilcc
