#include "ilcc/geometry.hpp"

#include <cmath>

#include "ilcc/errors.hpp"

namespace ilcc {

Eigen::Matrix3d rotation_from_angles(const Eigen::Vector3d& theta) {
  const double cx = std::cos(theta.x()), sx = std::sin(theta.x());
  const double cy = std::cos(theta.y()), sy = std::sin(theta.y());
  const double cz = std::cos(theta.z()), sz = std::sin(theta.z());

  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rz * ry * rx;
}

Eigen::Vector3d angles_from_rotation(const Eigen::Matrix3d& r) {
  // R = Rz·Ry·Rx gives R(2,0) = −sin(θy).
  const double sy = -r(2, 0);
  const double theta_y = std::asin(std::clamp(sy, -1.0, 1.0));
  double theta_x, theta_z;
  if (std::abs(std::cos(theta_y)) > 1e-12) {
    theta_x = std::atan2(r(2, 1), r(2, 2));
    theta_z = std::atan2(r(1, 0), r(0, 0));
  } else {
    theta_x = 0.0;
    theta_z = std::atan2(-r(0, 1), r(1, 1));
  }
  return {theta_x, theta_y, theta_z};
}

Eigen::Vector3d apply_pose(const Pose& pose, const Eigen::Vector3d& p) {
  return rotation_from_angles(pose.theta) * p + pose.t;
}

Point3 apply_pose(const Pose& pose, const Point3& p) {
  const Eigen::Vector3d q = apply_pose(pose, p.position());
  Point3 out = p;
  out.x = q.x();
  out.y = q.y();
  out.z = q.z();
  return out;
}

Pose inverse(const Pose& pose) {
  const Eigen::Matrix3d r = rotation_from_angles(pose.theta);
  Pose inv;
  inv.theta = angles_from_rotation(r.transpose());
  inv.t = -(r.transpose() * pose.t);
  return inv;
}

double wrap_angle(double angle) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(angle, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

SphericalAngles point_to_angles(const Eigen::Vector3d& p) {
  const double norm = p.norm();
  if (norm == 0.0) raise(ErrorCode::ZeroNorm, "cannot take angles of the zero vector");
  SphericalAngles out;
  out.inclination = std::acos(std::clamp(p.z() / norm, -1.0, 1.0));
  out.azimuth = (p.x() == 0.0 && p.y() == 0.0) ? 0.0 : std::atan2(p.y(), p.x());
  return out;
}

Eigen::Vector3d angles_to_direction(const SphericalAngles& angles) {
  const double si = std::sin(angles.inclination);
  return {si * std::cos(angles.azimuth), si * std::sin(angles.azimuth), std::cos(angles.inclination)};
}

SphericalAngles pixel_to_angles(const Pixel& pixel, const PanoramaSpec& spec) {
  const double w = static_cast<double>(spec.width);
  const double h = static_cast<double>(spec.height);
  double u = std::fmod(pixel.u, w);
  if (u < 0.0) u += w;
  SphericalAngles out;
  out.inclination = M_PI * pixel.v / h;
  out.azimuth = 2.0 * M_PI * u / w - M_PI;
  return out;
}

Pixel angles_to_pixel(const SphericalAngles& angles, const PanoramaSpec& spec) {
  const double w = static_cast<double>(spec.width);
  const double h = static_cast<double>(spec.height);
  Pixel out;
  out.u = (angles.azimuth + M_PI) * w / (2.0 * M_PI);
  if (out.u >= w) out.u -= w;
  out.v = angles.inclination * h / M_PI;
  return out;
}

}  // namespace ilcc
