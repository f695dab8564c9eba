#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ilcc/config.hpp"
#include "ilcc/simulator.hpp"
#include "ilcc/types.hpp"

namespace ilcc::test {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ilcc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Pose random_pose(std::mt19937_64& rng, double angle_scale = 1.0, double t_scale = 1.0) {
  std::uniform_real_distribution<double> angle(-angle_scale, angle_scale);
  std::uniform_real_distribution<double> shift(-t_scale, t_scale);
  Pose pose;
  pose.theta = {angle(rng), angle(rng), angle(rng)};
  pose.t = {shift(rng), shift(rng), shift(rng)};
  return pose;
}

inline ScenarioSpec make_scenario(double range, double azimuth_deg, double lean_deg, double inplane_deg,
                                  std::uint64_t seed, double noise_multiplier = 0.0, double dropout = 0.0) {
  ScenarioSpec s;
  s.range = range;
  s.azimuth_deg = azimuth_deg;
  s.lean_deg = lean_deg;
  s.inplane_deg = inplane_deg;
  s.seed = seed;
  s.noise.multiplier = noise_multiplier;
  s.dropout = dropout;
  return s;
}

/// Synthetic vertical board at +x: points in the board plane with
/// pattern-consistent intensities, symmetric about the board center
/// (4 samples per cell at ±square/4 offsets).
struct SyntheticBoard {
  PointCloud cloud;
  std::vector<int> indices;                  // all points
  std::vector<Eigen::Vector3d> true_corners;  // counting order
  BoardSpec spec;
};

inline SyntheticBoard symmetric_board_cloud(double distance = 1.2, double low = 20.0, double high = 100.0) {
  SyntheticBoard board;
  board.spec = BoardSpec{};
  const double s = board.spec.square;
  const double w = board.spec.width(), h = board.spec.height();
  const int origin = board.spec.origin_cell_color == CellColor::White ? 1 : 0;
  int index = 0;
  for (int col = 0; col < board.spec.cells_wide(); ++col) {
    for (int row = 0; row < board.spec.cells_high(); ++row) {
      const double cx = -w / 2.0 + (col + 0.5) * s;
      const double cy = -h / 2.0 + (row + 0.5) * s;
      const bool white = ((col + row) & 1) ^ origin;
      for (double ox : {-s / 4.0, s / 4.0}) {
        for (double oy : {-s / 4.0, s / 4.0}) {
          Point3 p;
          p.x = distance;
          p.y = cx + ox;   // board width along +y
          p.z = cy + oy;   // board height along +z
          p.intensity = white ? high : low;
          p.ring = row;
          board.cloud.points.push_back(p);
          board.indices.push_back(index++);
        }
      }
    }
  }
  for (int row = 1; row < board.spec.cells_high(); ++row) {
    for (int col = 1; col < board.spec.cells_wide(); ++col) {
      board.true_corners.emplace_back(distance, -w / 2.0 + col * s, -h / 2.0 + row * s);
    }
  }
  return board;
}

}  // namespace ilcc::test
