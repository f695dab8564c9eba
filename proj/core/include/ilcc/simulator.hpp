#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilcc/config.hpp"
#include "ilcc/types.hpp"

namespace ilcc {

/// Per-axis Gaussian measurement noise in the board-local frame (x, y in
/// plane, z along the normal), zero mean, scaled by `multiplier`.
struct NoiseModel {
  Eigen::Vector3d sigma{0.0016, 0.0016, 0.01};
  double multiplier = 1.0;
};

enum class PointLabel : std::uint8_t { Board = 0, Wall = 1, Pole = 2 };

struct WallSpec {
  bool enabled = false;
  double distance_behind = 3.0;  // meters behind the board along its azimuth
  double width = 4.0;
  double height = 3.0;
};

struct PoleSpec {
  bool enabled = false;
  double azimuth_deg = 25.0;
  double distance = 2.0;
  double radius = 0.1;
  double height = 2.0;
  double base_z = -1.0;
};

/// A posed chessboard in front of a spinning LiDAR, plus optional background
/// primitives. `center_height` defaults to −0.15·range, which keeps the
/// default board inside the HDL-32e vertical field of view.
struct ScenarioSpec {
  BoardSpec board;
  SensorModel sensor = SensorModel::hdl32();
  NoiseModel noise;
  PanoramaSpec panorama;

  double range = 1.0;
  double azimuth_deg = 0.0;
  std::optional<double> center_height;  // meters; empty = −0.15·range
  double lean_deg = 12.0;               // top tilts away from the sensor
  double yaw_deg = 0.0;
  double inplane_deg = 0.0;

  double intensity_low = 20.0;
  double intensity_high = 100.0;
  double intensity_jitter = 0.0;  // Gaussian σ on intensities, 0 = off
  double background_intensity = 55.0;

  /// Fraction of returns dropped (seeded). Real scans return fewer points
  /// than the theoretical ceiling; raise this when simulating distant
  /// boards so counts stay inside the detector's expected interval.
  double dropout = 0.0;

  WallSpec wall;
  PoleSpec pole;

  Pose true_extrinsics;  // LiDAR -> camera
  std::uint64_t seed = 1;

  double effective_center_height() const { return center_height.value_or(-0.15 * range); }
  void validate() const;
};

struct GroundTruth {
  std::vector<Eigen::Vector3d> corners;  // counting order: bottom-to-top rows, left-to-right
  Pose extrinsics;                       // copied from the scenario
  Pose board_pose;                       // board frame -> LiDAR frame
  std::vector<PointLabel> labels;        // per cloud point
  std::vector<std::uint8_t> colors;      // per cloud point: 0 black, 1 white, 255 n/a
};

/// Ray-cast one frame: ring elevations × azimuth steps, plane/cylinder
/// intersections, two-level intensity from the cell color, board-frame
/// Gaussian noise. Deterministic for a fixed seed. Throws EmptyScan when the
/// board is never hit.
std::pair<PointCloud, GroundTruth> simulate_scan(const ScenarioSpec& scenario);

/// Project the true corners through extrinsics onto the panorama, counting
/// order preserved; optional Gaussian pixel noise.
std::vector<Pixel> project_corners(const GroundTruth& truth, const Pose& extrinsics, const PanoramaSpec& spec,
                                   double pixel_noise = 0.0, std::uint64_t seed = 0);

struct CornerErrorStats {
  double distance = 0.0;      // sqrt(Σ‖Δ‖²)/n, meters
  double relative_pct = 0.0;  // 100·distance/square
  double rms = 0.0;           // sqrt(Σ‖Δ‖²/n), meters — conventional RMS, reported alongside
};

/// The corner-error statistic; estimated and truth must be equal-length and
/// order-matched (CountMismatch otherwise).
CornerErrorStats corner_error(std::span<const Eigen::Vector3d> estimated, std::span<const Eigen::Vector3d> truth,
                              double square);

enum class SweepVariable { NoiseMultiplier, Range };

struct SweepRow {
  double value = 0.0;
  int repeats = 0;
  int failures = 0;
  double mean_relative_pct = 0.0;
  double std_relative_pct = 0.0;
  double mean_distance = 0.0;
  double std_distance = 0.0;
  double mean_rms = 0.0;
  std::vector<double> samples;  // per-repeat relative errors (successes only)
};

/// Repeat simulate → locate → fit corners → score over seeded runs for each
/// condition value. Per-run RNG streams derive from (seed, condition,
/// repeat), so results are independent of scheduling. `jobs` > 1 runs
/// repeats concurrently.
std::vector<SweepRow> sweep(const ScenarioSpec& base, const Config& config, SweepVariable variable,
                            std::span<const double> values, int repeats, std::uint64_t seed, int jobs = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepVariable variable);

/// Deterministic stream split for (seed, condition, repeat).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t condition, std::uint64_t repeat);

/// Scenario loader; same key = value format as the pipeline config.
ScenarioSpec scenario_from_key_values(const KeyValues& kv);
ScenarioSpec load_scenario(const std::string& path);

}  // namespace ilcc
