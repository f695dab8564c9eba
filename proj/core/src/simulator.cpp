#include "ilcc/simulator.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "ilcc/errors.hpp"
#include "ilcc/geometry.hpp"
#include "ilcc/io.hpp"
#include "ilcc/intensity_fit.hpp"
#include "ilcc/pipeline.hpp"

namespace ilcc {

namespace {

Eigen::Matrix3d axis_rotation_x(double a) {
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return m;
}
Eigen::Matrix3d axis_rotation_y(double a) {
  Eigen::Matrix3d m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}
Eigen::Matrix3d axis_rotation_z(double a) {
  Eigen::Matrix3d m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

constexpr double kDegree = M_PI / 180.0;

struct BoardFrame {
  Eigen::Vector3d center;
  Eigen::Matrix3d axes;  // columns: width, height, normal (outward)
};

BoardFrame board_frame(const ScenarioSpec& s) {
  const double h = s.effective_center_height();
  if (!(s.range > std::abs(h))) raise(ErrorCode::BadInput, "scenario: |center_height| must be < range");
  const double rho = std::sqrt(s.range * s.range - h * h);
  const double az = s.azimuth_deg * kDegree;

  BoardFrame frame;
  frame.center = {rho * std::cos(az), rho * std::sin(az), h};

  Eigen::Matrix3d base;
  base.col(0) = Eigen::Vector3d(-std::sin(az), std::cos(az), 0.0);  // width, toward +azimuth
  base.col(1) = Eigen::Vector3d(0.0, 0.0, 1.0);                     // height, up
  base.col(2) = base.col(0).cross(base.col(1));                     // normal, away from sensor
  frame.axes = base * axis_rotation_x(s.lean_deg * kDegree) * axis_rotation_y(s.yaw_deg * kDegree) *
               axis_rotation_z(s.inplane_deg * kDegree);
  return frame;
}

struct PlaneTarget {
  BoardFrame frame;
  double half_width;
  double half_height;
};

/// Positive ray-plane range and local in-plane coordinates, or no value.
std::optional<std::pair<double, Eigen::Vector2d>> hit_plane(const Eigen::Vector3d& dir, const PlaneTarget& target) {
  const Eigen::Vector3d normal = target.frame.axes.col(2);
  const double denom = normal.dot(dir);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = normal.dot(target.frame.center) / denom;
  if (t <= 0.1) return std::nullopt;
  const Eigen::Vector3d local = target.frame.axes.transpose() * (t * dir - target.frame.center);
  if (std::abs(local.x()) > target.half_width || std::abs(local.y()) > target.half_height) return std::nullopt;
  return std::make_pair(t, Eigen::Vector2d(local.x(), local.y()));
}

std::optional<double> hit_cylinder(const Eigen::Vector3d& dir, const PoleSpec& pole, const Eigen::Vector2d& axis_xy) {
  const double a = dir.x() * dir.x() + dir.y() * dir.y();
  if (a < 1e-12) return std::nullopt;
  const double b = -2.0 * (dir.x() * axis_xy.x() + dir.y() * axis_xy.y());
  const double c = axis_xy.squaredNorm() - pole.radius * pole.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  if (t <= 0.1) return std::nullopt;
  const double z = t * dir.z();
  if (z < pole.base_z || z > pole.base_z + pole.height) return std::nullopt;
  return t;
}

}  // namespace

void ScenarioSpec::validate() const {
  board.validate();
  sensor.validate();
  if (!(range > 0.0)) raise(ErrorCode::BadInput, "scenario.range must be positive");
  if (!(intensity_low < intensity_high)) raise(ErrorCode::BadInput, "scenario intensity_low must be < intensity_high");
  if (intensity_low < 0.0) raise(ErrorCode::BadInput, "scenario intensities must be non-negative");
  if (!(noise.multiplier >= 0.0)) raise(ErrorCode::BadInput, "noise.multiplier must be >= 0");
  if (noise.sigma.minCoeff() < 0.0) raise(ErrorCode::BadInput, "noise.sigma must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) raise(ErrorCode::BadInput, "scenario.dropout must be in [0, 1)");
  if (intensity_jitter < 0.0) raise(ErrorCode::BadInput, "scenario.intensity_jitter must be >= 0");
}

std::pair<PointCloud, GroundTruth> simulate_scan(const ScenarioSpec& scenario) {
  scenario.validate();
  const BoardFrame board = board_frame(scenario);
  const double board_w = scenario.board.width();
  const double board_h = scenario.board.height();
  const PlaneTarget board_target{board, board_w / 2.0, board_h / 2.0};

  // Wall: vertical plane behind the board at the same azimuth, facing back.
  const double az = scenario.azimuth_deg * kDegree;
  BoardFrame wall_frame;
  wall_frame.center = Eigen::Vector3d(std::cos(az), std::sin(az), 0.0) * (scenario.range + scenario.wall.distance_behind);
  wall_frame.axes.col(0) = Eigen::Vector3d(-std::sin(az), std::cos(az), 0.0);
  wall_frame.axes.col(1) = Eigen::Vector3d(0.0, 0.0, 1.0);
  wall_frame.axes.col(2) = wall_frame.axes.col(0).cross(wall_frame.axes.col(1));
  const PlaneTarget wall_target{wall_frame, scenario.wall.width / 2.0, scenario.wall.height / 2.0};

  const double pole_az = scenario.pole.azimuth_deg * kDegree;
  const Eigen::Vector2d pole_xy(scenario.pole.distance * std::cos(pole_az), scenario.pole.distance * std::sin(pole_az));

  std::mt19937_64 rng(scenario.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::Vector3d sigma = scenario.noise.sigma * scenario.noise.multiplier;

  PointCloud cloud;
  GroundTruth truth;
  truth.extrinsics = scenario.true_extrinsics;
  truth.board_pose.theta = angles_from_rotation(board.axes);
  truth.board_pose.t = board.center;

  const int azimuth_steps = static_cast<int>(std::floor(2.0 * M_PI / scenario.sensor.horizontal_res));
  const int rings = static_cast<int>(scenario.sensor.ring_elevations.size());
  int board_points = 0;

  for (int step = 0; step < azimuth_steps; ++step) {
    const double ray_az = step * scenario.sensor.horizontal_res;
    const double ca = std::cos(ray_az), sa = std::sin(ray_az);
    for (int ring = 0; ring < rings; ++ring) {
      const double elev = scenario.sensor.ring_elevations[ring];
      const Eigen::Vector3d dir(std::cos(elev) * ca, std::cos(elev) * sa, std::sin(elev));

      PointLabel label = PointLabel::Board;
      double best_t = std::numeric_limits<double>::infinity();
      Eigen::Vector2d plane_local = Eigen::Vector2d::Zero();

      if (const auto hit = hit_plane(dir, board_target)) {
        best_t = hit->first;
        plane_local = hit->second;
        label = PointLabel::Board;
      }
      if (scenario.wall.enabled) {
        if (const auto hit = hit_plane(dir, wall_target); hit && hit->first < best_t) {
          best_t = hit->first;
          plane_local = hit->second;
          label = PointLabel::Wall;
        }
      }
      if (scenario.pole.enabled) {
        if (const auto t = hit_cylinder(dir, scenario.pole, pole_xy); t && *t < best_t) {
          best_t = *t;
          label = PointLabel::Pole;
        }
      }
      if (!std::isfinite(best_t)) continue;

      if (scenario.dropout > 0.0 && uniform(rng) < scenario.dropout) continue;

      Point3 point;
      point.ring = ring;
      std::uint8_t color = 255;
      double intensity = scenario.background_intensity;

      if (label == PointLabel::Board) {
        const int col = std::clamp(static_cast<int>(std::floor((plane_local.x() + board_w / 2.0) / scenario.board.square)),
                                   0, scenario.board.cells_wide() - 1);
        const int row = std::clamp(static_cast<int>(std::floor((plane_local.y() + board_h / 2.0) / scenario.board.square)),
                                   0, scenario.board.cells_high() - 1);
        const int origin = scenario.board.origin_cell_color == CellColor::White ? 1 : 0;
        const bool white = ((col + row) & 1) ^ origin;
        color = white ? 1 : 0;
        intensity = white ? scenario.intensity_high : scenario.intensity_low;

        const Eigen::Vector3d local(plane_local.x() + sigma.x() * gauss(rng),
                                    plane_local.y() + sigma.y() * gauss(rng), sigma.z() * gauss(rng));
        const Eigen::Vector3d p = board.center + board.axes * local;
        point.x = p.x();
        point.y = p.y();
        point.z = p.z();
        ++board_points;
      } else if (label == PointLabel::Wall) {
        const Eigen::Vector3d local(plane_local.x() + sigma.x() * gauss(rng),
                                    plane_local.y() + sigma.y() * gauss(rng), sigma.z() * gauss(rng));
        const Eigen::Vector3d p = wall_frame.center + wall_frame.axes * local;
        point.x = p.x();
        point.y = p.y();
        point.z = p.z();
      } else {
        const Eigen::Vector3d p = best_t * dir +
                                  Eigen::Vector3d(sigma.x() * gauss(rng), sigma.y() * gauss(rng), sigma.z() * gauss(rng));
        point.x = p.x();
        point.y = p.y();
        point.z = p.z();
      }

      if (scenario.intensity_jitter > 0.0) intensity += scenario.intensity_jitter * gauss(rng);
      point.intensity = std::max(0.0, intensity);

      cloud.points.push_back(point);
      truth.labels.push_back(label);
      truth.colors.push_back(color);
    }
  }

  if (board_points == 0) raise(ErrorCode::EmptyScan, "no ray hit the board");

  // Ground-truth interior corners, counting order: bottom-to-top rows,
  // left-to-right within a row.
  for (int row = 1; row < scenario.board.cells_high(); ++row) {
    for (int col = 1; col < scenario.board.cells_wide(); ++col) {
      const Eigen::Vector3d local(-board_w / 2.0 + col * scenario.board.square,
                                  -board_h / 2.0 + row * scenario.board.square, 0.0);
      truth.corners.push_back(board.center + board.axes * local);
    }
  }
  cloud.frame_id = "sim";
  return {std::move(cloud), std::move(truth)};
}

std::vector<Pixel> project_corners(const GroundTruth& truth, const Pose& extrinsics, const PanoramaSpec& spec,
                                   double pixel_noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Matrix3d r = rotation_from_angles(extrinsics.theta);
  std::vector<Pixel> out;
  out.reserve(truth.corners.size());
  for (const Eigen::Vector3d& corner : truth.corners) {
    Pixel px = angles_to_pixel(point_to_angles(r * corner + extrinsics.t), spec);
    if (pixel_noise > 0.0) {
      px.u += pixel_noise * gauss(rng);
      px.v += pixel_noise * gauss(rng);
    }
    out.push_back(px);
  }
  return out;
}

CornerErrorStats corner_error(std::span<const Eigen::Vector3d> estimated, std::span<const Eigen::Vector3d> truth,
                              double square) {
  if (estimated.size() != truth.size()) {
    raise(ErrorCode::CountMismatch, "estimated " + std::to_string(estimated.size()) + " corners vs truth " +
                                        std::to_string(truth.size()));
  }
  if (estimated.empty()) raise(ErrorCode::CountMismatch, "no corners to compare");
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) sum_sq += (estimated[i] - truth[i]).squaredNorm();
  const double n = static_cast<double>(estimated.size());
  CornerErrorStats stats;
  stats.distance = std::sqrt(sum_sq) / n;
  stats.relative_pct = 100.0 * stats.distance / square;
  stats.rms = std::sqrt(sum_sq / n);
  return stats;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t condition, std::uint64_t repeat) {
  // splitmix64 over the packed triple
  std::uint64_t x = seed;
  for (std::uint64_t salt : {condition + 0x9e3779b97f4a7c15ull, repeat + 0xbf58476d1ce4e5b9ull}) {
    x += salt;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
  }
  return x;
}

namespace {

struct RunOutcome {
  bool ok = false;
  CornerErrorStats stats;
};

RunOutcome run_once(const ScenarioSpec& scenario, const Config& config) {
  RunOutcome outcome;
  try {
    auto [cloud, truth] = simulate_scan(scenario);
    // Ground truth identifies the board, so corner estimation is scored on
    // its own (the detection filters have their own noise envelope).
    std::vector<int> board_indices;
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
      if (truth.labels[i] == PointLabel::Board) board_indices.push_back(static_cast<int>(i));
    }
    const BoardDetection detection = board_geometry_from_indices(cloud, std::move(board_indices), config);
    const CornerFit fit = estimate_corners(detection, cloud, config.board, config.fit);
    outcome.stats = corner_error(fit.corners, truth.corners, scenario.board.square);
    outcome.ok = true;
  } catch (const Error&) {
    outcome.ok = false;
  }
  return outcome;
}

}  // namespace

std::vector<SweepRow> sweep(const ScenarioSpec& base, const Config& config, SweepVariable variable,
                            std::span<const double> values, int repeats, std::uint64_t seed, int jobs) {
  if (repeats < 1) raise(ErrorCode::BadInput, "sweep needs repeats >= 1");
  if (values.empty()) raise(ErrorCode::BadInput, "sweep needs at least one condition value");
  jobs = std::max(1, jobs);

  std::vector<SweepRow> rows;
  for (std::size_t ci = 0; ci < values.size(); ++ci) {
    ScenarioSpec scenario = base;
    if (variable == SweepVariable::NoiseMultiplier) {
      scenario.noise.multiplier = values[ci];
    } else {
      scenario.range = values[ci];
    }

    std::vector<RunOutcome> outcomes(repeats);
    auto worker = [&](int rep) {
      ScenarioSpec run = scenario;
      run.seed = derive_seed(seed, ci, static_cast<std::uint64_t>(rep));
      outcomes[rep] = run_once(run, config);
    };
    if (jobs == 1) {
      for (int rep = 0; rep < repeats; ++rep) worker(rep);
    } else {
      std::vector<std::future<void>> pending;
      for (int rep = 0; rep < repeats; ++rep) {
        pending.push_back(std::async(std::launch::async, worker, rep));
        if (static_cast<int>(pending.size()) >= jobs) {
          for (auto& fut : pending) fut.get();
          pending.clear();
        }
      }
      for (auto& fut : pending) fut.get();
    }

    SweepRow row;
    row.value = values[ci];
    row.repeats = repeats;
    double sum_rel = 0.0, sum_dist = 0.0, sum_rms = 0.0;
    for (const RunOutcome& o : outcomes) {
      if (!o.ok) {
        row.failures++;
        continue;
      }
      row.samples.push_back(o.stats.relative_pct);
      sum_rel += o.stats.relative_pct;
      sum_dist += o.stats.distance;
      sum_rms += o.stats.rms;
    }
    const int good = repeats - row.failures;
    if (good > 0) {
      row.mean_relative_pct = sum_rel / good;
      row.mean_distance = sum_dist / good;
      row.mean_rms = sum_rms / good;
      double var_rel = 0.0, var_dist = 0.0;
      for (const RunOutcome& o : outcomes) {
        if (!o.ok) continue;
        var_rel += (o.stats.relative_pct - row.mean_relative_pct) * (o.stats.relative_pct - row.mean_relative_pct);
        var_dist += (o.stats.distance - row.mean_distance) * (o.stats.distance - row.mean_distance);
      }
      row.std_relative_pct = std::sqrt(var_rel / good);
      row.std_distance = std::sqrt(var_dist / good);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepVariable variable) {
  std::ostringstream out;
  out << (variable == SweepVariable::NoiseMultiplier ? "noise_multiplier" : "range_m")
      << ",repeats,failures,mean_relative_pct,std_relative_pct,mean_distance_m,std_distance_m,mean_rms_m\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.value) << ',' << row.repeats << ',' << row.failures << ','
        << format_double(row.mean_relative_pct) << ',' << format_double(row.std_relative_pct) << ','
        << format_double(row.mean_distance) << ',' << format_double(row.std_distance) << ','
        << format_double(row.mean_rms) << '\n';
  }
  return out.str();
}

ScenarioSpec scenario_from_key_values(const KeyValues& kv) {
  KeyValueReader r(kv);
  ScenarioSpec s;

  s.board.rows = r.integer("board.rows", s.board.rows);
  s.board.cols = r.integer("board.cols", s.board.cols);
  s.board.square = r.number("board.square", s.board.square);
  const std::string width_axis = r.text("board.width_axis", "cols");
  if (width_axis != "cols" && width_axis != "rows") raise(ErrorCode::BadInput, "board.width_axis must be cols/rows");
  s.board.width_is_cols = width_axis == "cols";
  const std::string color = r.text("board.origin_cell_color", "black");
  if (color != "black" && color != "white") raise(ErrorCode::BadInput, "board.origin_cell_color must be black/white");
  s.board.origin_cell_color = color == "white" ? CellColor::White : CellColor::Black;

  s.sensor = SensorModel::uniform(r.number("sensor.horizontal_res_deg", 0.16), r.number("sensor.vertical_res_deg", 1.33),
                                  r.integer("sensor.ring_count", 32), r.number("sensor.ring_start_deg", -30.67));

  s.range = r.number("scenario.range", s.range);
  s.azimuth_deg = r.number("scenario.azimuth_deg", s.azimuth_deg);
  if (r.has("scenario.center_height")) s.center_height = r.number("scenario.center_height", 0.0);
  s.lean_deg = r.number("scenario.lean_deg", s.lean_deg);
  s.yaw_deg = r.number("scenario.yaw_deg", s.yaw_deg);
  s.inplane_deg = r.number("scenario.inplane_deg", s.inplane_deg);
  s.intensity_low = r.number("scenario.intensity_low", s.intensity_low);
  s.intensity_high = r.number("scenario.intensity_high", s.intensity_high);
  s.intensity_jitter = r.number("scenario.intensity_jitter", s.intensity_jitter);
  s.background_intensity = r.number("scenario.background_intensity", s.background_intensity);
  s.dropout = r.number("scenario.dropout", s.dropout);
  s.seed = r.unsigned_integer("scenario.seed", s.seed);

  s.noise.sigma.x() = r.number("noise.sigma_x", s.noise.sigma.x());
  s.noise.sigma.y() = r.number("noise.sigma_y", s.noise.sigma.y());
  s.noise.sigma.z() = r.number("noise.sigma_z", s.noise.sigma.z());
  s.noise.multiplier = r.number("noise.multiplier", s.noise.multiplier);

  s.wall.enabled = r.boolean("background.wall", s.wall.enabled);
  s.wall.distance_behind = r.number("background.wall_distance", s.wall.distance_behind);
  s.wall.width = r.number("background.wall_width", s.wall.width);
  s.wall.height = r.number("background.wall_height", s.wall.height);
  s.pole.enabled = r.boolean("background.pole", s.pole.enabled);
  s.pole.azimuth_deg = r.number("background.pole_azimuth_deg", s.pole.azimuth_deg);
  s.pole.distance = r.number("background.pole_distance", s.pole.distance);
  s.pole.radius = r.number("background.pole_radius", s.pole.radius);
  s.pole.height = r.number("background.pole_height", s.pole.height);
  s.pole.base_z = r.number("background.pole_base_z", s.pole.base_z);

  s.true_extrinsics.theta = Eigen::Vector3d(r.number("extrinsics.theta_x_deg", 0.0), r.number("extrinsics.theta_y_deg", 0.0),
                                            r.number("extrinsics.theta_z_deg", 0.0)) *
                            kDegree;
  s.true_extrinsics.t =
      Eigen::Vector3d(r.number("extrinsics.t_x", 0.0), r.number("extrinsics.t_y", 0.0), r.number("extrinsics.t_z", 0.0));

  s.panorama.width = r.integer("panorama.width", s.panorama.width);
  s.panorama.height = r.integer("panorama.height", s.panorama.height);

  r.reject_unknown();
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& path) { return scenario_from_key_values(load_key_values(path)); }

}  // namespace ilcc
