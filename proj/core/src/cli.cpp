#include "ilcc/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ilcc/calibration.hpp"
#include "ilcc/errors.hpp"
#include "ilcc/geometry.hpp"
#include "ilcc/io.hpp"
#include "ilcc/pipeline.hpp"
#include "ilcc/simulator.hpp"

namespace ilcc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

json vector3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json rotation_json(const Eigen::Matrix3d& r) {
  json out = json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.push_back(r(i, j));
  return out;
}

void dump_json(const std::string& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

Config load_config_or_default(const std::string& path) {
  return path.empty() ? Config{} : load_config(path);
}

std::vector<FrameInput> load_frames(const std::string& manifest_path, const Config& config) {
  std::vector<FrameInput> frames;
  for (const ManifestEntry& entry : load_manifest(manifest_path)) {
    FrameInput frame;
    frame.frame_id = fs::path(entry.cloud).stem().string();
    frame.cloud = read_cloud_csv(entry.cloud);
    frame.corners2d = load_image_corners(entry.corners2d, config.board, config.panorama);
    frames.push_back(std::move(frame));
  }
  return frames;
}

int cmd_segment(const std::string& cloud_path, const std::string& out_path, const Config& base,
                double gap_dist, double gap_angle_deg, double merge_dist) {
  SegmentationParams params = base.segmentation;
  if (gap_dist > 0.0) params.gap_dist = gap_dist;
  if (gap_angle_deg > 0.0) params.gap_angle = gap_angle_deg * M_PI / 180.0;
  if (merge_dist > 0.0) params.merge_dist = merge_dist;

  const PointCloud cloud = read_cloud_csv(cloud_path);
  const std::vector<Segment> segments = segment_cloud(cloud, params);

  json doc;
  doc["cloud"] = cloud_path;
  doc["point_count"] = cloud.size();
  json list = json::array();
  for (const Segment& seg : segments) {
    json item;
    item["count"] = seg.count();
    item["centroid"] = vector3_json(seg.centroid);
    item["indices"] = seg.indices;
    list.push_back(std::move(item));
  }
  doc["segments"] = std::move(list);
  dump_json(out_path, doc);
  std::cout << "wrote " << segments.size() << " segments to " << out_path << "\n";
  return 0;
}

int cmd_find_board(const std::string& cloud_path, const std::string& out_path, const Config& config) {
  const PointCloud cloud = read_cloud_csv(cloud_path);
  const BoardDetection detection = locate_board(cloud, config);

  json doc;
  doc["cloud"] = cloud_path;
  doc["uniformity"] = detection.uniformity;
  doc["segment_indices"] = detection.segment.indices;
  doc["board_indices"] = detection.point_indices;
  doc["rotation_row_major"] = rotation_json(detection.transform.rotation);
  doc["translation"] = vector3_json(detection.transform.translation);
  dump_json(out_path, doc);
  std::cout << "board segment: " << detection.point_indices.size() << " points, uniformity "
            << detection.uniformity << "\n";
  return 0;
}

int cmd_corners3d(const std::string& cloud_path, const std::string& out_path, const Config& config,
                  const std::string& debug_path) {
  const PointCloud cloud = read_cloud_csv(cloud_path);
  const BoardDetection detection = locate_board(cloud, config);
  const CornerFit fit = estimate_corners(detection, cloud, config.board, config.fit);

  std::ostringstream out;
  for (const Eigen::Vector3d& corner : fit.corners) {
    out << format_double(corner.x()) << ',' << format_double(corner.y()) << ',' << format_double(corner.z()) << '\n';
  }
  write_text_file(out_path, out.str());

  if (!debug_path.empty()) {
    std::ostringstream dbg;
    dbg << "model_x,model_y,class,intensity\n";
    for (std::size_t i = 0; i < detection.canonical.size(); ++i) {
      const double intensity = cloud.points[detection.point_indices[i]].intensity;
      const PointClass cls = classify_point(intensity, fit.zone);
      const Eigen::Vector2d in_model =
          fit.fit.pose.apply({detection.canonical[i].x(), detection.canonical[i].y()});
      const char* name = cls == PointClass::Gray ? "gray" : (cls == PointClass::White ? "white" : "black");
      dbg << format_double(in_model.x()) << ',' << format_double(in_model.y()) << ',' << name << ','
          << format_double(intensity) << '\n';
    }
    write_text_file(debug_path, dbg.str());
  }
  std::cout << "estimated " << fit.corners.size() << " corners (cost " << fit.fit.cost << ", "
            << fit.fit.classified_points << " classified points)\n";
  return 0;
}

json report_json(const FrameReport& report) {
  json item;
  item["frame_id"] = report.frame_id;
  item["used"] = report.used;
  if (!report.error.empty()) item["error"] = report.error;
  if (report.used) {
    item["rms_residual_rad"] = report.rms_residual;
    item["e"] = report.reprojection.e;
    item["cost_px"] = report.reprojection.cost_px;
    item["counted_points"] = report.reprojection.counted_points;
    item["total_points"] = report.reprojection.total_points;
    item["counted_cells"] = report.reprojection.counted_cells;
    item["total_cells"] = report.reprojection.total_cells;
    item["board_range_m"] = report.reprojection.board_range;
  }
  return item;
}

int cmd_calibrate(const std::string& manifest_path, const std::string& out_path, const Config& config, int jobs) {
  const std::vector<FrameInput> frames = load_frames(manifest_path, config);
  const CalibrationResult result = calibrate(frames, config, jobs);

  json doc;
  doc["theta_rad"] = vector3_json(result.extrinsics.theta);
  doc["theta_deg"] = vector3_json(result.extrinsics.theta * 180.0 / M_PI);
  doc["t"] = vector3_json(result.extrinsics.t);
  doc["rotation_row_major"] = rotation_json(rotation_from_angles(result.extrinsics.theta));
  doc["converged"] = result.refinement.converged;
  doc["iterations"] = result.refinement.iterations;
  doc["rms_residual_rad"] = result.refinement.rms_residual;
  doc["cost_trace"] = result.refinement.cost_trace;
  doc["frames_used"] = result.frames_used;
  doc["low_confidence"] = result.low_confidence;
  json frame_list = json::array();
  for (const FrameReport& report : result.frames) frame_list.push_back(report_json(report));
  doc["frames"] = std::move(frame_list);
  dump_json(out_path, doc);

  std::cout << "extrinsics: theta_deg = [" << result.extrinsics.theta.transpose() * 180.0 / M_PI << "], t = ["
            << result.extrinsics.t.transpose() << "] (" << result.frames_used << "/" << frames.size()
            << " frames)\n";
  return 0;
}

int cmd_evaluate(const std::string& extrinsics_path, const std::string& manifest_path, const std::string& out_path,
                 const Config& config) {
  json doc;
  {
    std::ifstream in(extrinsics_path);
    if (!in) raise(ErrorCode::IoError, "cannot open extrinsics file '" + extrinsics_path + "'");
    try {
      in >> doc;
    } catch (const std::exception& e) {
      raise(ErrorCode::BadInput, extrinsics_path + ": invalid JSON: " + e.what());
    }
  }
  if (!doc.contains("theta_rad") || !doc.contains("t")) {
    raise(ErrorCode::BadInput, extrinsics_path + ": missing theta_rad or t");
  }
  Pose extrinsics;
  for (int i = 0; i < 3; ++i) {
    extrinsics.theta(i) = doc["theta_rad"][i].get<double>();
    extrinsics.t(i) = doc["t"][i].get<double>();
  }

  std::ostringstream csv;
  csv << "frame_id,e,cost_px,counted_points,total_points,counted_cells,total_cells,board_range_m\n";
  for (const ManifestEntry& entry : load_manifest(manifest_path)) {
    const PointCloud cloud = read_cloud_csv(entry.cloud);
    const std::vector<Pixel> corners = load_image_corners(entry.corners2d, config.board, config.panorama);
    const BoardDetection detection = locate_board(cloud, config);

    std::vector<Eigen::Vector3d> board_points;
    std::vector<double> intensities;
    for (int idx : detection.point_indices) {
      board_points.push_back(cloud.points[idx].position());
      intensities.push_back(cloud.points[idx].intensity);
    }
    const GrayZone zone = estimate_gray_zone(intensities, config.fit.gray.eval_eps, config.fit.gray.bins);
    const ReprojectionReport report =
        reprojection_error(extrinsics, board_points, intensities, corners, zone, config.board, config.panorama);
    csv << fs::path(entry.cloud).stem().string() << ',' << format_double(report.e) << ','
        << format_double(report.cost_px) << ',' << report.counted_points << ',' << report.total_points << ','
        << report.counted_cells << ',' << report.total_cells << ',' << format_double(report.board_range) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(out_path, csv.str());
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
  const ScenarioSpec scenario = load_scenario(scenario_path);
  auto [cloud, truth] = simulate_scan(scenario);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_cloud_csv((dir / "cloud.csv").string(), cloud);
  write_pixels_csv((dir / "corners2d.csv").string(),
                   project_corners(truth, truth.extrinsics, scenario.panorama));

  json doc;
  json corners = json::array();
  for (const Eigen::Vector3d& corner : truth.corners) corners.push_back(vector3_json(corner));
  doc["corners3d"] = std::move(corners);
  doc["extrinsics"]["theta_rad"] = vector3_json(truth.extrinsics.theta);
  doc["extrinsics"]["theta_deg"] = vector3_json(truth.extrinsics.theta * 180.0 / M_PI);
  doc["extrinsics"]["t"] = vector3_json(truth.extrinsics.t);
  doc["board_pose"]["theta_rad"] = vector3_json(truth.board_pose.theta);
  doc["board_pose"]["t"] = vector3_json(truth.board_pose.t);
  json labels = json::array();
  for (PointLabel label : truth.labels) labels.push_back(static_cast<int>(label));
  doc["labels"] = std::move(labels);
  json colors = json::array();
  for (std::uint8_t color : truth.colors) colors.push_back(static_cast<int>(color));
  doc["colors"] = std::move(colors);
  dump_json((dir / "truth.json").string(), doc);

  std::cout << "simulated " << cloud.size() << " points (" << truth.corners.size() << " corners) into " << out_dir
            << "\n";
  return 0;
}

std::pair<SweepVariable, std::vector<double>> parse_vary(const std::string& vary) {
  const std::size_t eq = vary.find('=');
  if (eq == std::string::npos) raise(ErrorCode::BadInput, "--vary expects name=v1,v2,... ");
  const std::string name = vary.substr(0, eq);
  SweepVariable variable;
  if (name == "noise") {
    variable = SweepVariable::NoiseMultiplier;
  } else if (name == "distance" || name == "range") {
    variable = SweepVariable::Range;
  } else {
    raise(ErrorCode::BadInput, "--vary variable must be 'noise' or 'distance'");
  }
  std::vector<double> values;
  std::stringstream list(vary.substr(eq + 1));
  std::string item;
  while (std::getline(list, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      raise(ErrorCode::BadInput, "--vary: bad numeric value '" + item + "'");
    }
  }
  if (values.empty()) raise(ErrorCode::BadInput, "--vary lists no values");
  return {variable, values};
}

int cmd_sweep(const std::string& scenario_path, const std::string& vary, int repeats, const std::string& out_path,
              const Config& config, std::uint64_t seed, int jobs) {
  const ScenarioSpec scenario = load_scenario(scenario_path);
  const auto [variable, values] = parse_vary(vary);
  const std::vector<SweepRow> rows = sweep(scenario, config, variable, values, repeats, seed, jobs);
  write_text_file(out_path, sweep_csv(rows, variable));
  std::cout << "wrote " << rows.size() << " sweep rows to " << out_path << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Reflectance-intensity chessboard calibration for spinning LiDAR + panoramic camera"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string cloud_path, out_path, config_path, manifest_path, extrinsics_path, scenario_path, out_dir;
  std::string debug_path, vary;
  double gap_dist = 0.0, gap_angle_deg = 0.0, merge_dist = 0.0;
  int repeats = 100, jobs = 1;
  std::uint64_t seed = 1;

  CLI::App* segment = app.add_subcommand("segment", "Split a cloud into object segments");
  segment->add_option("cloud", cloud_path, "point cloud CSV")->required();
  segment->add_option("--out", out_path, "output JSON")->required();
  segment->add_option("--config", config_path, "pipeline config");
  segment->add_option("--gap-dist", gap_dist, "scanline split distance, m");
  segment->add_option("--gap-angle", gap_angle_deg, "scanline split angle, deg");
  segment->add_option("--merge-dist", merge_dist, "agglomeration distance, m");

  CLI::App* find_board_cmd = app.add_subcommand("find-board", "Locate the chessboard segment");
  find_board_cmd->add_option("cloud", cloud_path, "point cloud CSV")->required();
  find_board_cmd->add_option("--config", config_path, "pipeline config");
  find_board_cmd->add_option("--out", out_path, "output JSON")->required();

  CLI::App* corners = app.add_subcommand("corners-3d", "Estimate 3D chessboard corners");
  corners->add_option("cloud", cloud_path, "point cloud CSV")->required();
  corners->add_option("--config", config_path, "pipeline config");
  corners->add_option("--out", out_path, "output corner CSV")->required();
  corners->add_option("--debug-dump", debug_path, "classified-point dump CSV");

  CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "Solve LiDAR-to-camera extrinsics");
  calibrate_cmd->add_option("--frames", manifest_path, "frame manifest JSON")->required();
  calibrate_cmd->add_option("--config", config_path, "pipeline config");
  calibrate_cmd->add_option("--out", out_path, "output extrinsics JSON")->required();
  calibrate_cmd->add_option("--jobs", jobs, "parallel frame preprocessing");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score extrinsics with the re-projection metric");
  evaluate->add_option("--extrinsics", extrinsics_path, "extrinsics JSON")->required();
  evaluate->add_option("--frames", manifest_path, "frame manifest JSON")->required();
  evaluate->add_option("--config", config_path, "pipeline config");
  evaluate->add_option("--out", out_path, "output CSV (stdout when omitted)");

  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic scan with ground truth");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Corner-error statistics over repeated simulations");
  sweep_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  sweep_cmd->add_option("--vary", vary, "noise=... or distance=...")->required();
  sweep_cmd->add_option("--repeats", repeats, "runs per condition");
  sweep_cmd->add_option("--seed", seed, "sweep master seed");
  sweep_cmd->add_option("--config", config_path, "pipeline config");
  sweep_cmd->add_option("--jobs", jobs, "parallel repeats");
  sweep_cmd->add_option("--out", out_path, "output CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    const Config config = load_config_or_default(config_path);
    if (segment->parsed()) return cmd_segment(cloud_path, out_path, config, gap_dist, gap_angle_deg, merge_dist);
    if (find_board_cmd->parsed()) return cmd_find_board(cloud_path, out_path, config);
    if (corners->parsed()) return cmd_corners3d(cloud_path, out_path, config, debug_path);
    if (calibrate_cmd->parsed()) return cmd_calibrate(manifest_path, out_path, config, jobs);
    if (evaluate->parsed()) return cmd_evaluate(extrinsics_path, manifest_path, out_path, config);
    if (simulate->parsed()) return cmd_simulate(scenario_path, out_dir);
    if (sweep_cmd->parsed()) return cmd_sweep(scenario_path, vary, repeats, out_path, config, seed, jobs);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ilcc
