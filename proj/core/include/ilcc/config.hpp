#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ilcc/types.hpp"

namespace ilcc {

enum class CellColor { Black = 0, White = 1 };

/// Chessboard geometry. `square` is the cell side length in meters.
/// Board width = cols·square and height = rows·square when width_is_cols
/// (the default); swapped otherwise.
struct BoardSpec {
  int rows = 8;
  int cols = 6;
  double square = 0.075;
  bool width_is_cols = true;
  CellColor origin_cell_color = CellColor::Black;

  double width() const { return (width_is_cols ? cols : rows) * square; }
  double height() const { return (width_is_cols ? rows : cols) * square; }
  /// Cell count along the board width / height.
  int cells_wide() const { return width_is_cols ? cols : rows; }
  int cells_high() const { return width_is_cols ? rows : cols; }
  /// Interior corners per horizontal row and number of corner rows.
  int corners_per_row() const { return cells_wide() - 1; }
  int corner_rows() const { return cells_high() - 1; }
  int corner_count() const { return (rows - 1) * (cols - 1); }

  void validate() const;
};

/// Spinning-LiDAR beam layout: angular resolutions plus the fixed ring
/// elevations, strictly increasing.
struct SensorModel {
  double horizontal_res = 0.0;            // radians
  double vertical_res = 0.0;              // radians
  std::vector<double> ring_elevations;    // radians

  /// Velodyne HDL-32e: 0.16° horizontal, 32 rings at 1.33° from −30.67°.
  static SensorModel hdl32();
  static SensorModel uniform(double horizontal_res_deg, double vertical_res_deg,
                             int ring_count, double ring_start_deg);

  void validate() const;
};

struct SegmentationParams {
  double gap_dist = 0.15;                  // meters
  double gap_angle = 30.0 * M_PI / 180.0;  // radians
  double merge_dist = 0.2;                 // meters
};

struct DetectionParams {
  double count_ratio = 0.5;     // ε_theo
  double planarity_max = 0.01;  // λ3 ceiling
  double box_low = 0.8;
  double box_high = 1.6;
  double uniformity_min = 0.85;  // ε_norm floor
  double ransac_tol = 0.03;      // meters
  int ransac_iterations = 200;
  std::uint64_t ransac_seed = 7;
};

struct GrayZoneParams {
  double corner_eps = 2.0;  // ε_g while fitting corners
  double eval_eps = 4.0;    // ε_g for re-projection scoring
  int bins = 64;
};

struct PowellParams {
  double step0 = 0.02;
  double ftol = 1e-8;
  int max_cycles = 100;
  double line_tol = 1e-6;
};

struct FitParams {
  GrayZoneParams gray;
  PowellParams powell;
  double cost_ceiling = 0.05;  // mean cost per classified point, meters
};

/// Everything the pipeline needs, loadable from a key = value config file
/// with [dotted] sections. Unknown keys are rejected.
struct Config {
  BoardSpec board;
  SensorModel sensor = SensorModel::hdl32();
  SegmentationParams segmentation;
  DetectionParams detection;
  FitParams fit;
  PanoramaSpec panorama;
  std::string initializer = "multistart";  // reserved for alternate PnP backends
  std::uint64_t seed = 1;

  void validate() const;
};

/// Raw parsed file: section.key -> value string. Exposed for the scenario
/// loader, which shares the format.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

Config config_from_key_values(const KeyValues& kv);
Config load_config(const std::string& path);

/// Typed access helpers shared by config and scenario loading. `used` keys
/// are tracked so callers can reject unknown ones.
class KeyValueReader {
 public:
  explicit KeyValueReader(const KeyValues& kv) : kv_(kv) {}

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);

  /// Throws BadInput listing any key never read.
  void reject_unknown() const;

 private:
  const KeyValues& kv_;
  std::map<std::string, bool> used_;
};

}  // namespace ilcc
