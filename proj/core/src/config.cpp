#include "ilcc/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ilcc/errors.hpp"

namespace ilcc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

void BoardSpec::validate() const {
  if (rows < 2 || cols < 2) raise(ErrorCode::BadInput, "board.rows and board.cols must be >= 2");
  if (!(square > 0.0)) raise(ErrorCode::BadInput, "board.square must be positive");
}

SensorModel SensorModel::hdl32() { return uniform(0.16, 1.33, 32, -30.67); }

SensorModel SensorModel::uniform(double horizontal_res_deg, double vertical_res_deg,
                                 int ring_count, double ring_start_deg) {
  SensorModel m;
  m.horizontal_res = horizontal_res_deg * M_PI / 180.0;
  m.vertical_res = vertical_res_deg * M_PI / 180.0;
  m.ring_elevations.resize(ring_count);
  for (int i = 0; i < ring_count; ++i) {
    m.ring_elevations[i] = (ring_start_deg + i * vertical_res_deg) * M_PI / 180.0;
  }
  return m;
}

void SensorModel::validate() const {
  if (!(horizontal_res > 0.0) || !(vertical_res > 0.0)) {
    raise(ErrorCode::BadInput, "sensor angular resolutions must be positive");
  }
  if (ring_elevations.empty()) raise(ErrorCode::BadInput, "sensor needs at least one ring");
  for (std::size_t i = 1; i < ring_elevations.size(); ++i) {
    if (!(ring_elevations[i] > ring_elevations[i - 1])) {
      raise(ErrorCode::BadInput, "ring elevations must be strictly increasing");
    }
  }
}

void Config::validate() const {
  board.validate();
  sensor.validate();
  if (!(segmentation.gap_dist > 0.0)) raise(ErrorCode::BadInput, "segmentation.gap_dist must be positive");
  if (!(segmentation.gap_angle > 0.0 && segmentation.gap_angle <= M_PI)) {
    raise(ErrorCode::BadInput, "segmentation.gap_angle_deg must be in (0, 180]");
  }
  if (!(segmentation.merge_dist > 0.0)) raise(ErrorCode::BadInput, "segmentation.merge_dist must be positive");
  if (!(detection.count_ratio > 0.0 && detection.count_ratio <= 1.0)) {
    raise(ErrorCode::BadInput, "detection.count_ratio must be in (0, 1]");
  }
  if (!(detection.planarity_max > 0.0 && detection.planarity_max < 1.0)) {
    raise(ErrorCode::BadInput, "detection.planarity_max must be in (0, 1)");
  }
  if (!(detection.box_low > 0.0 && detection.box_low < detection.box_high)) {
    raise(ErrorCode::BadInput, "detection box factors must satisfy 0 < low < high");
  }
  if (!(detection.uniformity_min >= 0.0 && detection.uniformity_min <= 1.0)) {
    raise(ErrorCode::BadInput, "detection.uniformity_min must be in [0, 1]");
  }
  if (!(detection.ransac_tol > 0.0)) raise(ErrorCode::BadInput, "detection.ransac_tol must be positive");
  if (detection.ransac_iterations < 1) raise(ErrorCode::BadInput, "detection.ransac_iterations must be >= 1");
  if (!(fit.gray.corner_eps >= 2.0) || !(fit.gray.eval_eps >= 2.0)) {
    raise(ErrorCode::BadInput, "gray-zone eps values must be >= 2");
  }
  if (fit.gray.bins < 2) raise(ErrorCode::BadInput, "grayzone.bins must be >= 2");
  if (!(fit.powell.step0 > 0.0) || !(fit.powell.ftol > 0.0) || fit.powell.max_cycles < 1) {
    raise(ErrorCode::BadInput, "powell parameters out of range");
  }
  if (!(fit.cost_ceiling > 0.0)) raise(ErrorCode::BadInput, "fit.cost_ceiling must be positive");
  if (panorama.width != 2 * panorama.height) {
    raise(ErrorCode::BadInput, "panorama.width must equal 2 * panorama.height");
  }
  if (initializer != "multistart") {
    raise(ErrorCode::BadInput, "calibration.initializer: only 'multistart' is implemented");
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') raise(ErrorCode::BadInput, "malformed section header at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) raise(ErrorCode::BadInput, "empty section name at line " + std::to_string(line_no));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) raise(ErrorCode::BadInput, "expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = strip_quotes(trim(line.substr(eq + 1)));
    if (key.empty()) raise(ErrorCode::BadInput, "empty key at line " + std::to_string(line_no));
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) raise(ErrorCode::BadInput, "duplicate key '" + full + "'");
    kv[full] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

bool KeyValueReader::has(const std::string& key) const { return kv_.count(key) > 0; }

double KeyValueReader::number(const std::string& key, double fallback) {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    raise(ErrorCode::BadInput, "key '" + key + "': expected a number, got '" + it->second + "'");
  }
}

int KeyValueReader::integer(const std::string& key, int fallback) {
  const double v = number(key, static_cast<double>(fallback));
  const int i = static_cast<int>(std::llround(v));
  if (v != static_cast<double>(i)) raise(ErrorCode::BadInput, "key '" + key + "': expected an integer");
  return i;
}

std::uint64_t KeyValueReader::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  used_[key] = true;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    raise(ErrorCode::BadInput, "key '" + key + "': expected an unsigned integer");
  }
}

bool KeyValueReader::boolean(const std::string& key, bool fallback) {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  used_[key] = true;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  raise(ErrorCode::BadInput, "key '" + key + "': expected true or false");
}

std::string KeyValueReader::text(const std::string& key, const std::string& fallback) {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  used_[key] = true;
  return it->second;
}

void KeyValueReader::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, value] : kv_) {
    (void)value;
    if (!used_.count(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) raise(ErrorCode::BadInput, "unknown config keys: " + unknown);
}

namespace {

CellColor parse_color(const std::string& s, const std::string& key) {
  if (s == "black") return CellColor::Black;
  if (s == "white") return CellColor::White;
  raise(ErrorCode::BadInput, "key '" + key + "': expected black or white");
}

}  // namespace

Config config_from_key_values(const KeyValues& kv) {
  KeyValueReader r(kv);
  Config c;

  c.board.rows = r.integer("board.rows", c.board.rows);
  c.board.cols = r.integer("board.cols", c.board.cols);
  c.board.square = r.number("board.square", c.board.square);
  const std::string width_axis = r.text("board.width_axis", "cols");
  if (width_axis != "cols" && width_axis != "rows") {
    raise(ErrorCode::BadInput, "board.width_axis must be 'cols' or 'rows'");
  }
  c.board.width_is_cols = width_axis == "cols";
  c.board.origin_cell_color = parse_color(r.text("board.origin_cell_color", "black"), "board.origin_cell_color");

  const double h_res = r.number("sensor.horizontal_res_deg", 0.16);
  const double v_res = r.number("sensor.vertical_res_deg", 1.33);
  const int ring_count = r.integer("sensor.ring_count", 32);
  const double ring_start = r.number("sensor.ring_start_deg", -30.67);
  c.sensor = SensorModel::uniform(h_res, v_res, ring_count, ring_start);

  c.segmentation.gap_dist = r.number("segmentation.gap_dist", c.segmentation.gap_dist);
  c.segmentation.gap_angle = r.number("segmentation.gap_angle_deg", 30.0) * M_PI / 180.0;
  c.segmentation.merge_dist = r.number("segmentation.merge_dist", c.segmentation.merge_dist);

  c.detection.count_ratio = r.number("thresholds.count_ratio", c.detection.count_ratio);
  c.detection.planarity_max = r.number("thresholds.planarity_max", c.detection.planarity_max);
  c.detection.box_low = r.number("thresholds.box_low", c.detection.box_low);
  c.detection.box_high = r.number("thresholds.box_high", c.detection.box_high);
  c.detection.uniformity_min = r.number("thresholds.uniformity_min", c.detection.uniformity_min);
  c.detection.ransac_tol = r.number("ransac.inlier_tol", c.detection.ransac_tol);
  c.detection.ransac_iterations = r.integer("ransac.iterations", c.detection.ransac_iterations);
  c.detection.ransac_seed = r.unsigned_integer("ransac.seed", c.detection.ransac_seed);

  c.fit.gray.corner_eps = r.number("grayzone.corner_eps", c.fit.gray.corner_eps);
  c.fit.gray.eval_eps = r.number("grayzone.eval_eps", c.fit.gray.eval_eps);
  c.fit.gray.bins = r.integer("grayzone.bins", c.fit.gray.bins);
  c.fit.powell.step0 = r.number("powell.step0", c.fit.powell.step0);
  c.fit.powell.ftol = r.number("powell.ftol", c.fit.powell.ftol);
  c.fit.powell.max_cycles = r.integer("powell.max_cycles", c.fit.powell.max_cycles);
  c.fit.powell.line_tol = r.number("powell.line_tol", c.fit.powell.line_tol);
  c.fit.cost_ceiling = r.number("thresholds.fit_cost_ceiling", c.fit.cost_ceiling);

  c.panorama.width = r.integer("panorama.width", c.panorama.width);
  c.panorama.height = r.integer("panorama.height", c.panorama.height);

  c.initializer = r.text("calibration.initializer", c.initializer);
  c.seed = r.unsigned_integer("seed", c.seed);

  r.reject_unknown();
  c.validate();
  return c;
}

Config load_config(const std::string& path) { return config_from_key_values(load_key_values(path)); }

}  // namespace ilcc
