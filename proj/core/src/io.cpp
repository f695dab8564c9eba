#include "ilcc/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ilcc/errors.hpp"

namespace ilcc {

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t expected, const std::string& path, int line_no) {
  std::vector<double> out;
  out.reserve(expected);
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) comma = line.size();
    const std::string field = line.substr(start, comma - start);
    try {
      std::size_t pos = 0;
      const double v = std::stod(field, &pos);
      out.push_back(v);
    } catch (const std::exception&) {
      raise(ErrorCode::BadInput, path + ":" + std::to_string(line_no) + ": bad numeric field '" + field + "'");
    }
    start = comma + 1;
    if (comma == line.size()) break;
  }
  if (out.size() != expected) {
    raise(ErrorCode::BadInput, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                                   " fields, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

PointCloud read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open cloud file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::BadInput, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z,intensity,ring") {
    raise(ErrorCode::BadInput, path + ": expected header 'x,y,z,intensity,ring'");
  }
  PointCloud cloud;
  cloud.frame_id = fs::path(path).stem().string();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto row = parse_row(line, 5, path, line_no);
    for (int i = 0; i < 4; ++i) {
      if (!std::isfinite(row[i])) {
        raise(ErrorCode::BadInput, path + ":" + std::to_string(line_no) + ": non-finite value");
      }
    }
    Point3 p;
    p.x = row[0];
    p.y = row[1];
    p.z = row[2];
    p.intensity = row[3];
    if (p.intensity < 0.0) raise(ErrorCode::BadInput, path + ":" + std::to_string(line_no) + ": negative intensity");
    p.ring = static_cast<int>(std::llround(row[4]));
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_cloud_csv(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write cloud file '" + path + "'");
  out << "x,y,z,intensity,ring\n";
  for (const Point3& p : cloud.points) {
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
        << format_double(p.intensity) << ',' << p.ring << '\n';
  }
}

std::vector<Pixel> read_pixels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open corner file '" + path + "'");
  std::vector<Pixel> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto row = parse_row(line, 2, path, line_no);
    if (!std::isfinite(row[0]) || !std::isfinite(row[1])) {
      raise(ErrorCode::BadInput, path + ":" + std::to_string(line_no) + ": non-finite value");
    }
    out.push_back({row[0], row[1]});
  }
  return out;
}

void write_pixels_csv(const std::string& path, const std::vector<Pixel>& pixels) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write corner file '" + path + "'");
  for (const Pixel& px : pixels) {
    out << format_double(px.u) << ',' << format_double(px.v) << '\n';
  }
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open manifest '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    raise(ErrorCode::BadInput, path + ": invalid JSON: " + e.what());
  }
  const nlohmann::json* frames = nullptr;
  if (doc.is_array()) {
    frames = &doc;
  } else if (doc.is_object() && doc.contains("frames") && doc["frames"].is_array()) {
    frames = &doc["frames"];
  } else {
    raise(ErrorCode::BadInput, path + ": manifest must be a JSON array or an object with a 'frames' array");
  }

  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    if (fp.is_relative()) fp = base / fp;
    return fp.string();
  };

  std::vector<ManifestEntry> out;
  for (const auto& item : *frames) {
    if (!item.is_object() || !item.contains("cloud") || !item.contains("corners2d")) {
      raise(ErrorCode::BadInput, path + ": each frame needs 'cloud' and 'corners2d'");
    }
    ManifestEntry entry;
    entry.cloud = resolve(item["cloud"].get<std::string>());
    entry.corners2d = resolve(item["corners2d"].get<std::string>());
    if (item.contains("truth")) entry.truth = resolve(item["truth"].get<std::string>());
    for (const std::string& file : {entry.cloud, entry.corners2d}) {
      if (!fs::exists(file)) raise(ErrorCode::IoError, "manifest references missing file '" + file + "'");
    }
    if (!entry.truth.empty() && !fs::exists(entry.truth)) {
      raise(ErrorCode::IoError, "manifest references missing file '" + entry.truth + "'");
    }
    out.push_back(std::move(entry));
  }
  if (out.empty()) raise(ErrorCode::BadInput, path + ": manifest lists no frames");
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ilcc
