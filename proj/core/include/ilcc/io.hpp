#pragma once

#include <string>
#include <vector>

#include "ilcc/types.hpp"

namespace ilcc {

/// ASCII point-cloud format: header line `x,y,z,intensity,ring`, then one
/// comma-separated row per point. Rows with non-finite values are rejected.
PointCloud read_cloud_csv(const std::string& path);
void write_cloud_csv(const std::string& path, const PointCloud& cloud);

/// Plain `u,v` rows, no header, counting order.
std::vector<Pixel> read_pixels_csv(const std::string& path);
void write_pixels_csv(const std::string& path, const std::vector<Pixel>& pixels);

struct ManifestEntry {
  std::string cloud;
  std::string corners2d;
  std::string truth;  // optional, empty when absent
};

/// JSON manifest: {"frames": [{"cloud": ..., "corners2d": ..., "truth"?: ...}]}.
/// Relative paths resolve against the manifest's directory. All referenced
/// files must exist.
std::vector<ManifestEntry> load_manifest(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Shortest round-trip decimal form, deterministic across runs.
std::string format_double(double value);

}  // namespace ilcc
