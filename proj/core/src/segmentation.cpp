#include "ilcc/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <unordered_map>

namespace ilcc {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<ScanlineSegment> split_scanlines(const PointCloud& cloud, double gap_dist, double gap_angle) {
  // Group point indices per ring, preserving acquisition order.
  std::map<int, std::vector<int>> rings;
  for (int i = 0; i < static_cast<int>(cloud.points.size()); ++i) {
    rings[cloud.points[i].ring].push_back(i);
  }

  const double cos_gap = std::cos(gap_angle);
  std::vector<ScanlineSegment> out;
  for (const auto& [ring, idx] : rings) {
    ScanlineSegment current;
    current.ring = ring;
    Eigen::Vector3d prev_diff = Eigen::Vector3d::Zero();
    bool have_diff = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (current.indices.empty()) {
        current.indices.push_back(idx[k]);
        have_diff = false;
        continue;
      }
      const Eigen::Vector3d prev = cloud.points[current.indices.back()].position();
      const Eigen::Vector3d curr = cloud.points[idx[k]].position();
      const Eigen::Vector3d diff = curr - prev;
      const double dist = diff.norm();
      bool split = dist > gap_dist;
      if (!split && have_diff && dist > 0.0 && prev_diff.norm() > 0.0) {
        const double cos_turn = prev_diff.dot(diff) / (prev_diff.norm() * dist);
        split = cos_turn < cos_gap;
      }
      if (split) {
        out.push_back(std::move(current));
        current = ScanlineSegment{ring, {idx[k]}};
        have_diff = false;
      } else {
        current.indices.push_back(idx[k]);
        prev_diff = diff;
        have_diff = true;
      }
    }
    if (!current.indices.empty()) out.push_back(std::move(current));
  }
  return out;
}

std::vector<Segment> agglomerate(const std::vector<ScanlineSegment>& segments, const PointCloud& cloud,
                                 double merge_dist) {
  const int n_segments = static_cast<int>(segments.size());
  if (n_segments == 0) return {};

  // Spatial grid with cell size = merge_dist: any pair within merge_dist
  // lives in adjacent cells, so the 27-neighborhood scan is exhaustive.
  struct Entry {
    int segment;
    int point;
  };
  std::unordered_map<CellKey, std::vector<Entry>, CellHash> grid;
  const double cell = merge_dist;
  auto key_of = [cell](const Eigen::Vector3d& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x() / cell)),
                   static_cast<std::int64_t>(std::floor(p.y() / cell)),
                   static_cast<std::int64_t>(std::floor(p.z() / cell))};
  };
  for (int s = 0; s < n_segments; ++s) {
    for (int idx : segments[s].indices) {
      grid[key_of(cloud.points[idx].position())].push_back({s, idx});
    }
  }

  UnionFind uf(n_segments);
  const double merge_sq = merge_dist * merge_dist;
  for (int s = 0; s < n_segments; ++s) {
    for (int idx : segments[s].indices) {
      const Eigen::Vector3d p = cloud.points[idx].position();
      const CellKey base = key_of(p);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find(CellKey{base.x + dx, base.y + dy, base.z + dz});
            if (it == grid.end()) continue;
            for (const Entry& e : it->second) {
              if (uf.find(e.segment) == uf.find(s)) continue;
              const Eigen::Vector3d q = cloud.points[e.point].position();
              if ((p - q).squaredNorm() <= merge_sq) uf.merge(s, e.segment);
            }
          }
        }
      }
    }
  }

  std::map<int, Segment> components;  // keyed by root, ascending
  for (int s = 0; s < n_segments; ++s) {
    Segment& seg = components[uf.find(s)];
    seg.indices.insert(seg.indices.end(), segments[s].indices.begin(), segments[s].indices.end());
  }

  std::vector<Segment> out;
  out.reserve(components.size());
  for (auto& [root, seg] : components) {
    (void)root;
    std::sort(seg.indices.begin(), seg.indices.end());
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int idx : seg.indices) sum += cloud.points[idx].position();
    seg.centroid = sum / static_cast<double>(seg.indices.size());
    out.push_back(std::move(seg));
  }
  std::sort(out.begin(), out.end(),
            [](const Segment& a, const Segment& b) { return a.indices.front() < b.indices.front(); });
  return out;
}

std::vector<Segment> segment_cloud(const PointCloud& cloud, const SegmentationParams& params) {
  return agglomerate(split_scanlines(cloud, params.gap_dist, params.gap_angle), cloud, params.merge_dist);
}

}  // namespace ilcc
