#include "ilcc/chessboard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ilcc/errors.hpp"

namespace ilcc {

GrayZone estimate_gray_zone(std::span<const double> intensities, double eps_g, int bins) {
  if (intensities.size() < 2) raise(ErrorCode::UnimodalIntensity, "need at least 2 intensity samples");
  if (!(eps_g >= 2.0)) raise(ErrorCode::BadInput, "gray-zone eps must be >= 2");
  if (bins < 2) raise(ErrorCode::BadInput, "gray-zone needs at least 2 bins");

  const auto [min_it, max_it] = std::minmax_element(intensities.begin(), intensities.end());
  const double lo = *min_it, hi = *max_it;
  if (!(hi > lo)) raise(ErrorCode::UnimodalIntensity, "all intensities identical");
  const double mean = std::accumulate(intensities.begin(), intensities.end(), 0.0) /
                      static_cast<double>(intensities.size());

  const double bin_width = (hi - lo) / bins;
  std::vector<int> count(bins, 0);
  std::vector<double> value_sum(bins, 0.0);
  for (double r : intensities) {
    int b = static_cast<int>((r - lo) / bin_width);
    b = std::clamp(b, 0, bins - 1);
    count[b]++;
    value_sum[b] += r;
  }

  // Peak bin on each side of the mean; ties resolve away from the mean.
  int low_bin = -1, high_bin = -1;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const double center = lo + (b + 0.5) * bin_width;
    if (center < mean) {
      if (low_bin < 0 || count[b] > count[low_bin]) low_bin = b;
    } else if (center > mean) {
      if (high_bin < 0 || count[b] >= count[high_bin]) high_bin = b;
    }
  }
  if (low_bin < 0 || high_bin < 0) {
    raise(ErrorCode::UnimodalIntensity, "no histogram peak on one side of the mean intensity");
  }

  GrayZone zone;
  zone.eps = eps_g;
  zone.peak_low = value_sum[low_bin] / count[low_bin];
  zone.peak_high = value_sum[high_bin] / count[high_bin];
  zone.tau_low = ((eps_g - 1.0) * zone.peak_low + zone.peak_high) / eps_g;
  zone.tau_high = (zone.peak_low + (eps_g - 1.0) * zone.peak_high) / eps_g;
  return zone;
}

PointClass classify_point(double intensity, const GrayZone& zone) {
  if (intensity < zone.tau_low) return PointClass::Black;
  if (intensity > zone.tau_high) return PointClass::White;
  return PointClass::Gray;
}

double l1_margin(const Eigen::Vector2d& p, const RectBounds& rect) {
  const double dx = std::min(std::abs(p.x() - rect.x0), std::abs(p.x() - rect.x1));
  const double dy = std::min(std::abs(p.y() - rect.y0), std::abs(p.y() - rect.y1));
  return dx + dy;
}

ChessboardModel::ChessboardModel(int cells_x, int cells_y, double square, CellColor origin_color)
    : cells_x_(cells_x), cells_y_(cells_y), square_(square), origin_color_(origin_color) {
  if (cells_x < 1 || cells_y < 1 || !(square > 0.0)) {
    raise(ErrorCode::BadInput, "chessboard model needs positive cell counts and square size");
  }
}

ChessboardModel ChessboardModel::from_spec(const BoardSpec& spec) {
  // Long board dimension along model x, to match canonical PCA axes.
  const int wide = spec.cells_wide();
  const int high = spec.cells_high();
  const int cx = std::max(wide, high);
  const int cy = std::min(wide, high);
  return ChessboardModel(cx, cy, spec.square, spec.origin_cell_color);
}

RectBounds ChessboardModel::bounds() const {
  return {-length_x() / 2.0, length_x() / 2.0, -length_y() / 2.0, length_y() / 2.0};
}

RectBounds ChessboardModel::cell(int ix, int iy) const {
  const double x0 = -length_x() / 2.0 + ix * square_;
  const double y0 = -length_y() / 2.0 + iy * square_;
  return {x0, x0 + square_, y0, y0 + square_};
}

CellColor ChessboardModel::cell_color(int ix, int iy) const {
  const int parity = (ix + iy) & 1;
  const int origin = origin_color_ == CellColor::White ? 1 : 0;
  return (origin ^ parity) ? CellColor::White : CellColor::Black;
}

std::pair<int, int> ChessboardModel::cell_index(const Eigen::Vector2d& p) const {
  int ix = static_cast<int>(std::floor((p.x() + length_x() / 2.0) / square_));
  int iy = static_cast<int>(std::floor((p.y() + length_y() / 2.0) / square_));
  ix = std::clamp(ix, 0, cells_x_ - 1);
  iy = std::clamp(iy, 0, cells_y_ - 1);
  return {ix, iy};
}

PatternColor ChessboardModel::color_at(const Eigen::Vector2d& p) const {
  const RectBounds b = bounds();
  if (p.x() < b.x0 || p.x() > b.x1 || p.y() < b.y0 || p.y() > b.y1) return PatternColor::Outside;
  const auto [ix, iy] = cell_index(p);
  return cell_color(ix, iy) == CellColor::White ? PatternColor::White : PatternColor::Black;
}

std::vector<Eigen::Vector2d> ChessboardModel::interior_corners() const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<std::size_t>(cells_x_ - 1) * (cells_y_ - 1));
  for (int iy = 1; iy < cells_y_; ++iy) {
    for (int ix = 1; ix < cells_x_; ++ix) {
      out.emplace_back(-length_x() / 2.0 + ix * square_, -length_y() / 2.0 + iy * square_);
    }
  }
  return out;
}

Eigen::Vector2d InPlanePose::apply(const Eigen::Vector2d& p) const {
  const double c = std::cos(theta_z), s = std::sin(theta_z);
  return {c * p.x() - s * p.y() + tx, s * p.x() + c * p.y() + ty};
}

double board_cost(std::span<const Eigen::Vector2d> points, std::span<const PointClass> classes,
                  const ChessboardModel& model, const InPlanePose& pose) {
  const double c = std::cos(pose.theta_z), s = std::sin(pose.theta_z);
  const RectBounds board = model.bounds();
  const double half_x = model.length_x() / 2.0;
  const double half_y = model.length_y() / 2.0;
  const double square = model.square();

  double cost = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (classes[i] == PointClass::Gray) continue;
    const double px = c * points[i].x() - s * points[i].y() + pose.tx;
    const double py = s * points[i].x() + c * points[i].y() + pose.ty;

    if (px < board.x0 || px > board.x1 || py < board.y0 || py > board.y1) {
      cost += l1_margin({px, py}, board);
      continue;
    }
    int ix = static_cast<int>((px + half_x) / square);
    int iy = static_cast<int>((py + half_y) / square);
    ix = std::clamp(ix, 0, model.cells_x() - 1);
    iy = std::clamp(iy, 0, model.cells_y() - 1);
    const int pattern_white = static_cast<int>(model.cell_color(ix, iy));
    if (pattern_white != static_cast<int>(classes[i])) {
      cost += l1_margin({px, py}, model.cell(ix, iy));
    }
  }
  return cost;
}

std::pair<std::vector<Eigen::Vector2d>, std::vector<PointClass>> classify_for_fit(
    std::span<const Eigen::Vector3d> canonical, std::span<const double> intensities, const GrayZone& zone) {
  std::vector<Eigen::Vector2d> points;
  std::vector<PointClass> classes;
  points.reserve(canonical.size());
  classes.reserve(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const PointClass cls = classify_point(intensities[i], zone);
    if (cls == PointClass::Gray) continue;
    points.emplace_back(canonical[i].x(), canonical[i].y());
    classes.push_back(cls);
  }
  return {std::move(points), std::move(classes)};
}

}  // namespace ilcc
