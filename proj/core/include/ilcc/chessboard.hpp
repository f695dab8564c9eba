#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ilcc/config.hpp"

namespace ilcc {

/// Intensity interval [τ_l, τ_h] treated as color-ambiguous, derived from
/// the two histogram peaks either side of the mean intensity.
struct GrayZone {
  double tau_low = 0.0;
  double tau_high = 0.0;
  double peak_low = 0.0;   // R_L
  double peak_high = 0.0;  // R_H
  double eps = 2.0;        // ε_g
};

/// τ_l = ((ε_g−1)·R_L + R_H)/ε_g, τ_h = (R_L + (ε_g−1)·R_H)/ε_g, with R_L/R_H
/// the mean intensity inside the max-count histogram bin strictly below /
/// above the mean. Throws UnimodalIntensity when either side is empty.
GrayZone estimate_gray_zone(std::span<const double> intensities, double eps_g, int bins);

enum class PointClass { Black = 0, White = 1, Gray = 2 };

/// Black below τ_l, white above τ_h, gray inside [τ_l, τ_h].
PointClass classify_point(double intensity, const GrayZone& zone);

/// Axis-aligned rectangle in the model plane.
struct RectBounds {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
};

/// L1 margin of Eq.-(8) form: min of the two x-side distances plus min of
/// the two y-side distances, each measured to the side lines.
double l1_margin(const Eigen::Vector2d& p, const RectBounds& rect);

enum class PatternColor { Black = 0, White = 1, Outside = 2 };

/// Full-scale chessboard model on the canonical plane, centered at the
/// origin with the longer board dimension along x (matching the PCA axis
/// order of canonicalized board points).
class ChessboardModel {
 public:
  ChessboardModel(int cells_x, int cells_y, double square, CellColor origin_color);
  static ChessboardModel from_spec(const BoardSpec& spec);

  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  double square() const { return square_; }
  double length_x() const { return cells_x_ * square_; }
  double length_y() const { return cells_y_ * square_; }

  RectBounds bounds() const;
  RectBounds cell(int ix, int iy) const;
  CellColor cell_color(int ix, int iy) const;

  /// Cell indices containing a point inside the board (clamped on edges).
  std::pair<int, int> cell_index(const Eigen::Vector2d& p) const;

  /// Color of the pattern under p, or Outside beyond the board rectangle.
  PatternColor color_at(const Eigen::Vector2d& p) const;

  /// Interior lattice corners, (cells_x−1)·(cells_y−1) points. Ordered by
  /// y index then x index; callers impose the physical counting order after
  /// lifting to 3D.
  std::vector<Eigen::Vector2d> interior_corners() const;

 private:
  int cells_x_;
  int cells_y_;
  double square_;
  CellColor origin_color_;
};

/// In-plane board pose: rotation about z plus in-plane translation.
struct InPlanePose {
  double theta_z = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
};

/// Intensity-pattern fitting cost: gray points contribute nothing; points
/// inside the board pay the cell L1 margin when their measured color
/// disagrees with the pattern; points outside pay the margin to the board
/// rectangle.
double board_cost(std::span<const Eigen::Vector2d> points, std::span<const PointClass> classes,
                  const ChessboardModel& model, const InPlanePose& pose);

/// Classify intensities once; gray points are dropped (they can never
/// contribute to the cost). Returns the surviving points/classes.
std::pair<std::vector<Eigen::Vector2d>, std::vector<PointClass>> classify_for_fit(
    std::span<const Eigen::Vector3d> canonical, std::span<const double> intensities, const GrayZone& zone);

}  // namespace ilcc
