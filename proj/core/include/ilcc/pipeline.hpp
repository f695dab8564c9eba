#pragma once

#include "ilcc/board_locator.hpp"
#include "ilcc/config.hpp"
#include "ilcc/intensity_fit.hpp"
#include "ilcc/segmentation.hpp"
#include "ilcc/types.hpp"

namespace ilcc {

/// segment → find_board on a raw cloud.
BoardDetection locate_board(const PointCloud& cloud, const Config& config);

/// segment → find_board → estimate_corners.
CornerFit estimate_corners_from_cloud(const PointCloud& cloud, const Config& config);

/// Corner-estimation preprocessing (RANSAC plane projection + canonical
/// transform) on an already-known board point set, skipping the detection
/// filters. Used by the simulation sweep, where ground-truth labels identify
/// the board and the filters' noise envelope is itself under test.
BoardDetection board_geometry_from_indices(const PointCloud& cloud, std::vector<int> indices, const Config& config);

}  // namespace ilcc
