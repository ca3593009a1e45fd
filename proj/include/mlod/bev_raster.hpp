#pragma once

#include <cstdint>
#include <vector>

#include "mlod/types.hpp"

namespace mlod {

// Top-down grid over the sensor frame: rows index x (forward), columns index
// y (lateral). Cell (0, 0) covers [x_min, x_min+res) x [y_min, y_min+res).
struct BevConfig {
  double resolution = 0.1;   // meters per cell
  double x_min = 0.0;
  double x_max = 70.0;
  double y_min = -40.0;
  double y_max = 40.0;
  double height_min = 0.0;   // heights measured above the ground plane
  double height_max = 2.5;
  int num_slices = 5;

  int rows() const;
  int cols() const;
  double slice_width() const { return (height_max - height_min) / num_slices; }
};

// num_slices height channels (max height above ground per cell and slice,
// zero where empty) followed by one density channel. Plane-major floats.
struct BevMap {
  BevConfig cfg;
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<float> cells;
  std::vector<std::uint32_t> counts;  // in-range points per cell

  float& at(int c, int i, int j) { return cells[(std::size_t(c) * rows + i) * cols + j]; }
  float at(int c, int i, int j) const { return cells[(std::size_t(c) * rows + i) * cols + j]; }
  std::uint32_t count(int i, int j) const { return counts[std::size_t(i) * cols + j]; }
};

// Points outside the extents or with height above ground outside
// [height_min, height_max] are dropped. Density is min(1, log(N+1)/log(16)).
BevMap rasterize(const RawPointCloud& cloud, const GroundPlane& plane, const BevConfig& cfg);

// Bilinear crop of the axis-aligned hull of the box footprint, resampled to
// out_size x out_size per channel (half-pixel centers, edge clamped). Throws
// OutsideExtents when the hull misses the grid entirely.
FeatureCrop crop_resize_bev(const BevMap& map, const OrientedBox3D& box, int out_size);

}  // namespace mlod
