#pragma once

#include <cstdint>
#include <vector>

#include "mlod/types.hpp"

namespace mlod {

// Image-plane depth grid. Zero means "no return"; occlusion collisions keep
// the nearest depth.
struct SparseDepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;

  float& at(int x, int y) { return depth[std::size_t(y) * width + x]; }
  float at(int x, int y) const { return depth[std::size_t(y) * width + x]; }
};

struct MaskConfig {
  int crop_size = 7;          // output cells per side (k)
  int upsample = 4;           // nearest-neighbor working grid is k*n per side
  double span_margin = 0.5;   // slack added around the box depth span, meters
  double zero_margin = 0.1;   // medians this close to zero count as "no data"
};

// Median of the nonzero depths per crop cell; zero when a cell has none.
struct DepthCellMedians {
  int size = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[std::size_t(i) * size + j]; }
};

struct ForegroundMask {
  int size = 0;
  std::vector<std::uint8_t> cells;  // 1 = keep, 0 = suppress

  std::uint8_t at(int i, int j) const { return cells[std::size_t(i) * size + j]; }
};

// Projects every cloud point through the calibration; keeps the minimum depth
// per pixel. Points behind the camera or outside the image are dropped.
SparseDepthMap build_sparse_depth_map(const RawPointCloud& cloud, const CalibrationSet& calib,
                                      const ImageSize& image_size);

// Nearest-neighbor crop of `bbox` to a (crop_size * upsample)^2 grid. Output
// values are a subset of the input values plus zero.
std::vector<float> crop_resize_depth_nearest(const SparseDepthMap& map,
                                             const AxisAlignedBox2D& bbox,
                                             const MaskConfig& cfg);

// Tie convention for even counts: mean of the two middle values.
DepthCellMedians cell_medians(const std::vector<float>& grid, const MaskConfig& cfg);

// Keep a cell when its median lies inside the padded depth span of the box or
// inside the near-zero band (no evidence). Throws InvalidDepthRange when
// depth_min > depth_max.
ForegroundMask compute_mask(const DepthCellMedians& medians, double depth_min, double depth_max,
                            const MaskConfig& cfg);

// Entrywise multiply across channels. Throws ShapeMismatch.
FeatureCrop apply_mask(const FeatureCrop& features, const ForegroundMask& mask);

}  // namespace mlod
