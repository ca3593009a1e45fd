#include "mlod/foreground_mask.hpp"

#include <algorithm>
#include <cmath>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"

namespace mlod {

SparseDepthMap build_sparse_depth_map(const RawPointCloud& cloud, const CalibrationSet& calib,
                                      const ImageSize& image_size) {
  SparseDepthMap map;
  map.width = image_size.width;
  map.height = image_size.height;
  map.depth.assign(std::size_t(map.width) * map.height, 0.f);
  const Mat34 P = calib.camera_projection *
                  (calib.rectification * calib.lidar_to_camera);
  for (const LidarPoint& pt : cloud.points) {
    const Eigen::Vector4d h(pt.x, pt.y, pt.z, 1.0);
    const Eigen::Vector3d img = P * h;
    if (img.z() <= 0.0) continue;
    const int u = int(std::floor(img.x() / img.z()));
    const int v = int(std::floor(img.y() / img.z()));
    if (u < 0 || u >= map.width || v < 0 || v >= map.height) continue;
    float& cell = map.at(u, v);
    const float d = float(img.z());
    if (cell == 0.f || d < cell) cell = d;
  }
  return map;
}

std::vector<float> crop_resize_depth_nearest(const SparseDepthMap& map,
                                             const AxisAlignedBox2D& bbox,
                                             const MaskConfig& cfg) {
  if (cfg.crop_size < 1 || cfg.upsample < 1)
    fail(ErrorCode::BadConfig, "mask grid sizes must be positive");
  if (bbox.width() <= 0.0 || bbox.height() <= 0.0)
    fail(ErrorCode::DegenerateOnImage, "depth crop of an empty box");
  const int side = cfg.crop_size * cfg.upsample;
  std::vector<float> grid(std::size_t(side) * side, 0.f);
  for (int r = 0; r < side; ++r) {
    const double y = bbox.top + (r + 0.5) * bbox.height() / side;
    int v = int(std::floor(y));
    v = std::clamp(v, 0, map.height - 1);
    for (int c = 0; c < side; ++c) {
      const double x = bbox.left + (c + 0.5) * bbox.width() / side;
      int u = int(std::floor(x));
      u = std::clamp(u, 0, map.width - 1);
      grid[std::size_t(r) * side + c] = map.at(u, v);
    }
  }
  return grid;
}

DepthCellMedians cell_medians(const std::vector<float>& grid, const MaskConfig& cfg) {
  const int side = cfg.crop_size * cfg.upsample;
  if (grid.size() != std::size_t(side) * side)
    fail(ErrorCode::ShapeMismatch, "depth grid is not crop_size*upsample squared");
  DepthCellMedians medians;
  medians.size = cfg.crop_size;
  medians.values.assign(std::size_t(cfg.crop_size) * cfg.crop_size, 0.0);
  std::vector<float> bucket;
  bucket.reserve(std::size_t(cfg.upsample) * cfg.upsample);
  for (int i = 0; i < cfg.crop_size; ++i)
    for (int j = 0; j < cfg.crop_size; ++j) {
      bucket.clear();
      for (int r = i * cfg.upsample; r < (i + 1) * cfg.upsample; ++r)
        for (int c = j * cfg.upsample; c < (j + 1) * cfg.upsample; ++c) {
          const float d = grid[std::size_t(r) * side + c];
          if (d != 0.f) bucket.push_back(d);
        }
      if (bucket.empty()) continue;  // stays zero: no evidence in this cell
      std::sort(bucket.begin(), bucket.end());
      const std::size_t n = bucket.size();
      const double median = (n % 2 == 1)
                                ? double(bucket[n / 2])
                                : 0.5 * (double(bucket[n / 2 - 1]) + double(bucket[n / 2]));
      medians.values[std::size_t(i) * cfg.crop_size + j] = median;
    }
  return medians;
}

ForegroundMask compute_mask(const DepthCellMedians& medians, double depth_min, double depth_max,
                            const MaskConfig& cfg) {
  if (depth_min > depth_max)
    fail(ErrorCode::InvalidDepthRange, "depth_min exceeds depth_max");
  ForegroundMask mask;
  mask.size = medians.size;
  mask.cells.assign(medians.values.size(), 0);
  const double lo = depth_min - cfg.span_margin;
  const double hi = depth_max + cfg.span_margin;
  for (std::size_t idx = 0; idx < medians.values.size(); ++idx) {
    const double m = medians.values[idx];
    const bool in_span = (m >= lo && m <= hi);
    const bool no_data = (m >= 0.0 && m <= cfg.zero_margin);
    mask.cells[idx] = (in_span || no_data) ? 1 : 0;
  }
  return mask;
}

FeatureCrop apply_mask(const FeatureCrop& features, const ForegroundMask& mask) {
  if (features.size != mask.size)
    fail(ErrorCode::ShapeMismatch, "feature crop and mask have different sizes");
  FeatureCrop out = features;
  for (int c = 0; c < out.channels; ++c)
    for (int i = 0; i < out.size; ++i)
      for (int j = 0; j < out.size; ++j)
        if (!mask.at(i, j)) out.at(c, i, j) = 0.f;
  return out;
}

}  // namespace mlod
