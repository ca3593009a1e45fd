#include "mlod/bev_raster.hpp"

#include <algorithm>
#include <cmath>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"

namespace mlod {

int BevConfig::rows() const {
  return int(std::lround((x_max - x_min) / resolution));
}

int BevConfig::cols() const {
  return int(std::lround((y_max - y_min) / resolution));
}

BevMap rasterize(const RawPointCloud& cloud, const GroundPlane& plane, const BevConfig& cfg) {
  if (cfg.resolution <= 0.0 || cfg.num_slices < 1 || cfg.x_max <= cfg.x_min ||
      cfg.y_max <= cfg.y_min || cfg.height_max <= cfg.height_min)
    fail(ErrorCode::BadConfig, "bev grid configuration is not positive");
  BevMap map;
  map.cfg = cfg;
  map.rows = cfg.rows();
  map.cols = cfg.cols();
  map.channels = cfg.num_slices + 1;
  map.cells.assign(std::size_t(map.channels) * map.rows * map.cols, 0.f);
  map.counts.assign(std::size_t(map.rows) * map.cols, 0u);

  const double slice = cfg.slice_width();
  for (const LidarPoint& pt : cloud.points) {
    const double x = pt.x;
    const double y = pt.y;
    if (x < cfg.x_min || y < cfg.y_min) continue;
    const int i = int(std::floor((x - cfg.x_min) / cfg.resolution));
    const int j = int(std::floor((y - cfg.y_min) / cfg.resolution));
    if (i < 0 || i >= map.rows || j < 0 || j >= map.cols) continue;
    const double h = height_above_plane(Vec3(pt.x, pt.y, pt.z), plane);
    if (h < cfg.height_min || h > cfg.height_max) continue;
    int s = int(std::floor((h - cfg.height_min) / slice));
    if (s >= cfg.num_slices) s = cfg.num_slices - 1;  // top boundary joins the last slice
    if (s < 0) s = 0;
    float& cell = map.at(s, i, j);
    cell = std::max(cell, float(h));
    ++map.counts[std::size_t(i) * map.cols + j];
  }

  const float log16 = std::log(16.f);
  for (int i = 0; i < map.rows; ++i)
    for (int j = 0; j < map.cols; ++j) {
      const std::uint32_t n = map.counts[std::size_t(i) * map.cols + j];
      if (n == 0) continue;
      map.at(cfg.num_slices, i, j) = std::min(1.f, std::log(float(n) + 1.f) / log16);
    }
  return map;
}

namespace {

// bilinear sample on the cell-center lattice, edge clamped
float sample_bilinear(const BevMap& map, int c, double u, double v) {
  u = std::clamp(u, 0.0, double(map.rows - 1));
  v = std::clamp(v, 0.0, double(map.cols - 1));
  const int i0 = std::min(int(std::floor(u)), map.rows - 1);
  const int j0 = std::min(int(std::floor(v)), map.cols - 1);
  const int i1 = std::min(i0 + 1, map.rows - 1);
  const int j1 = std::min(j0 + 1, map.cols - 1);
  const double fu = u - i0;
  const double fv = v - j0;
  const double top = (1.0 - fv) * map.at(c, i0, j0) + fv * map.at(c, i0, j1);
  const double bot = (1.0 - fv) * map.at(c, i1, j0) + fv * map.at(c, i1, j1);
  return float((1.0 - fu) * top + fu * bot);
}

}  // namespace

FeatureCrop crop_resize_bev(const BevMap& map, const OrientedBox3D& box, int out_size) {
  if (out_size < 1) fail(ErrorCode::BadConfig, "crop size must be positive");
  const ConvexPolygon2D foot = box_footprint(box);
  double xa = foot.vertices[0].x(), xb = xa, ya = foot.vertices[0].y(), yb = ya;
  for (const Vec2& v : foot.vertices) {
    xa = std::min(xa, v.x());
    xb = std::max(xb, v.x());
    ya = std::min(ya, v.y());
    yb = std::max(yb, v.y());
  }
  const BevConfig& cfg = map.cfg;
  if (xb <= cfg.x_min || xa >= cfg.x_max || yb <= cfg.y_min || ya >= cfg.y_max)
    fail(ErrorCode::OutsideExtents, "box footprint misses the bev grid");

  FeatureCrop crop;
  crop.size = out_size;
  crop.channels = map.channels;
  crop.data.assign(std::size_t(map.channels) * out_size * out_size, 0.f);
  for (int c = 0; c < map.channels; ++c)
    for (int i = 0; i < out_size; ++i) {
      const double x = xa + (i + 0.5) * (xb - xa) / out_size;
      const double u = (x - cfg.x_min) / cfg.resolution - 0.5;
      for (int j = 0; j < out_size; ++j) {
        const double y = ya + (j + 0.5) * (yb - ya) / out_size;
        const double v = (y - cfg.y_min) / cfg.resolution - 0.5;
        crop.at(c, i, j) = sample_bilinear(map, c, u, v);
      }
    }
  return crop;
}

}  // namespace mlod
