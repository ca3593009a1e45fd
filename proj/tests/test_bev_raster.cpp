#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "mlod/bev_raster.hpp"
#include "mlod/error.hpp"
#include "mlod/rng.hpp"
#include "mlod/types.hpp"

using namespace mlod;

namespace {

BevConfig small_config() {
  BevConfig cfg;
  cfg.resolution = 0.5;
  cfg.x_min = 0.0;
  cfg.x_max = 8.0;
  cfg.y_min = -4.0;
  cfg.y_max = 4.0;
  cfg.height_min = 0.0;
  cfg.height_max = 2.0;
  cfg.num_slices = 4;
  return cfg;
}

GroundPlane flat_plane() { return GroundPlane{Vec3(0, 0, 1), 0.0}; }

LidarPoint at(double x, double y, double z) {
  LidarPoint p;
  p.x = float(x);
  p.y = float(y);
  p.z = float(z);
  p.reflectance = 0.5f;
  return p;
}

}  // namespace

TEST_CASE("rasterize conserves exactly the in-range points") {
  const BevConfig cfg = small_config();
  const GroundPlane plane = flat_plane();
  Rng rng(501);
  RawPointCloud cloud;
  for (int i = 0; i < 5000; ++i)
    cloud.points.push_back(
        at(rng.uniform(-1, 9), rng.uniform(-5, 5), rng.uniform(-0.5, 2.5)));

  const BevMap map = rasterize(cloud, plane, cfg);
  CHECK(map.rows == 16);
  CHECK(map.cols == 16);
  CHECK(map.channels == cfg.num_slices + 1);

  // independent membership predicate; the flat plane makes height equal z
  std::size_t expected = 0;
  for (const LidarPoint& p : cloud.points) {
    const double h = double(p.z);
    if (p.x >= cfg.x_min && p.x < cfg.x_max && p.y >= cfg.y_min && p.y < cfg.y_max &&
        h >= cfg.height_min && h <= cfg.height_max) {
      ++expected;
    }
  }
  const std::size_t counted =
      std::accumulate(map.counts.begin(), map.counts.end(), std::size_t(0));
  CHECK(counted == expected);
}

TEST_CASE("height channels hold the per-slice maximum above ground") {
  const BevConfig cfg = small_config();
  const GroundPlane plane = flat_plane();
  RawPointCloud cloud;
  // three points in cell (2, 9) (x in [1, 1.5), y in [0.5, 1)), slice width 0.5
  for (double h : {0.2, 0.4, 0.3}) cloud.points.push_back(at(1.2, 0.7, h));
  // one more point in slice 2 of the same cell
  cloud.points.push_back(at(1.2, 0.7, 1.1));

  const BevMap map = rasterize(cloud, plane, cfg);
  CHECK(map.at(0, 2, 9) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(map.at(1, 2, 9) == 0.f);
  CHECK(map.at(2, 2, 9) == doctest::Approx(1.1).epsilon(1e-6));
  CHECK(map.at(3, 2, 9) == 0.f);
  CHECK(map.count(2, 9) == 4);
  // untouched cell stays empty
  CHECK(map.at(0, 0, 0) == 0.f);
  CHECK(map.count(0, 0) == 0);
}

TEST_CASE("density follows the saturating log rule") {
  const BevConfig cfg = small_config();
  const GroundPlane plane = flat_plane();
  const int density = cfg.num_slices;

  const auto cloud_with = [](int n) {
    RawPointCloud cloud;
    for (int i = 0; i < n; ++i) cloud.points.push_back(at(1.2, 0.7, 0.5));
    return cloud;
  };

  // N = 1 reproduces the defining expression bitwise in float
  const BevMap one = rasterize(cloud_with(1), plane, cfg);
  CHECK(one.at(density, 2, 9) == std::log(2.f) / std::log(16.f));

  // N = 15 saturates exactly: log(16)/log(16) evaluates to 1.0f
  const BevMap fifteen = rasterize(cloud_with(15), plane, cfg);
  CHECK(fifteen.at(density, 2, 9) == 1.0f);

  const BevMap many = rasterize(cloud_with(200), plane, cfg);
  CHECK(many.at(density, 2, 9) == 1.0f);
}

TEST_CASE("slice boundaries assign to exactly one slice and keep the top edge") {
  const BevConfig cfg = small_config();  // slice width 0.5
  const GroundPlane plane = flat_plane();
  RawPointCloud cloud;
  cloud.points.push_back(at(1.2, 0.7, 0.5));  // exactly on the slice 0/1 edge
  const BevMap map = rasterize(cloud, plane, cfg);
  const bool in_slice0 = map.at(0, 2, 9) > 0.f;
  const bool in_slice1 = map.at(1, 2, 9) > 0.f;
  CHECK(int(in_slice0) + int(in_slice1) == 1);

  // a point exactly at height_max is kept, folded into the last slice
  RawPointCloud top_cloud;
  top_cloud.points.push_back(at(1.2, 0.7, cfg.height_max));
  const BevMap top_map = rasterize(top_cloud, plane, cfg);
  CHECK(top_map.count(2, 9) == 1);
  CHECK(top_map.at(cfg.num_slices - 1, 2, 9) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lateral mirroring of the cloud mirrors the grid columns bitwise") {
  const BevConfig cfg = small_config();
  const GroundPlane plane = flat_plane();
  Rng rng(502);
  RawPointCloud cloud;
  for (int i = 0; i < 2000; ++i) {
    // keep points away from cell boundaries so the mirrored coordinate
    // cannot hop cells through rounding
    const int cx = int(rng.uniform_index(16));
    const int cy = int(rng.uniform_index(16));
    cloud.points.push_back(at(cfg.x_min + (cx + 0.3 + 0.4 * rng.uniform01()) * cfg.resolution,
                              cfg.y_min + (cy + 0.3 + 0.4 * rng.uniform01()) * cfg.resolution,
                              rng.uniform(0.01, 1.99)));
  }
  RawPointCloud mirrored = cloud;
  for (LidarPoint& p : mirrored.points) p.y = -p.y;

  const BevMap a = rasterize(cloud, plane, cfg);
  const BevMap b = rasterize(mirrored, plane, cfg);
  for (int c = 0; c < a.channels; ++c) {
    for (int i = 0; i < a.rows; ++i) {
      for (int j = 0; j < a.cols; ++j) {
        const float lhs = a.at(c, i, j);
        const float rhs = b.at(c, i, a.cols - 1 - j);
        CHECK(std::memcmp(&lhs, &rhs, sizeof(float)) == 0);
      }
    }
  }
}

TEST_CASE("bev crops resample a constant region to a constant") {
  const BevConfig cfg = small_config();
  const GroundPlane plane = flat_plane();
  RawPointCloud cloud;
  // blanket a 2x2 m region with one point per cell at the same height
  for (double x = 2.25; x < 4.0; x += 0.5)
    for (double y = -1.75; y < 0.0; y += 0.5) cloud.points.push_back(at(x, y, 0.25));
  const BevMap map = rasterize(cloud, plane, cfg);

  OrientedBox3D box;
  box.center = Vec3(3.0, -1.0, 0.5);
  box.dims = Vec3(1.0, 1.0, 1.0);
  box.yaw = 0.0;
  const FeatureCrop crop = crop_resize_bev(map, box, 4);
  CHECK(crop.size == 4);
  CHECK(crop.channels == map.channels);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(crop.at(0, i, j) == doctest::Approx(0.25).epsilon(1e-6));

  // a footprint entirely off the grid is rejected
  OrientedBox3D outside = box;
  outside.center = Vec3(100.0, 50.0, 0.5);
  try {
    crop_resize_bev(map, outside, 4);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideExtents);
  }
}
