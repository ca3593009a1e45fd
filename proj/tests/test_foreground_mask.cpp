#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mlod/error.hpp"
#include "mlod/foreground_mask.hpp"
#include "mlod/geometry.hpp"
#include "mlod/kitti_io.hpp"
#include "mlod/rng.hpp"
#include "mlod/synth_scenes.hpp"

using namespace mlod;

namespace {

const char* kCalibText =
    "P2: 100 0 60 0 0 100 40 0 0 0 1 0\n"
    "R0_rect: 1 0 0 0 1 0 0 0 1\n"
    "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n";

LidarPoint at(double x, double y, double z) {
  LidarPoint p;
  p.x = float(x);
  p.y = float(y);
  p.z = float(z);
  return p;
}

// brute-force median over the nonzero entries of one cell, independent of the
// library's selection strategy
double median_oracle(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

TEST_CASE("sparse depth map places points at the projected pixel") {
  const CalibrationSet calib = parse_calibration(kCalibText);
  const ImageSize size{120, 80};
  RawPointCloud cloud;
  cloud.points.push_back(at(10, 2, 1));     // projects to (40, 30) at depth 10
  cloud.points.push_back(at(-5, 0, 0));     // behind the camera, dropped
  cloud.points.push_back(at(10, -40, 0));   // far off the right edge, dropped

  const SparseDepthMap map = build_sparse_depth_map(cloud, calib, size);
  CHECK(map.width == 120);
  CHECK(map.height == 80);
  CHECK(map.at(40, 30) == doctest::Approx(10.0).epsilon(1e-6));  // camera-frame depth
  std::size_t nonzero = 0;
  for (float d : map.depth) nonzero += d != 0.f;
  CHECK(nonzero == 1);
}

TEST_CASE("sparse depth map keeps the nearest return per pixel") {
  const CalibrationSet calib = parse_calibration(kCalibText);
  const ImageSize size{120, 80};
  RawPointCloud cloud;
  cloud.points.push_back(at(10, 2, 1.0));
  cloud.points.push_back(at(5, 1, 0.5));  // same ray, so same pixel, depth 5
  const SparseDepthMap map = build_sparse_depth_map(cloud, calib, size);
  CHECK(map.at(40, 30) == doctest::Approx(5.0).epsilon(1e-6));

  // order must not matter
  std::swap(cloud.points[0], cloud.points[1]);
  const SparseDepthMap swapped = build_sparse_depth_map(cloud, calib, size);
  CHECK(swapped.at(40, 30) == map.at(40, 30));
}

TEST_CASE("nearest crop emits only values present in the source map") {
  SparseDepthMap map;
  map.width = 32;
  map.height = 24;
  map.depth.assign(32 * 24, 0.f);
  Rng rng(603);
  for (int i = 0; i < 200; ++i)
    map.at(int(rng.uniform_index(32)), int(rng.uniform_index(24))) = float(rng.uniform(1, 50));

  MaskConfig cfg;
  cfg.crop_size = 7;
  cfg.upsample = 4;
  const AxisAlignedBox2D bbox{3.2, 2.1, 29.8, 21.4};
  const std::vector<float> grid = crop_resize_depth_nearest(map, bbox, cfg);
  REQUIRE(grid.size() == std::size_t(28 * 28));

  std::vector<float> allowed(map.depth);
  std::sort(allowed.begin(), allowed.end());
  for (float v : grid)
    CHECK(std::binary_search(allowed.begin(), allowed.end(), v));
}

TEST_CASE("nearest crop of an aligned box is an exact sub-image") {
  SparseDepthMap map;
  map.width = 16;
  map.height = 16;
  map.depth.assign(16 * 16, 0.f);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) map.at(x, y) = float(100 * y + x);

  MaskConfig cfg;
  cfg.crop_size = 4;
  cfg.upsample = 1;  // working grid 4x4
  const AxisAlignedBox2D bbox{2, 3, 6, 7};  // 4x4 pixel window
  const std::vector<float> grid = crop_resize_depth_nearest(map, bbox, cfg);
  REQUIRE(grid.size() == 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(grid[std::size_t(i) * 4 + j] == float(100 * (3 + i) + 2 + j));
}

TEST_CASE("cell medians agree with a brute-force oracle") {
  MaskConfig cfg;
  cfg.crop_size = 5;
  cfg.upsample = 3;
  const int side = cfg.crop_size * cfg.upsample;
  Rng rng(604);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> grid(std::size_t(side) * side, 0.f);
    for (float& v : grid)
      if (rng.bernoulli(0.6)) v = float(rng.uniform(0.5, 40));

    const DepthCellMedians medians = cell_medians(grid, cfg);
    REQUIRE(medians.size == cfg.crop_size);
    for (int i = 0; i < cfg.crop_size; ++i) {
      for (int j = 0; j < cfg.crop_size; ++j) {
        std::vector<double> cell;
        for (int u = i * cfg.upsample; u < (i + 1) * cfg.upsample; ++u)
          for (int v = j * cfg.upsample; v < (j + 1) * cfg.upsample; ++v) {
            const float d = grid[std::size_t(u) * side + v];
            if (d != 0.f) cell.push_back(double(d));
          }
        CHECK(medians.at(i, j) == median_oracle(cell));
      }
    }
  }
}

TEST_CASE("even-count cells take the mean of the two middle values") {
  MaskConfig cfg;
  cfg.crop_size = 1;
  cfg.upsample = 2;
  std::vector<float> grid = {4.f, 1.f, 3.f, 2.f};
  const DepthCellMedians medians = cell_medians(grid, cfg);
  CHECK(medians.at(0, 0) == 2.5);

  // empty cell reports zero
  std::vector<float> empty = {0.f, 0.f, 0.f, 0.f};
  CHECK(cell_medians(empty, cfg).at(0, 0) == 0.0);
}

TEST_CASE("mask keep rule matches the defining predicate") {
  MaskConfig cfg;
  cfg.crop_size = 6;
  cfg.span_margin = 0.5;
  cfg.zero_margin = 0.1;
  Rng rng(605);
  for (int trial = 0; trial < 1000; ++trial) {
    DepthCellMedians medians;
    medians.size = cfg.crop_size;
    medians.values.resize(std::size_t(cfg.crop_size) * cfg.crop_size);
    for (double& m : medians.values)
      m = rng.bernoulli(0.2) ? 0.0 : rng.uniform(-0.05, 30.0);
    const double depth_min = rng.uniform(2, 20);
    const double depth_max = depth_min + rng.uniform(0, 8);

    const ForegroundMask mask = compute_mask(medians, depth_min, depth_max, cfg);
    REQUIRE(mask.size == cfg.crop_size);
    for (int i = 0; i < cfg.crop_size; ++i) {
      for (int j = 0; j < cfg.crop_size; ++j) {
        const double m = medians.at(i, j);
        const bool keep = (m >= depth_min - cfg.span_margin && m <= depth_max + cfg.span_margin) ||
                          (m >= 0.0 && m <= cfg.zero_margin);
        CHECK(mask.at(i, j) == (keep ? 1 : 0));
      }
    }
  }
}

TEST_CASE("mask band boundaries are inclusive on both sides") {
  MaskConfig cfg;
  cfg.crop_size = 2;
  cfg.span_margin = 0.5;
  cfg.zero_margin = 0.1;
  DepthCellMedians medians;
  medians.size = 2;
  // exactly on: lower band edge, upper band edge, zero-margin edge, just out
  medians.values = {6.3, 10.2, 0.1, 10.2000001};
  const ForegroundMask mask = compute_mask(medians, 6.8, 9.7, cfg);
  CHECK(mask.at(0, 0) == 1);
  CHECK(mask.at(0, 1) == 1);
  CHECK(mask.at(1, 0) == 1);
  CHECK(mask.at(1, 1) == 0);

  try {
    compute_mask(medians, 9.7, 6.8, cfg);
    FAIL("expected rejection of an inverted depth range");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDepthRange);
  }
}

TEST_CASE("mask keeps the near-depth band and the empty cells of a cluttered crop") {
  // box span [6.8, 9.7], margin 0.5: keep band [6.3, 10.2], no-data band [0, 0.1]
  MaskConfig cfg;
  cfg.crop_size = 3;
  cfg.span_margin = 0.5;
  cfg.zero_margin = 0.1;
  DepthCellMedians medians;
  medians.size = 3;
  medians.values = {
      7.1, 8.4, 9.9,   // object surface, kept
      3.0, 14.2, 6.2,  // occluder, background, just below the band: suppressed
      0.0, 0.05, 10.3  // no data kept, near-zero kept, just above: suppressed
  };
  const ForegroundMask mask = compute_mask(medians, 6.8, 9.7, cfg);
  const std::uint8_t expected[9] = {1, 1, 1, 0, 0, 0, 1, 1, 0};
  for (int i = 0; i < 9; ++i) CHECK(mask.cells[i] == expected[i]);
}

TEST_CASE("apply mask zeroes suppressed cells across all channels") {
  FeatureCrop crop;
  crop.size = 2;
  crop.channels = 3;
  crop.data.resize(12);
  for (size_t i = 0; i < crop.data.size(); ++i) crop.data[i] = float(i + 1);

  ForegroundMask mask;
  mask.size = 2;
  mask.cells = {1, 0, 0, 1};
  const FeatureCrop masked = apply_mask(crop, mask);
  for (int c = 0; c < 3; ++c) {
    CHECK(masked.at(c, 0, 0) == crop.at(c, 0, 0));
    CHECK(masked.at(c, 0, 1) == 0.f);
    CHECK(masked.at(c, 1, 0) == 0.f);
    CHECK(masked.at(c, 1, 1) == crop.at(c, 1, 1));
  }

  ForegroundMask wrong;
  wrong.size = 3;
  wrong.cells.assign(9, 1);
  try {
    apply_mask(crop, wrong);
    FAIL("expected shape rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("sparse-depth masks agree with the geometric silhouette oracle") {
  // End-to-end: synthetic scenes, masks from the lidar depth map vs masks from
  // exact box geometry. Agreement is high but not perfect (sparse returns,
  // median smoothing), so gate at 75% per box; measured worst case is ~84%.
  const SceneSpec base = toy_scene_defaults();
  const MaskConfig cfg = toy_mask_defaults();
  double worst = 1.0;
  int boxes = 0;
  for (std::uint64_t seed = 900; seed < 904; ++seed) {
    SceneSpec spec = base;
    spec.seed = seed;
    const SyntheticScene scene = generate_scene(spec);
    const SparseDepthMap depth_map =
        build_sparse_depth_map(scene.cloud, scene.calib, spec.image_size);
    for (const OrientedBox3D& box : scene.boxes) {
      ProjectedBox projected;
      try {
        projected = project_box_to_image(box, scene.calib, spec.image_size);
      } catch (const Error&) {
        continue;  // object clipped by the image, not part of this check
      }
      const std::vector<float> grid = crop_resize_depth_nearest(depth_map, projected.bbox, cfg);
      const DepthCellMedians medians = cell_medians(grid, cfg);
      const ForegroundMask mask =
          compute_mask(medians, projected.depth_min, projected.depth_max, cfg);
      const ForegroundMask oracle = silhouette_mask_oracle(scene, box, cfg);
      int agree = 0;
      const int total = mask.size * mask.size;
      for (int i = 0; i < total; ++i) agree += mask.cells[i] == oracle.cells[i];
      const double fraction = double(agree) / total;
      worst = std::min(worst, fraction);
      ++boxes;
      CHECK(fraction >= 0.75);
    }
  }
  CHECK(boxes >= 10);
  MESSAGE("worst silhouette agreement: ", worst, " over ", boxes, " boxes");
}
