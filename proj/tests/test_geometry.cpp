#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"
#include "mlod/kitti_io.hpp"
#include "mlod/rng.hpp"

using namespace mlod;

namespace {

OrientedBox3D make_box(double cx, double cy, double cz, double l, double w, double h,
                       double yaw) {
  OrientedBox3D box;
  box.center = Vec3(cx, cy, cz);
  box.dims = Vec3(l, w, h);
  box.yaw = yaw;
  return box;
}

// Grid-sampling overlap estimate, independent of the polygon clipper.
double grid_iou_oracle(const OrientedBox3D& a, const OrientedBox3D& b, int samples) {
  const auto inside = [](const OrientedBox3D& box, double x, double y) {
    const double dx = x - box.center.x();
    const double dy = y - box.center.y();
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    return std::abs(lx) <= box.length() / 2 && std::abs(ly) <= box.width() / 2;
  };
  const double reach_a = 0.5 * std::hypot(a.length(), a.width());
  const double reach_b = 0.5 * std::hypot(b.length(), b.width());
  const double x_lo = std::min(a.center.x() - reach_a, b.center.x() - reach_b);
  const double x_hi = std::max(a.center.x() + reach_a, b.center.x() + reach_b);
  const double y_lo = std::min(a.center.y() - reach_a, b.center.y() - reach_b);
  const double y_hi = std::max(a.center.y() + reach_a, b.center.y() + reach_b);
  long in_a = 0, in_b = 0, in_both = 0;
  for (int r = 0; r < samples; ++r) {
    const double y = y_lo + (r + 0.5) * (y_hi - y_lo) / samples;
    for (int c = 0; c < samples; ++c) {
      const double x = x_lo + (c + 0.5) * (x_hi - x_lo) / samples;
      const bool pa = inside(a, x, y);
      const bool pb = inside(b, x, y);
      in_a += pa;
      in_b += pb;
      in_both += pa && pb;
    }
  }
  const long uni = in_a + in_b - in_both;
  return uni > 0 ? double(in_both) / double(uni) : 0.0;
}

}  // namespace

TEST_CASE("box corners follow the documented order") {
  const OrientedBox3D box = make_box(0, 0, 0.5, 4, 2, 1, 0);
  const auto corners = box_corners_3d(box);
  // corner 0 at (+l/2, +w/2), bottom face, counter-clockwise from +z
  CHECK(corners[0].isApprox(Vec3(2, 1, 0), 1e-12));
  CHECK(corners[1].isApprox(Vec3(-2, 1, 0), 1e-12));
  CHECK(corners[2].isApprox(Vec3(-2, -1, 0), 1e-12));
  CHECK(corners[3].isApprox(Vec3(2, -1, 0), 1e-12));
  CHECK(corners[4].isApprox(Vec3(2, 1, 1), 1e-12));
  CHECK(corners[7].isApprox(Vec3(2, -1, 1), 1e-12));

  // +90 degrees about +z maps (x, y) to (-y, x)
  const auto rotated = box_corners_3d(make_box(0, 0, 0.5, 4, 2, 1, M_PI / 2));
  CHECK(rotated[0].x() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rotated[0].y() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("bev overlap matches analytic values on axis-aligned fixtures") {
  const OrientedBox3D unit = make_box(0, 0, 0.5, 1, 1, 1, 0);
  CHECK(bev_iou(unit, unit) == doctest::Approx(1.0).epsilon(1e-12));

  // offset-0.5 unit squares: intersection 0.5, union 1.5
  const OrientedBox3D shifted = make_box(0.5, 0, 0.5, 1, 1, 1, 0);
  CHECK(bev_iou(unit, shifted) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  // 2x1 and 1x2 cross: intersection 1, union 3
  const OrientedBox3D horizontal = make_box(0, 0, 0.5, 2, 1, 1, 0);
  const OrientedBox3D vertical = make_box(0, 0, 0.5, 1, 2, 1, 0);
  CHECK(bev_iou(horizontal, vertical) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  // unit square vs itself rotated 45 degrees: octagon overlap, IoU = 1/sqrt(2)
  const OrientedBox3D diamond = make_box(0, 0, 0.5, 1, 1, 1, M_PI / 4);
  CHECK(bev_iou(unit, diamond) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

  // disjoint
  CHECK(bev_iou(unit, make_box(5, 5, 0.5, 1, 1, 1, 0)) == 0.0);
}

TEST_CASE("bev overlap is exactly symmetric and agrees with a sampling oracle") {
  Rng rng(20240818);
  for (int trial = 0; trial < 60; ++trial) {
    const OrientedBox3D a = make_box(rng.uniform(-3, 3), rng.uniform(-3, 3), 0.5,
                                     rng.uniform(0.5, 4), rng.uniform(0.5, 4), 1,
                                     rng.uniform(-M_PI, M_PI));
    const OrientedBox3D b = make_box(rng.uniform(-3, 3), rng.uniform(-3, 3), 0.5,
                                     rng.uniform(0.5, 4), rng.uniform(0.5, 4), 1,
                                     rng.uniform(-M_PI, M_PI));
    const double ab = bev_iou(a, b);
    CHECK(ab == bev_iou(b, a));
    CHECK(std::abs(ab - grid_iou_oracle(a, b, 400)) < 0.015);
  }
}

TEST_CASE("image overlap matches hand values") {
  const AxisAlignedBox2D a{0, 0, 10, 10};
  const AxisAlignedBox2D b{5, 0, 15, 10};
  CHECK(image_iou(a, b) == doctest::Approx(50.0 / 150.0).epsilon(1e-12));
  CHECK(image_iou(a, a) == 1.0);
  CHECK(image_iou(a, AxisAlignedBox2D{20, 20, 30, 30}) == 0.0);
}

TEST_CASE("nested rectangle fixtures drive the overlap to exact threshold doubles") {
  // Frozen by construction: gt nested in a 16x16 proposal, dims nudged by a
  // few ulps so the clipped overlap computes to the exact target double.
  struct Fixture {
    double target;
    double length;
    double width;
  };
  const Fixture fixtures[] = {
      {0.40, 0x1.9999999999993p+3, 0x1.0000000000005p+3},
      {0.45, 0x1.cccccccccccc6p+3, 0x1.0000000000004p+3},
      {0.55, 0x1.199999999999ap+3, 0x1p+4},
      {0.60, 0x1.3333333333333p+3, 0x1p+4},
      {0.65, 0x1.4cccccccccccep+3, 0x1.fffffffffffffp+3},
      {0.70, 0x1.6666666666666p+3, 0x1p+4},
  };
  const OrientedBox3D proposal = make_box(0, 0, 0.5, 16, 16, 1);
  for (const Fixture& f : fixtures) {
    const OrientedBox3D gt = make_box(0, 0, 0.5, f.length, f.width, 1);
    CHECK(bev_iou(proposal, gt) == f.target);
  }
}

TEST_CASE("projection fixture and back-projection inverse") {
  const CalibrationSet calib = parse_calibration(
      "P2: 100 0 60 0 0 100 40 0 0 0 1 0\n"
      "R0_rect: 1 0 0 0 1 0 0 0 1\n"
      "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n");
  const Vec3 p(10, 2, 1);
  const PixelDepth pd = project_point(calib, p);
  CHECK(pd.pixel.x() == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(pd.pixel.y() == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(pd.depth == doctest::Approx(10.0).epsilon(1e-12));

  const Vec3 back = backproject_pixel(calib, pd.pixel, pd.depth);
  CHECK((back - p).norm() < 1e-9);

  CHECK_THROWS_AS(project_point(calib, Vec3(-5, 0, 0)), Error);
}

TEST_CASE("projected box hull equals the per-corner oracle") {
  const ImageSize size{480, 352};
  const CalibrationSet calib = canonical_calibration(size, 300.0);
  const OrientedBox3D box = make_box(12, 1.5, 0.9, 3.8, 1.6, 1.5, 0.4);

  const ProjectedBox projected = project_box_to_image(box, calib, size);

  double left = 1e30, top = 1e30, right = -1e30, bottom = -1e30;
  double dmin = 1e30, dmax = -1e30;
  for (const Vec3& corner : box_corners_3d(box)) {
    const PixelDepth pd = project_point(calib, corner);
    left = std::min(left, pd.pixel.x());
    right = std::max(right, pd.pixel.x());
    top = std::min(top, pd.pixel.y());
    bottom = std::max(bottom, pd.pixel.y());
    dmin = std::min(dmin, pd.depth);
    dmax = std::max(dmax, pd.depth);
  }
  left = std::max(left, 0.0);
  top = std::max(top, 0.0);
  right = std::min(right, double(size.width));
  bottom = std::min(bottom, double(size.height));

  CHECK(projected.bbox.left == doctest::Approx(left).epsilon(1e-9));
  CHECK(projected.bbox.top == doctest::Approx(top).epsilon(1e-9));
  CHECK(projected.bbox.right == doctest::Approx(right).epsilon(1e-9));
  CHECK(projected.bbox.bottom == doctest::Approx(bottom).epsilon(1e-9));
  CHECK(projected.depth_min == doctest::Approx(dmin).epsilon(1e-12));
  CHECK(projected.depth_max == doctest::Approx(dmax).epsilon(1e-12));

  // any corner behind the camera rejects the whole box
  CHECK_THROWS_AS(project_box_to_image(make_box(-10, 0, 1, 4, 2, 1.5, 0), calib, size), Error);
}

TEST_CASE("canonical calibration puts the forward axis at the image center") {
  const ImageSize size{480, 352};
  const CalibrationSet calib = canonical_calibration(size, 300.0);
  const PixelDepth pd = project_point(calib, Vec3(25, 0, 0));
  CHECK(pd.pixel.x() == doctest::Approx(240.0).epsilon(1e-12));
  CHECK(pd.pixel.y() == doctest::Approx(176.0).epsilon(1e-12));
  CHECK(pd.depth == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("angle grid snap is idempotent and the mirror is self-inverse") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double snapped = snap_angle(rng.uniform(-M_PI, M_PI));
    CHECK(snap_angle(snapped) == snapped);
    const double mirrored = mirror_snapped_angle(snapped);
    CHECK(mirror_snapped_angle(mirrored) == snapped);
  }
}

TEST_CASE("label and box conversions invert each other") {
  const ImageSize size{480, 352};
  const CalibrationSet calib = canonical_calibration(size, 300.0);
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    OrientedBox3D box = make_box(rng.uniform(8, 24), rng.uniform(-6, 6), rng.uniform(0.5, 1.2),
                                 rng.uniform(2.5, 4.5), rng.uniform(1.2, 2.0),
                                 rng.uniform(1.2, 2.0), snap_angle(rng.uniform(-M_PI, M_PI)));
    const GroundTruthLabel label = box_to_label(box, "Car", calib, size);
    const OrientedBox3D back = label_to_box(label, calib);
    CHECK((back.center - box.center).norm() < 1e-9);
    CHECK((back.dims - box.dims).norm() < 1e-9);
    CHECK(std::abs(back.yaw - box.yaw) < 1e-9);
  }
}

TEST_CASE("plane transform preserves heights under a rigid map") {
  GroundPlane plane;
  plane.normal = Vec3(0.05, -0.02, 0.998).normalized();
  plane.offset = -1.4;

  Mat4 T = Mat4::Identity();
  const double a = 0.7;
  T(0, 0) = std::cos(a);
  T(0, 1) = -std::sin(a);
  T(1, 0) = std::sin(a);
  T(1, 1) = std::cos(a);
  T(0, 3) = 2.0;
  T(2, 3) = -0.5;

  const GroundPlane moved = transform_plane(plane, T);
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec3 p(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3));
    const Vec3 q = T.topLeftCorner<3, 3>() * p + T.topRightCorner<3, 1>();
    CHECK(height_above_plane(q, moved) ==
          doctest::Approx(height_above_plane(p, plane)).epsilon(1e-12));
  }
}
