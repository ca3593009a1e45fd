#include "mlod/box_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"

namespace mlod {

namespace {

std::array<Vec2, 4> footprint_corners(const OrientedBox3D& box) {
  const auto corners = box_corners_3d(box);
  return {Vec2(corners[0].x(), corners[0].y()), Vec2(corners[1].x(), corners[1].y()),
          Vec2(corners[2].x(), corners[2].y()), Vec2(corners[3].x(), corners[3].y())};
}

}  // namespace

CornerEncoding encode_box(const OrientedBox3D& gt, const OrientedBox3D& proposal,
                          const GroundPlane& plane) {
  const auto gc = footprint_corners(gt);
  const auto pc = footprint_corners(proposal);
  int best_shift = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int shift = 0; shift < 4; ++shift) {
    double cost = 0.0;
    for (int i = 0; i < 4; ++i) cost += (gc[(i + shift) % 4] - pc[i]).squaredNorm();
    if (cost < best_cost) {  // strict: ties keep the smallest shift
      best_cost = cost;
      best_shift = shift;
    }
  }
  CornerEncoding enc;
  for (int i = 0; i < 4; ++i) {
    const Vec2 d = gc[(i + best_shift) % 4] - pc[i];
    enc.corner_offsets[2 * i] = d.x();
    enc.corner_offsets[2 * i + 1] = d.y();
  }
  const double gt_mid = height_above_plane(gt.center, plane);
  const double prop_mid = height_above_plane(proposal.center, plane);
  enc.height_offsets[0] = (gt_mid - 0.5 * gt.dims.z()) - (prop_mid - 0.5 * proposal.dims.z());
  enc.height_offsets[1] = (gt_mid + 0.5 * gt.dims.z()) - (prop_mid + 0.5 * proposal.dims.z());
  return enc;
}

OrientedBox3D decode_box(const CornerEncoding& enc, const OrientedBox3D& proposal,
                         const GroundPlane& plane, double heading_hint) {
  const auto pc = footprint_corners(proposal);
  std::array<Vec2, 4> corners;
  for (int i = 0; i < 4; ++i)
    corners[i] = pc[i] + Vec2(enc.corner_offsets[2 * i], enc.corner_offsets[2 * i + 1]);

  ConvexPolygon2D poly;
  poly.vertices.assign(corners.begin(), corners.end());
  if (std::abs(polygon_area(poly)) < 1e-6)
    fail(ErrorCode::DegenerateCorners, "decoded footprint has no area");

  // opposite-edge averages; for a true rectangle these are its two axes
  const Vec2 axis_a = 0.5 * ((corners[1] - corners[0]) + (corners[2] - corners[3]));
  const Vec2 axis_b = 0.5 * ((corners[2] - corners[1]) + (corners[3] - corners[0]));
  const Vec2 dominant = (axis_a.norm() >= axis_b.norm()) ? axis_a : axis_b;
  double yaw = std::atan2(dominant.y(), dominant.x());
  // corner 0 leads the heading by construction: axis_a points from corner 0
  // toward corner 1, a half turn from the heading
  yaw += std::numbers::pi;
  yaw = snap_angle(yaw);

  Vec2 centroid = Vec2::Zero();
  for (const Vec2& c : corners) centroid += c;
  centroid *= 0.25;

  const Vec2 u(std::cos(yaw), std::sin(yaw));
  const Vec2 v(-u.y(), u.x());
  double len = 0.0, wid = 0.0;
  for (const Vec2& c : corners) {
    len += std::abs((c - centroid).dot(u));
    wid += std::abs((c - centroid).dot(v));
  }
  len *= 0.5;  // mean of |projection| times 2
  wid *= 0.5;

  if (std::isfinite(heading_hint)) {
    const double diff = std::abs(std::remainder(heading_hint - yaw, 2.0 * std::numbers::pi));
    if (diff > 0.5 * std::numbers::pi) yaw = snap_angle(yaw + std::numbers::pi);
  }

  // heights above the plane back to a centroid along the ground normal
  const double prop_mid = height_above_plane(proposal.center, plane);
  const double bottom = (prop_mid - 0.5 * proposal.dims.z()) + enc.height_offsets[0];
  const double top = (prop_mid + 0.5 * proposal.dims.z()) + enc.height_offsets[1];

  OrientedBox3D out;
  out.dims = Vec3(len, wid, top - bottom);
  out.yaw = yaw;
  const double mid = 0.5 * (bottom + top);
  // lift the planar centroid to the height `mid` above the plane
  const Vec3 planar(centroid.x(), centroid.y(), proposal.center.z());
  const double planar_h = height_above_plane(planar, plane);
  out.center = planar + (mid - planar_h) / plane.normal.z() * Vec3(0, 0, 1);
  return out;
}

OrientationEncoding encode_orientation(double yaw) {
  return OrientationEncoding{{std::cos(yaw), std::sin(yaw)}};
}

double decode_orientation(const OrientationEncoding& enc) {
  const double norm = std::hypot(enc.v[0], enc.v[1]);
  if (norm < 1e-12) fail(ErrorCode::ZeroVector, "orientation pair has no direction");
  return std::atan2(enc.v[1] / norm, enc.v[0] / norm);
}

}  // namespace mlod
