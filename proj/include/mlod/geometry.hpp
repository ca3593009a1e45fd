#pragma once

#include <array>

#include "mlod/types.hpp"

namespace mlod {

// Projection of a 3D box into the image: axis-aligned hull of the eight
// projected corners clipped to the image, plus the corner depth span.
struct ProjectedBox {
  AxisAlignedBox2D bbox;
  double depth_min = 0.0;
  double depth_max = 0.0;
};

// Corners 0..3 are the bottom face counter-clockwise seen from +z, 4..7 the
// top face in the same order. Corner 0 sits at (+l/2, +w/2) before rotation.
std::array<Vec3, 8> box_corners_3d(const OrientedBox3D& box);

// Footprint on the ground plane (z dropped), counter-clockwise.
ConvexPolygon2D box_footprint(const OrientedBox3D& box);

double polygon_area(const ConvexPolygon2D& poly);

// Sutherland-Hodgman clip of a convex subject polygon by a convex clip
// polygon (both counter-clockwise). On-edge vertices are kept verbatim.
ConvexPolygon2D clip_convex(const ConvexPolygon2D& subject, const ConvexPolygon2D& clip);

// Overlap of the two footprints over their union, in [0, 1]. Exactly
// symmetric in its arguments. Heights are ignored.
double bev_iou(const OrientedBox3D& a, const OrientedBox3D& b);

double image_iou(const AxisAlignedBox2D& a, const AxisAlignedBox2D& b);

// Signed height of a point above the ground plane.
inline double height_above_plane(const Vec3& p, const GroundPlane& plane) {
  return plane.normal.dot(p) + plane.offset;
}

// Re-express a plane given the rigid map T from the plane's frame into the
// target frame.
GroundPlane transform_plane(const GroundPlane& plane, const Mat4& T);

// pixel = (u, v), depth = third homogeneous coordinate of the projection.
// Throws BehindCamera when depth <= 0.
struct PixelDepth {
  Vec2 pixel;
  double depth = 0.0;
};
PixelDepth project_point(const CalibrationSet& calib, const Vec3& sensor_point);

// Inverse of project_point along the viewing ray at the given depth.
Vec3 backproject_pixel(const CalibrationSet& calib, const Vec2& pixel, double depth);

// Throws BehindCamera if any corner has depth <= 0, DegenerateOnImage if the
// clipped hull has zero area.
ProjectedBox project_box_to_image(const OrientedBox3D& box, const CalibrationSet& calib,
                                  const ImageSize& image_size);

// --- angle grid -------------------------------------------------------------
// Camera-frame heading angles are kept on a 2^-51 grid so that the lateral
// mirror (pi - angle, wrapped to (-pi, pi]) is exact and self-inverse in
// doubles. The grid spacing (~4.4e-16 rad) is far below any printed or
// physical precision.
double snap_angle(double angle);
double mirror_snapped_angle(double angle);

// Pixel coordinates of 2D boxes sit on a 2^-20 grid for the same reason: the
// horizontal mirror x -> width - x is then exact and self-inverse. The snap
// moves a coordinate by at most ~5e-7 px.
double snap_pixel(double coord);

// --- camera-frame label geometry <-> sensor-frame boxes ---------------------

// Sensor-frame box for a camera-frame annotation row.
OrientedBox3D label_to_box(const GroundTruthLabel& label, const CalibrationSet& calib);

// Full annotation row for a sensor-frame box: location / rotation_y / alpha
// from the calibration, 2D bbox from the projected hull (zeros when the box
// does not land on the image).
GroundTruthLabel box_to_label(const OrientedBox3D& box, const std::string& class_name,
                              const CalibrationSet& calib, const ImageSize& image_size);

// Pinhole with the exact axis permutation between sensor and camera frames
// (cam x = -y, cam y = -z, cam z = x), zero translation, principal point at
// the image center.
CalibrationSet canonical_calibration(const ImageSize& image_size, double focal);

}  // namespace mlod
