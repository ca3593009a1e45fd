#include "mlod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mlod/error.hpp"

namespace mlod {

namespace {

constexpr double kPi = std::numbers::pi;

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

std::array<Vec3, 8> box_corners_3d(const OrientedBox3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.dims.x();
  const double hw = 0.5 * box.dims.y();
  const double hh = 0.5 * box.dims.z();
  // counter-clockwise seen from +z
  const double fx[4] = {+hl, -hl, -hl, +hl};
  const double fy[4] = {+hw, +hw, -hw, -hw};
  std::array<Vec3, 8> corners;
  for (int i = 0; i < 4; ++i) {
    const double x = box.center.x() + c * fx[i] - s * fy[i];
    const double y = box.center.y() + s * fx[i] + c * fy[i];
    corners[i] = Vec3(x, y, box.center.z() - hh);
    corners[i + 4] = Vec3(x, y, box.center.z() + hh);
  }
  return corners;
}

ConvexPolygon2D box_footprint(const OrientedBox3D& box) {
  const auto corners = box_corners_3d(box);
  ConvexPolygon2D poly;
  poly.vertices.reserve(4);
  for (int i = 0; i < 4; ++i) poly.vertices.emplace_back(corners[i].x(), corners[i].y());
  return poly;
}

double polygon_area(const ConvexPolygon2D& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

ConvexPolygon2D clip_convex(const ConvexPolygon2D& subject, const ConvexPolygon2D& clip) {
  std::vector<Vec2> out = subject.vertices;
  const auto& cv = clip.vertices;
  for (std::size_t e = 0, n = cv.size(); e < n && !out.empty(); ++e) {
    const Vec2& a = cv[e];
    const Vec2& b = cv[(e + 1) % n];
    std::vector<Vec2> in;
    in.swap(out);
    out.reserve(in.size() + 1);
    for (std::size_t i = 0, m = in.size(); i < m; ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % m];
      // >= 0 keeps on-edge vertices verbatim, so nested boxes clip exactly
      const double dp = cross2(a, b, p);
      const double dq = cross2(a, b, q);
      const bool p_in = dp >= 0.0;
      const bool q_in = dq >= 0.0;
      if (p_in) out.push_back(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        out.emplace_back(p.x() + t * (q.x() - p.x()), p.y() + t * (q.y() - p.y()));
      }
    }
  }
  return ConvexPolygon2D{std::move(out)};
}

double bev_iou(const OrientedBox3D& a, const OrientedBox3D& b) {
  const ConvexPolygon2D fa = box_footprint(a);
  const ConvexPolygon2D fb = box_footprint(b);
  const double area_a = polygon_area(fa);
  const double area_b = polygon_area(fb);
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  // fixed subject/clip roles keep the result exactly symmetric in (a, b)
  const bool a_big = (area_a > area_b) || (area_a == area_b && a.center.x() <= b.center.x());
  const ConvexPolygon2D& big = a_big ? fa : fb;
  const ConvexPolygon2D& small = a_big ? fb : fa;
  const double big_area = a_big ? area_a : area_b;
  const double small_area = a_big ? area_b : area_a;
  double inter = polygon_area(clip_convex(big, small));
  inter = std::clamp(inter, 0.0, small_area);
  const double uni = big_area + (small_area - inter);
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double image_iou(const AxisAlignedBox2D& a, const AxisAlignedBox2D& b) {
  const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  double inter = iw * ih;
  const double big = std::max(area_a, area_b);
  const double small = std::min(area_a, area_b);
  inter = std::min(inter, small);
  const double uni = big + (small - inter);
  return std::clamp(inter / uni, 0.0, 1.0);
}

GroundPlane transform_plane(const GroundPlane& plane, const Mat4& T) {
  const Eigen::Matrix3d R = T.topLeftCorner<3, 3>();
  const Vec3 t = T.topRightCorner<3, 1>();
  const Vec3 rotated = R * plane.normal;
  const double norm = rotated.norm();
  if (norm <= 0.0) fail(ErrorCode::ZeroNormal, "plane normal vanished under transform");
  GroundPlane out;
  out.normal = rotated / norm;
  out.offset = (plane.offset - rotated.dot(t)) / norm;
  return out;
}

PixelDepth project_point(const CalibrationSet& calib, const Vec3& sensor_point) {
  Eigen::Vector4d h(sensor_point.x(), sensor_point.y(), sensor_point.z(), 1.0);
  const Eigen::Vector3d img = calib.camera_projection * (calib.rectification * (calib.lidar_to_camera * h));
  if (img.z() <= 0.0) fail(ErrorCode::BehindCamera, "point projects behind the image plane");
  return PixelDepth{Vec2(img.x() / img.z(), img.y() / img.z()), img.z()};
}

Vec3 backproject_pixel(const CalibrationSet& calib, const Vec2& pixel, double depth) {
  // split P = [K | p4]; rectified point X solves K X + p4 = depth * [u v 1]
  const Eigen::Matrix3d K = calib.camera_projection.leftCols<3>();
  const Vec3 p4 = calib.camera_projection.col(3);
  const Vec3 rhs = depth * Vec3(pixel.x(), pixel.y(), 1.0) - p4;
  const Vec3 rect = K.colPivHouseholderQr().solve(rhs);
  Eigen::Vector4d h(rect.x(), rect.y(), rect.z(), 1.0);
  const Eigen::Vector4d cam = calib.rectification.inverse() * h;
  const Eigen::Vector4d sensor = calib.lidar_to_camera.inverse() * cam;
  return sensor.head<3>() / sensor.w();
}

ProjectedBox project_box_to_image(const OrientedBox3D& box, const CalibrationSet& calib,
                                  const ImageSize& image_size) {
  const auto corners = box_corners_3d(box);
  ProjectedBox out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double u0 = lo, u1 = -lo, v0 = lo, v1 = -lo;
  for (const Vec3& corner : corners) {
    const PixelDepth pd = project_point(calib, corner);  // throws BehindCamera
    lo = std::min(lo, pd.depth);
    hi = std::max(hi, pd.depth);
    u0 = std::min(u0, pd.pixel.x());
    u1 = std::max(u1, pd.pixel.x());
    v0 = std::min(v0, pd.pixel.y());
    v1 = std::max(v1, pd.pixel.y());
  }
  out.depth_min = lo;
  out.depth_max = hi;
  out.bbox.left = std::clamp(u0, 0.0, double(image_size.width));
  out.bbox.right = std::clamp(u1, 0.0, double(image_size.width));
  out.bbox.top = std::clamp(v0, 0.0, double(image_size.height));
  out.bbox.bottom = std::clamp(v1, 0.0, double(image_size.height));
  if (out.bbox.width() <= 0.0 || out.bbox.height() <= 0.0)
    fail(ErrorCode::DegenerateOnImage, "projected box has no area inside the image");
  return out;
}

double snap_angle(double angle) {
  if (angle > kPi || angle <= -kPi) {  // wrap into (-pi, pi] first
    angle = std::fmod(angle + kPi, 2.0 * kPi);
    if (angle <= 0.0) angle += 2.0 * kPi;
    angle -= kPi;
  }
  // multiples of 2^-51: exact to add/subtract against pi within (-4, 4)
  double snapped = std::ldexp(std::nearbyint(std::ldexp(angle, 51)), -51);
  if (snapped <= -kPi) snapped = kPi;  // snap_angle(-pi) == snap_angle(pi)
  return snapped;
}

double mirror_snapped_angle(double angle) {
  const double a = snap_angle(angle);
  // exact and self-inverse on the grid: pi is itself a multiple of 2^-51
  return (a >= 0.0) ? (kPi - a) : (-kPi - a);
}

double snap_pixel(double coord) {
  // multiples of 2^-20: width - coord is then exact for any image width
  return std::ldexp(std::nearbyint(std::ldexp(coord, 20)), -20);
}

namespace {

// rotation part of the sensor->camera chain
Eigen::Matrix3d sensor_to_rect_rotation(const CalibrationSet& calib) {
  return (calib.rectification * calib.lidar_to_camera).topLeftCorner<3, 3>();
}

Vec3 rect_to_sensor_point(const CalibrationSet& calib, const Vec3& rect) {
  Eigen::Vector4d h(rect.x(), rect.y(), rect.z(), 1.0);
  const Eigen::Vector4d sensor =
      (calib.rectification * calib.lidar_to_camera).inverse() * h;
  return sensor.head<3>() / sensor.w();
}

Vec3 sensor_to_rect_point(const CalibrationSet& calib, const Vec3& sensor) {
  Eigen::Vector4d h(sensor.x(), sensor.y(), sensor.z(), 1.0);
  const Eigen::Vector4d rect = calib.rectification * (calib.lidar_to_camera * h);
  return rect.head<3>() / rect.w();
}

}  // namespace

OrientedBox3D label_to_box(const GroundTruthLabel& label, const CalibrationSet& calib) {
  // camera frame: location is the bottom-face center, up is -y
  const Vec3 centroid_rect = label.location + Vec3(0.0, -0.5 * label.height, 0.0);
  OrientedBox3D box;
  box.center = rect_to_sensor_point(calib, centroid_rect);
  box.dims = Vec3(label.length, label.width, label.height);
  const Vec3 heading_rect(std::cos(label.rotation_y), 0.0, -std::sin(label.rotation_y));
  const Vec3 heading = sensor_to_rect_rotation(calib).transpose() * heading_rect;
  box.yaw = std::atan2(heading.y(), heading.x());
  return box;
}

GroundTruthLabel box_to_label(const OrientedBox3D& box, const std::string& class_name,
                              const CalibrationSet& calib, const ImageSize& image_size) {
  GroundTruthLabel label;
  label.class_name = class_name;
  label.dont_care = (class_name == "DontCare");
  label.height = box.dims.z();
  label.width = box.dims.y();
  label.length = box.dims.x();
  const Vec3 centroid_rect = sensor_to_rect_point(calib, box.center);
  label.location = centroid_rect + Vec3(0.0, 0.5 * box.dims.z(), 0.0);
  const Vec3 heading(std::cos(box.yaw), std::sin(box.yaw), 0.0);
  const Vec3 heading_rect = sensor_to_rect_rotation(calib) * heading;
  label.rotation_y = snap_angle(std::atan2(-heading_rect.z(), heading_rect.x()));
  label.alpha = snap_angle(label.rotation_y - std::atan2(label.location.x(), label.location.z()));
  try {
    label.bbox = project_box_to_image(box, calib, image_size).bbox;
    label.bbox.left = snap_pixel(label.bbox.left);
    label.bbox.top = snap_pixel(label.bbox.top);
    label.bbox.right = snap_pixel(label.bbox.right);
    label.bbox.bottom = snap_pixel(label.bbox.bottom);
  } catch (const Error&) {
    label.bbox = AxisAlignedBox2D{};  // off-image boxes carry an empty bbox
  }
  return label;
}

CalibrationSet canonical_calibration(const ImageSize& image_size, double focal) {
  CalibrationSet calib;
  calib.camera_projection.setZero();
  calib.camera_projection(0, 0) = focal;
  calib.camera_projection(0, 2) = 0.5 * image_size.width;
  calib.camera_projection(1, 1) = focal;
  calib.camera_projection(1, 2) = 0.5 * image_size.height;
  calib.camera_projection(2, 2) = 1.0;
  calib.rectification.setIdentity();
  Mat4 tr = Mat4::Zero();
  tr(0, 1) = -1.0;  // cam x = -sensor y
  tr(1, 2) = -1.0;  // cam y = -sensor z
  tr(2, 0) = 1.0;   // cam z =  sensor x
  tr(3, 3) = 1.0;
  calib.lidar_to_camera = tr;
  return calib;
}

}  // namespace mlod
