#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlod {

using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat4 = Eigen::Matrix4d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

// One return from the spinning scanner, sensor frame: x forward, y left, z up.
struct LidarPoint {
  float x = 0.f;
  float y = 0.f;
  float z = 0.f;
  float reflectance = 0.f;
};

struct RawPointCloud {
  std::vector<LidarPoint> points;

  std::size_t size() const { return points.size(); }
};

// Rectified projection chain: pixel ~ camera_projection * rectification *
// lidar_to_camera * [x y z 1]^T. Rotation blocks stay orthonormal; the parser
// records soft violations in `warnings` instead of rejecting the file.
struct CalibrationSet {
  Mat34 camera_projection = Mat34::Zero();
  Mat4 rectification = Mat4::Identity();
  Mat4 lidar_to_camera = Mat4::Identity();
  std::vector<std::string> warnings;
};

struct ImageSize {
  int width = 0;
  int height = 0;
};

// Plane normal * p + offset == signed height of p above the ground. Normal is
// unit length and oriented so the sensor origin has nonnegative height.
struct GroundPlane {
  Vec3 normal = Vec3(0, 0, 1);
  double offset = 0.0;
};

// 2D box in pixel coordinates, y grows downward. right > left, bottom > top.
struct AxisAlignedBox2D {
  double left = 0;
  double top = 0;
  double right = 0;
  double bottom = 0;

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double area() const { return width() * height(); }
};

// Upright box in the sensor frame. center is the 3D centroid, dims = (l, w, h)
// with l along the heading at yaw 0, yaw about +z (the ground normal).
struct OrientedBox3D {
  Vec3 center = Vec3::Zero();
  Vec3 dims = Vec3::Zero();  // (length, width, height)
  double yaw = 0.0;

  double length() const { return dims.x(); }
  double width() const { return dims.y(); }
  double height() const { return dims.z(); }
};

// Annotation row. Geometry fields live in the camera frame: location is the
// bottom-face center, rotation_y the heading about the camera y axis. score
// is present only for detection rows (16-field lines).
struct GroundTruthLabel {
  std::string class_name;
  bool dont_care = false;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  AxisAlignedBox2D bbox;
  double height = 0.0;
  double width = 0.0;
  double length = 0.0;
  Vec3 location = Vec3::Zero();
  double rotation_y = 0.0;
  std::optional<double> score;
};

struct ConvexPolygon2D {
  std::vector<Vec2> vertices;  // counter-clockwise
};

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct ImageRgb {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t* pixel(int x, int y) { return data.data() + 3 * (std::size_t(y) * width + x); }
  const std::uint8_t* pixel(int x, int y) const {
    return data.data() + 3 * (std::size_t(y) * width + x);
  }
};

// Small dense feature block: `channels` planes of size x size floats,
// plane-major, row-major inside a plane.
struct FeatureCrop {
  int size = 0;
  int channels = 0;
  std::vector<float> data;

  float& at(int c, int i, int j) { return data[(std::size_t(c) * size + i) * size + j]; }
  float at(int c, int i, int j) const { return data[(std::size_t(c) * size + i) * size + j]; }
};

struct Detection {
  OrientedBox3D box;
  std::string class_name;
  double score = 0.0;
};

}  // namespace mlod
