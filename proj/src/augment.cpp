#include "mlod/augment.hpp"

#include <algorithm>
#include <cmath>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"

namespace mlod {
namespace {

// Negating a float flips its sign bit; applying it twice is bitwise identity
// even for zeros and subnormals.
float negate_exact(float v) { return -v; }

}  // namespace

FlippedScene flip_scene(const RawPointCloud& cloud, const ImageRgb& image,
                        const CalibrationSet& calib,
                        const std::vector<GroundTruthLabel>& labels) {
  FlippedScene out;

  out.cloud.points.reserve(cloud.points.size());
  for (const LidarPoint& p : cloud.points) {
    LidarPoint q = p;
    q.y = negate_exact(p.y);
    out.cloud.points.push_back(q);
  }

  out.image.width = image.width;
  out.image.height = image.height;
  out.image.data.resize(image.data.size());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t* src = image.pixel(image.width - 1 - x, y);
      std::uint8_t* dst = out.image.pixel(x, y);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }

  // Mirror the projection chain: with C the camera-side mirror, F the
  // sensor-side mirror, and M the pixel mirror u -> width - u,
  //   P2' R0' Tr' (F X) = (M P2 C)(C R0 C)(C Tr F)(F X) = M P2 R0 Tr X,
  // so the flipped chain projects flipped points onto mirrored pixels.
  const double width = double(image.width);
  Mat4 camera_mirror = Mat4::Identity();
  camera_mirror(0, 0) = -1.0;
  Mat4 sensor_mirror = Mat4::Identity();
  sensor_mirror(1, 1) = -1.0;
  Eigen::Matrix3d pixel_mirror = Eigen::Matrix3d::Identity();
  pixel_mirror(0, 0) = -1.0;
  pixel_mirror(0, 2) = width;

  out.calib = calib;
  out.calib.camera_projection = pixel_mirror * (calib.camera_projection * camera_mirror);
  out.calib.rectification = camera_mirror * calib.rectification * camera_mirror;
  out.calib.lidar_to_camera = camera_mirror * calib.lidar_to_camera * sensor_mirror;

  out.labels.reserve(labels.size());
  for (const GroundTruthLabel& label : labels) {
    GroundTruthLabel flipped = label;
    flipped.location.x() = -label.location.x();
    flipped.rotation_y = mirror_snapped_angle(label.rotation_y);
    flipped.alpha = mirror_snapped_angle(label.alpha);
    // Coordinates sit on the 2^-20 grid, so width - x is exact and the mirror
    // self-inverse. An empty bbox (all zeros) stays empty rather than turning
    // into a degenerate [width, width] strip.
    if (label.bbox.right > label.bbox.left) {
      flipped.bbox.left = width - label.bbox.right;
      flipped.bbox.right = width - label.bbox.left;
    }
    out.labels.push_back(std::move(flipped));
  }

  return out;
}

PcaBasis fit_pca_basis(const std::vector<const ImageRgb*>& images) {
  double mean[3] = {0.0, 0.0, 0.0};
  std::size_t count = 0;
  for (const ImageRgb* image : images) {
    const std::size_t pixels = std::size_t(image->width) * image->height;
    for (std::size_t i = 0; i < pixels; ++i) {
      for (int c = 0; c < 3; ++c) mean[c] += image->data[3 * i + c] / 255.0;
    }
    count += pixels;
  }
  if (count == 0) fail(ErrorCode::BadConfig, "pca basis needs at least one pixel");
  for (double& m : mean) m /= double(count);

  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  for (const ImageRgb* image : images) {
    const std::size_t pixels = std::size_t(image->width) * image->height;
    for (std::size_t i = 0; i < pixels; ++i) {
      double d[3];
      for (int c = 0; c < 3; ++c) d[c] = image->data[3 * i + c] / 255.0 - mean[c];
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) covariance(r, c) += d[r] * d[c];
    }
  }
  covariance /= double(count);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance);
  PcaBasis basis;
  // solver returns ascending eigenvalues; store descending with deterministic
  // signs (largest-magnitude component positive)
  for (int k = 0; k < 3; ++k) {
    const int src = 2 - k;
    basis.eigenvalues[k] = std::max(0.0, solver.eigenvalues()[src]);
    Vec3 v = solver.eigenvectors().col(src);
    int arg = 0;
    for (int c = 1; c < 3; ++c)
      if (std::abs(v[c]) > std::abs(v[arg])) arg = c;
    if (v[arg] < 0.0) v = -v;
    basis.eigenvectors.col(k) = v;
  }
  return basis;
}

ImageRgb pca_jitter(const ImageRgb& image, const PcaBasis& basis, const Vec3& alphas) {
  Vec3 shift = Vec3::Zero();
  for (int k = 0; k < 3; ++k) shift += alphas[k] * basis.eigenvalues[k] * basis.eigenvectors.col(k);
  shift *= 255.0;

  ImageRgb out;
  out.width = image.width;
  out.height = image.height;
  out.data.resize(image.data.size());
  for (std::size_t i = 0; i < image.data.size(); i += 3) {
    for (int c = 0; c < 3; ++c) {
      const double v = double(image.data[i + c]) + shift[c];
      out.data[i + c] = std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

}  // namespace mlod
