#pragma once

#include <vector>

#include "mlod/types.hpp"

namespace mlod {

// Lateral mirror of a whole frame: cloud y negated (bitwise), image mirrored
// horizontally (exact), calibration updated so the projection chain commutes
// with the mirror, labels mirrored on their exact grids. Applying the flip
// twice restores the cloud, image, and labels bitwise.
struct FlippedScene {
  RawPointCloud cloud;
  ImageRgb image;
  CalibrationSet calib;
  std::vector<GroundTruthLabel> labels;
};

FlippedScene flip_scene(const RawPointCloud& cloud, const ImageRgb& image,
                        const CalibrationSet& calib,
                        const std::vector<GroundTruthLabel>& labels);

// RGB covariance eigensystem of a training image set, channel values
// normalized to [0, 1]. Eigenvalues descend; eigenvector signs are fixed so
// the largest-magnitude component of each vector is positive.
struct PcaBasis {
  Vec3 eigenvalues = Vec3::Zero();
  Eigen::Matrix3d eigenvectors = Eigen::Matrix3d::Identity();  // columns
};

PcaBasis fit_pca_basis(const std::vector<const ImageRgb*>& images);

// Adds sum_c alphas[c] * eigenvalue[c] * eigenvector[c] to every pixel, the
// shift expressed in [0, 1] units and applied on the 8-bit scale, clamped to
// [0, 255]. alphas are typically N(0, 0.1) draws, one triple per image.
ImageRgb pca_jitter(const ImageRgb& image, const PcaBasis& basis, const Vec3& alphas);

}  // namespace mlod
