#pragma once

#include <array>
#include <limits>

#include "mlod/types.hpp"

namespace mlod {

// Regression target relative to a proposal: planar offsets for the four
// footprint corners (indexed by the proposal's corner order) plus offsets of
// the two horizontal faces measured along the ground normal.
struct CornerEncoding {
  std::array<double, 8> corner_offsets{};  // dx0, dy0, dx1, dy1, ...
  std::array<double, 2> height_offsets{};  // bottom, top

  static constexpr int kDims = 10;
  std::array<double, kDims> flat() const {
    return {corner_offsets[0], corner_offsets[1], corner_offsets[2], corner_offsets[3],
            corner_offsets[4], corner_offsets[5], corner_offsets[6], corner_offsets[7],
            height_offsets[0], height_offsets[1]};
  }
  static CornerEncoding from_flat(const std::array<double, kDims>& v) {
    CornerEncoding e;
    for (int i = 0; i < 8; ++i) e.corner_offsets[i] = v[i];
    e.height_offsets = {v[8], v[9]};
    return e;
  }
};

// (cos yaw, sin yaw)
struct OrientationEncoding {
  std::array<double, 2> v{1.0, 0.0};
};

// Ground-truth corners are matched to the proposal's by the cyclic shift with
// the smallest total squared planar offset (ties take the smallest shift).
CornerEncoding encode_box(const OrientedBox3D& gt, const OrientedBox3D& proposal,
                          const GroundPlane& plane);

// Applies the offsets to the proposal corners and fits the nearest rectangle:
// yaw from the dominant averaged edge direction (modulo pi), dims from the
// averaged opposite edges. `heading_hint`, when finite, picks the yaw half
// (yaw or yaw+pi) closer to it. Throws DegenerateCorners when the decoded
// footprint has (near) zero area.
OrientedBox3D decode_box(const CornerEncoding& enc, const OrientedBox3D& proposal,
                         const GroundPlane& plane,
                         double heading_hint = std::numeric_limits<double>::quiet_NaN());

OrientationEncoding encode_orientation(double yaw);

// atan2 of the (re-normalized) pair. Throws ZeroVector on a vanishing input.
double decode_orientation(const OrientationEncoding& enc);

}  // namespace mlod
