#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlod/types.hpp"

namespace mlod {

// Velodyne scan blob: packed little-endian float32 quadruples (x, y, z,
// reflectance), 16 bytes per point. Throws LengthNotMultipleOf16 /
// NonFiniteValue (with the offending point index).
RawPointCloud parse_point_cloud(std::span<const std::uint8_t> blob);

// Inverse of parse_point_cloud; bitwise round-trip.
std::vector<std::uint8_t> write_point_cloud(const RawPointCloud& cloud);

// Calibration text: `KEY: v0 v1 ...` lines. Requires P2 (12 values),
// R0_rect (9, promoted to a 4x4), Tr_velo_to_cam (12, promoted). A rotation
// block off orthonormal by more than 1e-3 lands in CalibrationSet::warnings.
CalibrationSet parse_calibration(const std::string& text);

// Annotation / detection text: 15 fields per line (16 with a trailing score).
// DontCare rows are retained with dont_care set. Heading angles and 2D box
// coordinates are snapped to the mirror-exact grids (see geometry.hpp); the
// shifts (~4e-16 rad, ~5e-7 px) are far below printed precision.
std::vector<GroundTruthLabel> parse_labels(const std::string& text);

// Ground plane text: comment lines (leading '#') and header words are
// skipped; the first four numeric tokens are (a, b, c, d) of a*x+b*y+c*z+d=0.
// The normal is unit-normalized and oriented so the sensor origin has
// nonnegative height. Throws ZeroNormal / WrongArity.
GroundPlane parse_ground_plane(const std::string& text);

std::string write_ground_plane(const GroundPlane& plane);

// KITTI 16-field result lines (score last). Geometry is converted to the
// camera frame through `calib`; parse_labels on the output recovers the box
// via label_to_box within printed precision. Scores are expected in [0, 1].
std::string write_detections(const std::vector<Detection>& detections,
                             const CalibrationSet& calib, const ImageSize& image_size);

// One KITTI-style label/detection line, no trailing newline.
std::string format_label_line(const GroundTruthLabel& label);

// file helpers used by the tools and tests
std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mlod
