#include "mlod/kitti_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"

namespace mlod {

namespace {

float read_f32_le(const std::uint8_t* p) {
  std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                       (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void write_f32_le(std::vector<std::uint8_t>& out, float v) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  out.push_back(std::uint8_t(bits & 0xff));
  out.push_back(std::uint8_t((bits >> 8) & 0xff));
  out.push_back(std::uint8_t((bits >> 16) & 0xff));
  out.push_back(std::uint8_t((bits >> 24) & 0xff));
}

double parse_double(const std::string& token, const char* what, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size())
    fail(ErrorCode::NonFiniteValue,
         std::string("bad ") + what + " '" + token + "' on line " + std::to_string(line_no));
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

void check_rotation(const Eigen::Matrix3d& R, const char* key, CalibrationSet& calib) {
  const double dev = (R * R.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (dev > 1e-3) {
    std::ostringstream msg;
    msg << key << " rotation block deviates from orthonormal by " << dev;
    calib.warnings.push_back(msg.str());
  }
}

}  // namespace

RawPointCloud parse_point_cloud(std::span<const std::uint8_t> blob) {
  if (blob.size() % 16 != 0)
    fail(ErrorCode::LengthNotMultipleOf16,
         "scan blob is " + std::to_string(blob.size()) + " bytes");
  RawPointCloud cloud;
  cloud.points.resize(blob.size() / 16);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const std::uint8_t* p = blob.data() + 16 * i;
    LidarPoint& pt = cloud.points[i];
    pt.x = read_f32_le(p);
    pt.y = read_f32_le(p + 4);
    pt.z = read_f32_le(p + 8);
    pt.reflectance = read_f32_le(p + 12);
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z) ||
        !std::isfinite(pt.reflectance))
      fail(ErrorCode::NonFiniteValue, "non-finite component in point " + std::to_string(i));
  }
  return cloud;
}

std::vector<std::uint8_t> write_point_cloud(const RawPointCloud& cloud) {
  std::vector<std::uint8_t> out;
  out.reserve(cloud.points.size() * 16);
  for (const LidarPoint& pt : cloud.points) {
    write_f32_le(out, pt.x);
    write_f32_le(out, pt.y);
    write_f32_le(out, pt.z);
    write_f32_le(out, pt.reflectance);
  }
  return out;
}

CalibrationSet parse_calibration(const std::string& text) {
  bool have_p2 = false, have_rect = false, have_tr = false;
  CalibrationSet calib;
  std::istringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    const auto tokens = split_ws(line.substr(colon + 1));
    auto values = [&](std::size_t expected) {
      if (tokens.size() != expected)
        fail(ErrorCode::WrongArity, key + " has " + std::to_string(tokens.size()) +
                                        " values, expected " + std::to_string(expected));
      std::vector<double> v(expected);
      for (std::size_t i = 0; i < expected; ++i) v[i] = parse_double(tokens[i], key.c_str(), line_no);
      return v;
    };
    if (key == "P2") {
      const auto v = values(12);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) calib.camera_projection(r, c) = v[4 * r + c];
      have_p2 = true;
    } else if (key == "R0_rect" || key == "R_rect") {
      const auto v = values(9);
      calib.rectification.setIdentity();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) calib.rectification(r, c) = v[3 * r + c];
      have_rect = true;
    } else if (key == "Tr_velo_to_cam") {
      const auto v = values(12);
      calib.lidar_to_camera.setIdentity();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) calib.lidar_to_camera(r, c) = v[4 * r + c];
      have_tr = true;
    }
    // other keys (P0, P1, P3, Tr_imu_to_velo, ...) are ignored
  }
  if (!have_p2) fail(ErrorCode::MissingKey, "P2");
  if (!have_rect) fail(ErrorCode::MissingKey, "R0_rect");
  if (!have_tr) fail(ErrorCode::MissingKey, "Tr_velo_to_cam");
  check_rotation(calib.rectification.topLeftCorner<3, 3>(), "R0_rect", calib);
  check_rotation(calib.lidar_to_camera.topLeftCorner<3, 3>(), "Tr_velo_to_cam", calib);
  return calib;
}

std::vector<GroundTruthLabel> parse_labels(const std::string& text) {
  std::vector<GroundTruthLabel> labels;
  std::istringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 15 && tokens.size() != 16)
      fail(ErrorCode::WrongFieldCount, "line " + std::to_string(line_no) + " has " +
                                           std::to_string(tokens.size()) + " fields");
    GroundTruthLabel label;
    label.class_name = tokens[0];
    label.dont_care = (label.class_name == "DontCare");
    auto num = [&](int i) { return parse_double(tokens[i], "label field", line_no); };
    label.truncation = num(1);
    label.occlusion = int(std::lround(num(2)));
    label.alpha = snap_angle(num(3));
    label.bbox = AxisAlignedBox2D{snap_pixel(num(4)), snap_pixel(num(5)), snap_pixel(num(6)),
                                  snap_pixel(num(7))};
    label.height = num(8);
    label.width = num(9);
    label.length = num(10);
    label.location = Vec3(num(11), num(12), num(13));
    label.rotation_y = snap_angle(num(14));
    if (tokens.size() == 16) label.score = num(15);
    labels.push_back(std::move(label));
  }
  return labels;
}

GroundPlane parse_ground_plane(const std::string& text) {
  std::vector<double> coeffs;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line) && coeffs.size() < 4) {
    if (!line.empty() && line[0] == '#') continue;
    const std::vector<std::string> tokens = split_ws(line);
    bool first = true;
    for (const std::string& tok : tokens) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      // Header lines ("WIDTH 4", "HEIGHT 1") open with a word; their trailing
      // numerals are not coefficients, so the whole line is skipped.
      if (first && used != tok.size()) break;
      first = false;
      if (used == tok.size()) {
        coeffs.push_back(v);
        if (coeffs.size() == 4) break;
      }
    }
  }
  if (coeffs.size() != 4)
    fail(ErrorCode::WrongArity,
         "plane text supplies " + std::to_string(coeffs.size()) + " coefficients, expected 4");
  Vec3 normal(coeffs[0], coeffs[1], coeffs[2]);
  const double norm = normal.norm();
  if (norm <= 0.0 || !std::isfinite(norm)) fail(ErrorCode::ZeroNormal, "plane normal has zero length");
  GroundPlane plane;
  plane.normal = normal / norm;
  plane.offset = coeffs[3] / norm;
  if (plane.offset < 0.0) {  // orient so the sensor origin is above the ground
    plane.normal = -plane.normal;
    plane.offset = -plane.offset;
  }
  return plane;
}

std::string write_ground_plane(const GroundPlane& plane) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.9f %.9f %.9f %.9f\n", plane.normal.x(), plane.normal.y(),
                plane.normal.z(), plane.offset);
  return std::string(buf);
}

std::string format_label_line(const GroundTruthLabel& label) {
  char buf[512];
  int n = std::snprintf(
      buf, sizeof(buf), "%s %.2f %d %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f",
      label.class_name.c_str(), label.truncation, label.occlusion, label.alpha, label.bbox.left,
      label.bbox.top, label.bbox.right, label.bbox.bottom, label.height, label.width, label.length,
      label.location.x(), label.location.y(), label.location.z(), label.rotation_y);
  std::string line(buf, std::size_t(n));
  if (label.score) {
    std::snprintf(buf, sizeof(buf), " %.6f", *label.score);
    line += buf;
  }
  return line;
}

std::string write_detections(const std::vector<Detection>& detections,
                             const CalibrationSet& calib, const ImageSize& image_size) {
  std::string out;
  for (const Detection& det : detections) {
    GroundTruthLabel label = box_to_label(det.box, det.class_name, calib, image_size);
    label.score = det.score;
    out += format_label_line(label);
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

}  // namespace mlod
