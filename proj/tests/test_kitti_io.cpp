#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mlod/error.hpp"
#include "mlod/geometry.hpp"
#include "mlod/kitti_io.hpp"

using namespace mlod;

namespace {

// Known IEEE-754 single encodings, little endian, so the parser is checked
// against the wire format instead of against itself.
const std::uint8_t kTwoPointBlob[32] = {
    0x00, 0x00, 0x80, 0x3F,  // 1.0
    0x00, 0x00, 0x00, 0x40,  // 2.0
    0x00, 0x00, 0xC0, 0xBF,  // -1.5
    0x00, 0x00, 0x00, 0x3F,  // 0.5
    0x00, 0x00, 0x80, 0x3E,  // 0.25
    0x00, 0x00, 0x00, 0xC1,  // -8.0
    0x00, 0x00, 0x80, 0x40,  // 4.0
    0x00, 0x00, 0x80, 0x3F,  // 1.0
};

const char* kCalibText =
    "P2: 100 0 60 0 0 100 40 0 0 0 1 0\n"
    "R0_rect: 1 0 0 0 1 0 0 0 1\n"
    "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n";

}  // namespace

TEST_CASE("point cloud blob decodes known encodings exactly") {
  const RawPointCloud cloud = parse_point_cloud(kTwoPointBlob);
  REQUIRE(cloud.size() == 2);
  CHECK(cloud.points[0].x == 1.0f);
  CHECK(cloud.points[0].y == 2.0f);
  CHECK(cloud.points[0].z == -1.5f);
  CHECK(cloud.points[0].reflectance == 0.5f);
  CHECK(cloud.points[1].x == 0.25f);
  CHECK(cloud.points[1].y == -8.0f);
  CHECK(cloud.points[1].z == 4.0f);
  CHECK(cloud.points[1].reflectance == 1.0f);
}

TEST_CASE("point cloud write is the bitwise inverse of parse") {
  const RawPointCloud cloud = parse_point_cloud(kTwoPointBlob);
  const std::vector<std::uint8_t> blob = write_point_cloud(cloud);
  REQUIRE(blob.size() == sizeof(kTwoPointBlob));
  for (std::size_t i = 0; i < blob.size(); ++i) CHECK(blob[i] == kTwoPointBlob[i]);
}

TEST_CASE("point cloud blob length must be a multiple of 16") {
  std::vector<std::uint8_t> bad(kTwoPointBlob, kTwoPointBlob + 20);
  CHECK_THROWS_WITH_AS(parse_point_cloud(bad), doctest::Contains("20"), Error);
}

TEST_CASE("point cloud rejects non-finite values with the point index") {
  std::vector<std::uint8_t> bad(kTwoPointBlob, kTwoPointBlob + 32);
  bad[16 + 3] = 0x7F;  // second point x -> 0x7F800000 = +inf
  bad[16 + 2] = 0x80;
  try {
    parse_point_cloud(bad);
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("calibration parse fills the projection chain") {
  const CalibrationSet calib = parse_calibration(kCalibText);
  CHECK(calib.camera_projection(0, 0) == 100.0);
  CHECK(calib.camera_projection(0, 2) == 60.0);
  CHECK(calib.camera_projection(1, 2) == 40.0);
  CHECK(calib.camera_projection(2, 2) == 1.0);
  // R0 and Tr are promoted to homogeneous 4x4 with a unit last row
  CHECK(calib.rectification(3, 3) == 1.0);
  CHECK(calib.lidar_to_camera(0, 1) == -1.0);
  CHECK(calib.lidar_to_camera(1, 2) == -1.0);
  CHECK(calib.lidar_to_camera(2, 0) == 1.0);
  CHECK(calib.lidar_to_camera(3, 3) == 1.0);
  CHECK(calib.warnings.empty());

  // hand pinhole: sensor (10, 2, 1) -> camera (-2, -1, 10) -> pixel (40, 30)
  const PixelDepth pd = project_point(calib, Vec3(10, 2, 1));
  CHECK(pd.pixel.x() == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(pd.pixel.y() == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(pd.depth == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("calibration requires every chain matrix") {
  CHECK_THROWS_AS(parse_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1 0\n"), Error);
  try {
    parse_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1 0\nR0_rect: 1 0 0 0 1 0 0 0 1\n");
    FAIL("expected MissingKey");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingKey);
    CHECK(std::string(e.what()).find("Tr_velo_to_cam") != std::string::npos);
  }
}

TEST_CASE("calibration rejects wrong element counts") {
  try {
    parse_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1\n");
    FAIL("expected WrongArity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongArity);
  }
}

TEST_CASE("calibration warns on a rotation block off orthonormal") {
  const char* text =
      "P2: 100 0 60 0 0 100 40 0 0 0 1 0\n"
      "R0_rect: 1.002 0 0 0 1 0 0 0 1\n"
      "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0\n";
  const CalibrationSet calib = parse_calibration(text);
  CHECK(!calib.warnings.empty());
}

TEST_CASE("label parse handles 15-field, 16-field, and DontCare rows") {
  const char* text =
      "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n"
      "Pedestrian 0.10 1 0.50 100.00 120.00 140.00 200.00 1.80 0.60 0.90 2.00 1.60 8.00 0.40 "
      "0.87\n"
      "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10\n";
  const std::vector<GroundTruthLabel> labels = parse_labels(text);
  REQUIRE(labels.size() == 3);

  const GroundTruthLabel& car = labels[0];
  CHECK(car.class_name == "Car");
  CHECK(!car.dont_care);
  CHECK(car.truncation == 0.0);
  CHECK(car.occlusion == 0);
  // headings sit on the mirror-exact angle grid, ~4e-16 from the printed value
  CHECK(car.alpha == doctest::Approx(-1.58).epsilon(1e-12));
  // 2D coordinates sit on the pixel grid, within 5e-7 of the printed value
  CHECK(car.bbox.left == doctest::Approx(587.01).epsilon(1e-8));
  CHECK(car.bbox.bottom == doctest::Approx(200.12).epsilon(1e-8));
  CHECK(car.height == 1.65);
  CHECK(car.width == 1.67);
  CHECK(car.length == 3.64);
  CHECK(car.location.x() == -0.65);
  CHECK(car.location.z() == 46.70);
  CHECK(car.rotation_y == doctest::Approx(-1.59).epsilon(1e-12));
  CHECK(!car.score.has_value());

  CHECK(labels[1].score.has_value());
  CHECK(*labels[1].score == doctest::Approx(0.87).epsilon(1e-12));
  CHECK(labels[2].dont_care);
}

TEST_CASE("label parse rejects a wrong field count") {
  try {
    parse_labels("Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71\n");
    FAIL("expected WrongFieldCount");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongFieldCount);
  }
}

TEST_CASE("label write then parse recovers every field within printed precision") {
  const char* text =
      "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n";
  const std::vector<GroundTruthLabel> labels = parse_labels(text);
  const std::string line = format_label_line(labels[0]);
  const std::vector<GroundTruthLabel> again = parse_labels(line + "\n");
  REQUIRE(again.size() == 1);
  const GroundTruthLabel& a = labels[0];
  const GroundTruthLabel& b = again[0];
  CHECK(b.class_name == a.class_name);
  CHECK(b.truncation == doctest::Approx(a.truncation).epsilon(1e-2));
  CHECK(b.occlusion == a.occlusion);
  CHECK(b.alpha == doctest::Approx(a.alpha).epsilon(1e-6));
  CHECK(b.bbox.left == doctest::Approx(a.bbox.left).epsilon(1e-6));
  CHECK(b.bbox.top == doctest::Approx(a.bbox.top).epsilon(1e-6));
  CHECK(b.height == doctest::Approx(a.height).epsilon(1e-6));
  CHECK(b.location.x() == doctest::Approx(a.location.x()).epsilon(1e-6));
  CHECK(b.location.y() == doctest::Approx(a.location.y()).epsilon(1e-6));
  CHECK(b.location.z() == doctest::Approx(a.location.z()).epsilon(1e-6));
  CHECK(b.rotation_y == doctest::Approx(a.rotation_y).epsilon(1e-6));
}

TEST_CASE("ground plane parse skips headers, normalizes, and orients upward") {
  const char* text =
      "# Plane\n"
      "WIDTH 4\n"
      "HEIGHT 1\n"
      "-7.051729e-03 -9.997791e-01 -1.980151e-02 1.680367e+00\n";
  const GroundPlane plane = parse_ground_plane(text);
  CHECK(plane.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // camera origin height = offset, must be nonnegative after orientation
  CHECK(plane.offset >= 0.0);
  // dominant component is -y (upward in the camera frame)
  CHECK(plane.normal.y() < -0.99);
}

TEST_CASE("ground plane rejects a zero normal") {
  try {
    parse_ground_plane("0 0 0 1\n");
    FAIL("expected ZeroNormal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroNormal);
  }
}

TEST_CASE("ground plane write then parse is stable") {
  GroundPlane plane;
  plane.normal = Vec3(0.01, -0.9998, -0.02).normalized();
  plane.offset = 1.65;
  const GroundPlane again = parse_ground_plane(write_ground_plane(plane));
  CHECK((again.normal - plane.normal).norm() < 1e-12);
  CHECK(again.offset == doctest::Approx(plane.offset).epsilon(1e-12));
}

TEST_CASE("detection rows round-trip through write_detections and label_to_box") {
  const CalibrationSet calib = parse_calibration(kCalibText);
  const ImageSize size{480, 352};
  Detection det;
  det.box.center = Vec3(12.0, 1.5, 0.8);
  det.box.dims = Vec3(3.9, 1.6, 1.5);
  det.box.yaw = 0.35;
  det.class_name = "Car";
  det.score = 0.91;

  const std::string text = write_detections({det}, calib, size);
  const std::vector<GroundTruthLabel> rows = parse_labels(text);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].class_name == "Car");
  REQUIRE(rows[0].score.has_value());
  CHECK(*rows[0].score == doctest::Approx(0.91).epsilon(1e-6));

  const OrientedBox3D back = label_to_box(rows[0], calib);
  CHECK((back.center - det.box.center).norm() < 1e-5);
  CHECK((back.dims - det.box.dims).norm() < 1e-5);
  CHECK(std::abs(back.yaw - det.box.yaw) < 1e-5);
}
