#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "mlod/error.hpp"
#include "mlod/grid_file.hpp"

using namespace mlod;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mlod_grid_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("grid files round trip bitwise") {
  TempDir dir;
  const std::string path = (dir.path / "a.grid").string();
  std::vector<float> values;
  for (int i = 0; i < 2 * 3 * 4; ++i) values.push_back(0.5f * float(i) - 3.25f);
  values[5] = -0.0f;  // signed zero must survive
  write_grid_file(path, 2, 3, 4, values);

  const GridFile back = read_grid_file(path);
  CHECK(back.rows == 2);
  CHECK(back.cols == 3);
  CHECK(back.channels == 4);
  REQUIRE(back.values.size() == values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    // bitwise, not numeric: distinguishes -0.0f from 0.0f
    CHECK(std::memcmp(&back.values[i], &values[i], sizeof(float)) == 0);
  }

  // header is exactly 16 bytes
  CHECK(fs::file_size(path) == 16 + values.size() * sizeof(float));
}

TEST_CASE("grid write rejects a payload that disagrees with the shape") {
  TempDir dir;
  const std::string path = (dir.path / "bad.grid").string();
  std::vector<float> values(7, 0.f);
  try {
    write_grid_file(path, 2, 2, 2, values);
    FAIL("expected shape mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("grid read rejects a wrong magic and names the file") {
  TempDir dir;
  const std::string path = (dir.path / "wrong_magic.grid").string();
  {
    std::ofstream out(path, std::ios::binary);
    const std::uint32_t header[4] = {0xDEADBEEFu, 1, 1, 1};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    const float v = 1.f;
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  try {
    read_grid_file(path);
    FAIL("expected magic rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("wrong_magic.grid") != std::string::npos);
  }
}

TEST_CASE("grid read rejects a truncated payload") {
  TempDir dir;
  const std::string path = (dir.path / "short.grid").string();
  {
    std::ofstream out(path, std::ios::binary);
    const std::uint32_t header[4] = {kGridMagic, 2, 2, 1};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    const float v[2] = {1.f, 2.f};  // promises 4 floats, delivers 2
    out.write(reinterpret_cast<const char*>(v), sizeof(v));
  }
  CHECK_THROWS_AS(read_grid_file(path), Error);
}

TEST_CASE("grid read rejects a missing file") {
  CHECK_THROWS_AS(read_grid_file("/nonexistent/never/here.grid"), Error);
}
