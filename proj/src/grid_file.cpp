#include "mlod/grid_file.hpp"

#include <cstring>

#include "mlod/error.hpp"
#include "mlod/kitti_io.hpp"

namespace mlod {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 24));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

}  // namespace

void write_grid_file(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                     std::uint32_t channels, const std::vector<float>& values) {
  const std::size_t expected = std::size_t(rows) * cols * channels;
  if (values.size() != expected)
    fail(ErrorCode::ShapeMismatch, "grid payload holds " + std::to_string(values.size()) +
                                       " values, dims need " + std::to_string(expected));
  std::vector<std::uint8_t> bytes;
  bytes.reserve(16 + values.size() * 4);
  put_u32(bytes, kGridMagic);
  put_u32(bytes, rows);
  put_u32(bytes, cols);
  put_u32(bytes, channels);
  for (float v : values) {
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    put_u32(bytes, raw);
  }
  write_binary_file(path, bytes);
}

GridFile read_grid_file(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  if (bytes.size() < 16)
    fail(ErrorCode::WrongFieldCount, path + ": grid header needs 16 bytes, file has " +
                                         std::to_string(bytes.size()));
  GridFile grid;
  const std::uint32_t magic = get_u32(bytes.data());
  if (magic != kGridMagic)
    fail(ErrorCode::WrongFieldCount, path + ": bad grid magic");
  grid.rows = get_u32(bytes.data() + 4);
  grid.cols = get_u32(bytes.data() + 8);
  grid.channels = get_u32(bytes.data() + 12);
  const std::size_t expected = std::size_t(grid.rows) * grid.cols * grid.channels;
  if (bytes.size() != 16 + expected * 4)
    fail(ErrorCode::WrongFieldCount,
         path + ": grid payload size mismatch, header promises " + std::to_string(expected) +
             " values");
  grid.values.resize(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const std::uint32_t raw = get_u32(bytes.data() + 16 + i * 4);
    std::memcpy(&grid.values[i], &raw, 4);
  }
  return grid;
}

}  // namespace mlod
