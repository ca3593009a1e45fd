#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlod {

// Flat float grid with a 16-byte header: magic, rows, cols, channels as
// little-endian u32, then rows*cols*channels float32 payload, plane-major.
// Written and read bytewise, so a round trip is bitwise exact.
struct GridFile {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t channels = 0;
  std::vector<float> values;
};

inline constexpr std::uint32_t kGridMagic = 0x4452474Du;  // "MGRD" little-endian

void write_grid_file(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                     std::uint32_t channels, const std::vector<float>& values);

GridFile read_grid_file(const std::string& path);

}  // namespace mlod
