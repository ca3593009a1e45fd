#pragma once

#include <string>
#include <vector>

#include "mlod/types.hpp"

namespace mlod {

// 8-bit RGB only. PPM (P6, maxval 255) is also accepted for fixtures.
ImageRgb read_image(const std::string& path);
void write_png_rgb(const std::string& path, const ImageRgb& image);
void write_png_gray(const std::string& path, const std::vector<std::uint8_t>& pixels, int width,
                    int height);

// Bilinear crop of `bbox` (continuous pixel coordinates) to size x size,
// half-pixel centers, edge clamped. Channels are planar R, G, B with the raw
// 0..255 range kept as floats.
FeatureCrop crop_resize_rgb_bilinear(const ImageRgb& image, const AxisAlignedBox2D& bbox,
                                     int size);

}  // namespace mlod
