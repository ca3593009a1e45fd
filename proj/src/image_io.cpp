#include "mlod/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "mlod/error.hpp"

namespace mlod {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

ImageRgb read_ppm(FILE* f, const std::string& path) {
  int width = 0, height = 0, maxval = 0;
  // header already consumed up to "P6"
  if (std::fscanf(f, "%d %d %d", &width, &height, &maxval) != 3 || width <= 0 || height <= 0 ||
      maxval != 255)
    fail(ErrorCode::IoFailure, "unsupported ppm header in " + path);
  std::fgetc(f);  // single whitespace after maxval
  ImageRgb image;
  image.width = width;
  image.height = height;
  image.data.resize(std::size_t(width) * height * 3);
  if (std::fread(image.data.data(), 1, image.data.size(), f) != image.data.size())
    fail(ErrorCode::IoFailure, "truncated ppm payload in " + path);
  return image;
}

}  // namespace

ImageRgb read_image(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(ErrorCode::IoFailure, "cannot open " + path);
  unsigned char magic[8] = {0};
  if (std::fread(magic, 1, 2, file.get()) != 2)
    fail(ErrorCode::IoFailure, "cannot read header of " + path);
  if (magic[0] == 'P' && magic[1] == '6') return read_ppm(file.get(), path);

  if (std::fread(magic + 2, 1, 6, file.get()) != 6 || png_sig_cmp(magic, 0, 8) != 0)
    fail(ErrorCode::IoFailure, path + " is neither png nor ppm");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) fail(ErrorCode::IoFailure, "libpng init failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::IoFailure, "libpng failed reading " + path);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  // normalize everything to 8-bit rgb
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
      png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  ImageRgb image;
  image.width = int(png_get_image_width(png, info));
  image.height = int(png_get_image_height(png, info));
  image.data.resize(std::size_t(image.width) * image.height * 3);
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y)
    rows[y] = image.data.data() + std::size_t(y) * image.width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

namespace {

void write_png(const std::string& path, const std::uint8_t* pixels, int width, int height,
               int color_type, int bytes_per_pixel) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) fail(ErrorCode::IoFailure, "libpng init failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::IoFailure, "libpng failed writing " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(pixels + std::size_t(y) * width * bytes_per_pixel);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_rgb(const std::string& path, const ImageRgb& image) {
  write_png(path, image.data.data(), image.width, image.height, PNG_COLOR_TYPE_RGB, 3);
}

void write_png_gray(const std::string& path, const std::vector<std::uint8_t>& pixels, int width,
                    int height) {
  if (pixels.size() != std::size_t(width) * height)
    fail(ErrorCode::ShapeMismatch, "gray buffer does not match dimensions");
  write_png(path, pixels.data(), width, height, PNG_COLOR_TYPE_GRAY, 1);
}

FeatureCrop crop_resize_rgb_bilinear(const ImageRgb& image, const AxisAlignedBox2D& bbox,
                                     int size) {
  if (size < 1) fail(ErrorCode::BadConfig, "crop size must be positive");
  if (bbox.width() <= 0.0 || bbox.height() <= 0.0)
    fail(ErrorCode::DegenerateOnImage, "rgb crop of an empty box");
  FeatureCrop crop;
  crop.size = size;
  crop.channels = 3;
  crop.data.assign(std::size_t(3) * size * size, 0.f);
  for (int i = 0; i < size; ++i) {
    const double y = bbox.top + (i + 0.5) * bbox.height() / size;
    const double v = std::clamp(y - 0.5, 0.0, double(image.height - 1));
    const int v0 = std::min(int(std::floor(v)), image.height - 1);
    const int v1 = std::min(v0 + 1, image.height - 1);
    const double fv = v - v0;
    for (int j = 0; j < size; ++j) {
      const double x = bbox.left + (j + 0.5) * bbox.width() / size;
      const double u = std::clamp(x - 0.5, 0.0, double(image.width - 1));
      const int u0 = std::min(int(std::floor(u)), image.width - 1);
      const int u1 = std::min(u0 + 1, image.width - 1);
      const double fu = u - u0;
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - fu) * image.pixel(u0, v0)[c] + fu * image.pixel(u1, v0)[c];
        const double bot = (1.0 - fu) * image.pixel(u0, v1)[c] + fu * image.pixel(u1, v1)[c];
        crop.at(c, i, j) = float((1.0 - fv) * top + fv * bot);
      }
    }
  }
  return crop;
}

}  // namespace mlod
