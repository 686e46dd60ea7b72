// Copyright 2026 The dispstereo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dps/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace dps {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v & 0xFF0000u) >> 8) | (v >> 24);
}

std::string next_token(std::istream& in) {
  std::string token;
  in >> token;
  return token;
}

}  // namespace

void write_pfm(const std::string& path, const Image& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw ArgumentError("PFM supports 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  const std::string header = std::string(image.channels() == 3 ? "PF" : "Pf") + "\n" +
                             std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n-1.0\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  const int row_len = image.width() * image.channels();
  std::vector<std::uint32_t> row(static_cast<std::size_t>(row_len));
  for (int y = image.height() - 1; y >= 0; --y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        const float f = static_cast<float>(image(x, y, c));
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(bits));
        if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
        row[static_cast<std::size_t>(x * image.channels() + c)] = bits;
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
  }
  if (!out) throw IoError("write failed: " + path);
}

Image read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);

  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "PF") {
    channels = 3;
  } else if (magic == "Pf") {
    channels = 1;
  } else {
    throw IoError("not a PFM file: " + path);
  }
  int width = 0, height = 0;
  double scale = 0.0;
  in >> width >> height >> scale;
  if (!in || width <= 0 || height <= 0 || scale == 0.0) throw IoError("bad PFM header: " + path);
  in.get();  // single whitespace before raster

  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);

  Image image(width, height, channels);
  const int row_len = width * channels;
  std::vector<std::uint32_t> row(static_cast<std::size_t>(row_len));
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
    if (!in) throw IoError("truncated PFM raster: " + path);
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        std::uint32_t bits = row[static_cast<std::size_t>(x * channels + c)];
        if (swap) bits = byteswap32(bits);
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        image(x, y, c) = f;
      }
    }
  }
  return image;
}

void write_mask_pfm(const std::string& path, const Mask& mask) {
  Image image(mask.width(), mask.height(), 1);
  for (int p = 0; p < mask.pixel_count(); ++p) image.at(p) = mask.at(p) ? 1.0 : 0.0;
  write_pfm(path, image);
}

Mask read_mask_pfm(const std::string& path) {
  const Image image = read_pfm(path);
  Mask mask(image.width(), image.height(), 1);
  for (int p = 0; p < image.pixel_count(); ++p) mask.at(p) = image.at(p, 0) > 0.5 ? 1 : 0;
  return mask;
}

double srgb_encode(double linear) {
  const double v = std::clamp(linear, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

Image upscale_nearest(const Image& image, int factor) {
  if (factor < 1) throw ArgumentError("upscale factor must be >= 1");
  Image out(image.width() * factor, image.height() * factor, image.channels());
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      for (int c = 0; c < image.channels(); ++c) out(x, y, c) = image(x / factor, y / factor, c);
  return out;
}

void write_png(const std::string& path, const Image& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw ArgumentError("PNG export supports 1 or 3 channels");
  }
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw IoError("cannot open for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed: " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8,
               image.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<std::size_t>(image.width() * image.channels()));
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < image.channels(); ++c) {
        const double v = std::clamp(image(x, y, c), 0.0, 1.0);
        row[static_cast<std::size_t>(x * image.channels() + c)] =
            static_cast<png_byte>(std::lround(255.0 * v));
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace dps
