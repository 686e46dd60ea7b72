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

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "dps/errors.hpp"

namespace dps {

/// Interleaved multi-channel raster, row-major with row 0 at the top.
///
/// Pixel (x, y) maps to camera coordinate (x, y): pixel centers sit on
/// integer coordinates, matching pixel_ray().
template <typename Scalar>
class ImageT {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  ImageT() = default;
  ImageT(int width, int height, int channels, Scalar fill = Scalar(0))
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) {
      throw ArgumentError("image dimensions must be non-negative with at least one channel");
    }
    data_ = Storage::Constant(static_cast<Eigen::Index>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  int pixel_count() const { return width_ * height_; }
  bool empty() const { return data_.size() == 0; }

  bool same_shape(const ImageT& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  Scalar& operator()(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const Scalar& operator()(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  // Linear pixel index p = y * width + x.
  Scalar& at(int p, int c = 0) { return data_[static_cast<Eigen::Index>(p) * channels_ + c]; }
  const Scalar& at(int p, int c = 0) const {
    return data_[static_cast<Eigen::Index>(p) * channels_ + c];
  }

  Storage& array() { return data_; }
  const Storage& array() const { return data_; }

  template <typename Other>
  ImageT<Other> cast() const {
    ImageT<Other> out(width_, height_, channels_);
    out.array() = data_.template cast<Other>();
    return out;
  }

 private:
  Eigen::Index index(int x, int y, int c) const {
    return (static_cast<Eigen::Index>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  Storage data_;
};

using Image = ImageT<double>;
using Mask = ImageT<std::uint8_t>;

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) throw ArgumentError(std::string(what) + ": image shape mismatch");
}

}  // namespace dps
