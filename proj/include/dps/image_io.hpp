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

#include <string>

#include "dps/image.hpp"

namespace dps {

// Portable float map. Writes little-endian ("-1.0" scale), rows bottom to top,
// "PF" for 3 channels and "Pf" for 1 channel. Reads either byte order.
void write_pfm(const std::string& path, const Image& image);
Image read_pfm(const std::string& path);

void write_mask_pfm(const std::string& path, const Mask& mask);
Mask read_mask_pfm(const std::string& path);

// 8-bit PNG of a 1- or 3-channel image with values in [0, 1]; values are
// clamped and quantized as round(255 * v), no transfer curve applied.
void write_png(const std::string& path, const Image& image);

// Linear [0,1] to sRGB-encoded [0,1].
double srgb_encode(double linear);

// Each pixel replicated into a factor x factor block.
Image upscale_nearest(const Image& image, int factor);

}  // namespace dps
