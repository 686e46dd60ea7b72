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

#include "dps/polarimetry.hpp"

#include <cmath>

namespace dps {

void PolarizedCaptures::validate() const {
  if (!i0.same_shape(i45) || !i0.same_shape(i90) || !i0.same_shape(i135)) {
    throw ArgumentError("polarized captures: shape mismatch");
  }
  for (const Image* im : {&i0, &i45, &i90, &i135}) {
    if (!im->array().allFinite() || (im->array().size() > 0 && im->array().minCoeff() < 0.0)) {
      throw ArgumentError("polarized captures must be finite and non-negative");
    }
  }
}

StokesImage stokes_decompose(const PolarizedCaptures& captures, StokesMode mode) {
  captures.validate();
  const auto& a0 = captures.i0.array();
  const auto& a45 = captures.i45.array();
  const auto& a90 = captures.i90.array();
  const auto& a135 = captures.i135.array();

  StokesImage s{captures.i0, captures.i0, captures.i0};
  s.s0.array() = (a0 + a45 + a90 + a135) * 0.5;
  s.s1.array() = a0 - a90;
  if (mode == StokesMode::kStandard) {
    s.s2.array() = a45 - a135;
  } else {
    s.s2.array() = 2.0 * a45 - a0;
  }
  return s;
}

Separation separate(const StokesImage& stokes) {
  require_same_shape(stokes.s0, stokes.s1, "separate");
  require_same_shape(stokes.s0, stokes.s2, "separate");

  Separation out{stokes.s0, stokes.s0, Mask(stokes.s0.width(), stokes.s0.height(), 1, 1)};
  out.specular.array() = (stokes.s1.array().square() + stokes.s2.array().square()).sqrt();
  const Image::Storage raw = stokes.s0.array() - out.specular.array();
  out.diffuse.array() = raw.max(0.0);

  const int channels = stokes.s0.channels();
  for (int p = 0; p < stokes.s0.pixel_count(); ++p)
    for (int c = 0; c < channels; ++c)
      if (raw[static_cast<Eigen::Index>(p) * channels + c] < 0.0) out.valid.at(p) = 0;
  return out;
}

PolarizedCaptures simulate_polarized(const Image& diffuse, const Image& specular,
                                     double aolp_deg) {
  require_same_shape(diffuse, specular, "simulate_polarized");
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

  auto at_angle = [&](double theta_deg) {
    const double c = std::cos((theta_deg - aolp_deg) * kDegToRad);
    Image out = diffuse;
    out.array() = 0.5 * diffuse.array() + (c * c) * specular.array();
    return out;
  };
  return {at_angle(0.0), at_angle(45.0), at_angle(90.0), at_angle(135.0)};
}

Image ambient_subtract(const Image& capture, const Image& ambient) {
  require_same_shape(capture, ambient, "ambient_subtract");
  Image out = capture;
  out.array() = (capture.array() - ambient.array()).max(0.0);
  return out;
}

}  // namespace dps
