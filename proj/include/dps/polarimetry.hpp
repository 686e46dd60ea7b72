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

#include "dps/image.hpp"

namespace dps {

/// Intensities behind linear polarizers at 0, 45, 90 and 135 degrees.
struct PolarizedCaptures {
  Image i0;
  Image i45;
  Image i90;
  Image i135;

  void validate() const;
};

/// Per-pixel, per-channel linear Stokes components.
struct StokesImage {
  Image s0;
  Image s1;
  Image s2;
};

enum class StokesMode {
  kStandard,  // s2 = I45 - I135
  kPaper,     // s2 = 2 I45 - I0, kept for fidelity experiments
};

StokesImage stokes_decompose(const PolarizedCaptures& captures,
                             StokesMode mode = StokesMode::kStandard);

struct Separation {
  Image diffuse;
  Image specular;
  // 1 where diffuse was not clamped at zero on any channel.
  Mask valid;
};

/// specular = sqrt(s1^2 + s2^2), diffuse = max(s0 - specular, 0).
Separation separate(const StokesImage& stokes);

/// Forward model: I_theta = diffuse / 2 + specular cos^2(theta - aolp).
PolarizedCaptures simulate_polarized(const Image& diffuse, const Image& specular,
                                     double aolp_deg = 0.0);

Image ambient_subtract(const Image& capture, const Image& ambient);

}  // namespace dps
