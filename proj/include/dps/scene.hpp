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

#include <cstdint>
#include <vector>

#include "dps/geometry.hpp"
#include "dps/image.hpp"
#include "dps/mesh.hpp"
#include "dps/patterns.hpp"

namespace dps {

enum class SceneKind { kSphere, kPlane, kMesh };

/// Synthetic object standing in for a scanned print with known geometry.
struct Scene {
  SceneKind kind = SceneKind::kSphere;

  // Sphere.
  Vec3 center{0.0, 0.0, 0.5};
  double radius = 0.08;

  // Plane through (0, 0, plane_z) with the given normal. A nonzero bump
  // amplitude perturbs the shading normal with a sinusoidal relief while the
  // geometry stays planar: n ~ base + a sin(2 pi f u + phase) t1
  //                                 + a sin(2 pi f v + phase) t2.
  Vec3 plane_normal{0.0, 0.0, -1.0};
  double plane_z = 0.5;
  double bump_amplitude = 0.0;
  double bump_frequency = 0.0;  // cycles per meter
  double bump_phase = 0.0;

  // Mesh, already placed in camera space.
  TriangleMesh mesh;

  Vec3 albedo{0.7, 0.7, 0.7};
  // Blinn-Phong, white specular color.
  double specular = 0.0;
  double shininess = 32.0;

  void validate() const;
};

struct RenderOptions {
  bool falloff = false;
  double plane_depth = 0.5;  // falloff reference distance
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

/// P images, index j matching the display grid.
struct BasisStack {
  std::vector<Image> images;

  int size() const { return static_cast<int>(images.size()); }
  bool empty() const { return images.empty(); }
  const Image& operator[](int j) const { return images[static_cast<std::size_t>(j)]; }
};

struct SceneSample {
  BasisStack basis;     // diffuse basis images
  BasisStack specular;  // empty unless the scene is glossy
  Image gt_normals;     // 3 channels, zero off-mask
  Image gt_albedo;      // 3 channels, zero off-mask
  Mask mask;
  CameraModel camera;
  DisplayGrid grid;

  int valid_pixels() const;
};

/// Basis images with only superpixel j lit at full white:
/// B_j = albedo * max(0, n . l_j) * w_j, with w_j = (plane_depth / r_j)^2 when
/// falloff is on and 1 otherwise; l_j is evaluated at the true surface point.
/// Pixels whose surface normal does not face the camera are left off-mask.
SceneSample render_basis(const Scene& scene, const CameraModel& camera, const DisplayGrid& grid,
                         const RenderOptions& options = {});

/// Direct render of one pattern (diffuse + specular), without basis images.
Image render_pattern(const Scene& scene, const CameraModel& camera, const DisplayGrid& grid,
                     const PatternSet& intensities, int pattern, const RenderOptions& options = {});

Image average_image(const BasisStack& basis);

// Round every stored value through float32 (the on-disk precision).
void quantize_to_float(SceneSample& sample);

}  // namespace dps
