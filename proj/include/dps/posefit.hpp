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

#include "dps/geometry.hpp"
#include "dps/image.hpp"
#include "dps/json_io.hpp"
#include "dps/mesh.hpp"

namespace dps {

/// Rigid pose applied to a model: x' = R(r) x + t, r an axis-angle vector.
struct PoseParams {
  Vec3 t = Vec3::Zero();
  Vec3 r = Vec3::Zero();

  Mat3 rotation() const;
  void validate() const;
};

Json pose_to_json(const PoseParams& pose, double mse);
PoseParams pose_from_json(const Json& j);

/// 1 where a transformed triangle in front of the camera covers the pixel
/// center.
Mask rasterize_silhouette(const TriangleMesh& mesh, const PoseParams& pose,
                          const CameraModel& camera);

double silhouette_mse(const Mask& a, const Mask& b);

struct PoseFitOptions {
  double translation_step = 0.01;  // meters
  double rotation_step = 0.05;     // radians
  double min_step_fraction = 1e-4;
  int max_evaluations = 3000;
  bool align_bounding_box = true;
  int supersample = 4;  // sub-pixel samples per axis for the search objective
  int kicks = 8;        // random restarts around the best pose
};

struct PoseFitResult {
  PoseParams pose;
  double mse = 0.0;
  double initial_mse = 0.0;
  int evaluations = 0;
};

/// Derivative-free silhouette alignment: optional bounding-box centering of
/// the initial guess, then coordinate pattern search over (t, r) with
/// halving steps on a sub-pixel coverage objective, then a few seeded random
/// restarts around the best pose. Returns the visited pose
/// with the lowest silhouette MSE, so never one worse than `init`.
PoseFitResult fit_pose(const TriangleMesh& mesh, const Mask& target, const PoseParams& init,
                       const CameraModel& camera, const PoseFitOptions& options = {});

/// Nearest-hit interpolated normal of the posed mesh in camera space,
/// zero off the silhouette.
Image render_gt_normals(const TriangleMesh& mesh, const PoseParams& pose, const CameraModel& camera);

}  // namespace dps
