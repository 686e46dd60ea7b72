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
#include <vector>

#include "dps/geometry.hpp"
#include "dps/json_io.hpp"

namespace dps {

/// Mirror plane {x : n.x = d} in camera space.
struct Plane {
  Vec3 n = Vec3(0.0, 0.0, -1.0);
  double d = 0.0;

  void validate() const;
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
};

/// Intersect with the plane and reflect. GeometryError when the ray is
/// parallel to the plane or the hit lies behind the origin.
Ray reflect_ray(const Plane& plane, const Ray& ray);

struct PixelObservation {
  int j = 0;
  Vec2 px = Vec2::Zero();
};

struct MirrorObservation {
  Plane plane;
  std::vector<PixelObservation> points;

  void validate() const;
};

std::vector<MirrorObservation> observations_from_json(const Json& j);
Json observations_to_json(const std::vector<MirrorObservation>& observations);

struct TriangulatedPoint {
  int j = 0;
  Vec3 position = Vec3::Zero();
  double residual = 0.0;  // RMS distance to the reflected rays
  int rays = 0;
};

struct TriangulationResult {
  std::vector<TriangulatedPoint> points;  // sorted by j
  std::vector<std::string> warnings;
};

/// Least-squares intersection of the reflected camera rays of each
/// superpixel across mirror poses.
TriangulationResult triangulate_superpixels(const std::vector<MirrorObservation>& observations,
                                            const CameraModel& camera);

/// Bilinear interpolation in (column, row) index space over the lattice of
/// sparse columns and rows. Every lattice node must be present and the
/// lattice must include the first and last column and row.
DisplayGrid interpolate_grid(const std::vector<TriangulatedPoint>& sparse, int cols, int rows);

enum class ResponseModel { kPower, kExponential };

/// y = a u^gamma + b (power) or y = a exp(gamma u) + b (exponential).
struct ResponseCurve {
  ResponseModel model = ResponseModel::kPower;
  double a = 1.0;
  double gamma = 1.0;
  double b = 0.0;
  double residual = 0.0;  // RMS

  void validate() const;
  Json to_json() const;
  static ResponseCurve from_json(const Json& j);
};

struct ResponseSample {
  double u = 0.0;
  double y = 0.0;
};

ResponseCurve fit_response(const std::vector<ResponseSample>& samples,
                           ResponseModel model = ResponseModel::kPower);

double apply_response(const ResponseCurve& curve, double u);

struct Inverted {
  double value = 0.0;
  bool clamped = false;
};

Inverted invert_response(const ResponseCurve& curve, double y);

/// Rows "channel,u,y"; a non-numeric first line is treated as a header.
std::vector<std::vector<ResponseSample>> read_response_samples(const std::string& path);

}  // namespace dps
