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

#include <string>
#include <vector>

#include "dps/geometry.hpp"

namespace dps {

/// Indexed triangle list with angle-weighted vertex normals.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> faces;
  std::vector<Vec3> normals;

  bool empty() const { return faces.empty(); }
  void compute_normals();
  Vec3 centroid() const;
};

// Subset of Wavefront OBJ: "v x y z" and "f a b c ..." records. Face entries
// may carry "/vt/vn" suffixes (ignored) and negative indices; polygons are
// fan-triangulated.
TriangleMesh load_obj(const std::string& path);
void save_obj(const std::string& path, const TriangleMesh& mesh);

TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());
TriangleMesh make_box(const Vec3& size, const Vec3& center = Vec3::Zero());

TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation);

/// Nearest visible triangle per pixel center, with perspective-correct
/// barycentric weights. Triangles with any vertex at z <= 0 are skipped.
/// Ties in depth keep the lowest triangle index.
struct RasterResult {
  int width = 0;
  int height = 0;
  Eigen::VectorXi triangle;  // -1 where nothing is hit
  Eigen::Matrix3Xd weights;
  Eigen::VectorXd depth;

  bool hit(int pixel) const { return triangle[pixel] >= 0; }
};

RasterResult rasterize(const TriangleMesh& mesh, const CameraModel& camera);

// Interpolated, normalized vertex normal of a hit pixel.
Vec3 interpolated_normal(const TriangleMesh& mesh, const RasterResult& raster, int pixel);

}  // namespace dps
