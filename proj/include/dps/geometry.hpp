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

#include <vector>

#include "dps/errors.hpp"

namespace dps {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Camera space is right-handed: x right, y down, z forward, camera at the
// origin. Front-facing normals satisfy n . d < 0 for the viewing ray d.

/// Pinhole intrinsics. Pixel (x, y) has its center at coordinate (x, y).
struct CameraModel {
  double fx = 100.0;
  double fy = 100.0;
  double cx = 32.0;
  double cy = 32.0;
  int width = 64;
  int height = 64;

  void validate() const;
  bool contains(const Vec2& px) const {
    return px.x() >= 0.0 && px.y() >= 0.0 && px.x() < width && px.y() < height;
  }
  int pixel_count() const { return width * height; }
};

/// Unit viewing direction through pixel coordinates px.
Vec3 pixel_ray(const CameraModel& camera, const Vec2& px);

/// Perspective projection of a camera-space point with z > 0.
Vec2 project(const CameraModel& camera, const Vec3& point);

/// P superpixel point lights in camera space, row-major: j = row * cols + col.
struct DisplayGrid {
  int cols = 0;
  int rows = 0;
  std::vector<Vec3> positions;

  int size() const { return cols * rows; }
  int index(int col, int row) const { return row * cols + col; }
  void validate() const;
};

// Flat display in the plane z = depth, centered on the optical axis.
DisplayGrid make_planar_display(int cols, int rows, double width_m, double height_m,
                                double depth = 0.0);

// Display bent around a vertical axis (cylindrical arc of the given radius)
// facing the scene; the arc center sits at z = depth + radius.
DisplayGrid make_curved_display(int cols, int rows, double width_m, double height_m,
                                double radius, double depth = 0.0);

/// Unit directions from the scene toward every superpixel for each pixel.
///
/// Stored as a P x (3 * pixels) matrix: column 3p + k holds component k of
/// the direction at pixel p, so `directions(p)` is the P x 3 light matrix of
/// one pixel and the whole field multiplies a K x P pattern matrix at once.
class IlluminationField {
 public:
  IlluminationField() = default;
  IlluminationField(int width, int height, int superpixels, double plane_depth);

  int width() const { return width_; }
  int height() const { return height_; }
  int superpixels() const { return superpixels_; }
  double plane_depth() const { return plane_depth_; }

  Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> directions(
      int pixel) const {
    return data_.middleCols(3 * static_cast<Eigen::Index>(pixel), 3);
  }
  Eigen::Block<Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> directions(int pixel) {
    return data_.middleCols(3 * static_cast<Eigen::Index>(pixel), 3);
  }
  Vec3 direction(int x, int y, int j) const {
    return directions(y * width_ + x).row(j).transpose();
  }

  const Eigen::MatrixXd& matrix() const { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int superpixels_ = 0;
  double plane_depth_ = 0.0;
  Eigen::MatrixXd data_;
};

/// P x 3 matrix of unit directions from `point` to each superpixel.
Eigen::MatrixX3d light_directions(const DisplayGrid& grid, const Vec3& point);

IlluminationField build_illumination_field(const CameraModel& camera, const DisplayGrid& grid,
                                           double plane_depth = 0.5);

// Point on the viewing ray through px at depth z = plane_depth.
Vec3 plane_point(const CameraModel& camera, const Vec2& px, double plane_depth);

double angle_between_deg(const Vec3& a, const Vec3& b);

}  // namespace dps
