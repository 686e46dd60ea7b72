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

#include "dps/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <string>

namespace dps {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ArgumentError("camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ArgumentError("camera resolution must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw ArgumentError("camera principal point outside image");
  }
}

Vec3 pixel_ray(const CameraModel& camera, const Vec2& px) {
  if (!camera.contains(px)) {
    throw ArgumentError("pixel (" + std::to_string(px.x()) + ", " + std::to_string(px.y()) +
                        ") outside image");
  }
  return Vec3((px.x() - camera.cx) / camera.fx, (px.y() - camera.cy) / camera.fy, 1.0)
      .normalized();
}

Vec2 project(const CameraModel& camera, const Vec3& point) {
  if (!(point.z() > 0.0)) throw GeometryError("cannot project a point behind the camera");
  return {camera.fx * point.x() / point.z() + camera.cx,
          camera.fy * point.y() / point.z() + camera.cy};
}

void DisplayGrid::validate() const {
  if (cols <= 0 || rows <= 0 || size() < 2) throw ArgumentError("display grid needs P >= 2");
  if (static_cast<int>(positions.size()) != size()) {
    throw ArgumentError("display grid has " + std::to_string(positions.size()) +
                        " positions, expected " + std::to_string(size()));
  }
  for (const auto& p : positions) {
    if (!p.allFinite()) throw ArgumentError("display position is not finite");
  }
}

namespace {

// Superpixel centers in normalized [-0.5, 0.5] grid coordinates.
double cell_center(int i, int n) { return n == 1 ? 0.0 : (i + 0.5) / n - 0.5; }

}  // namespace

DisplayGrid make_planar_display(int cols, int rows, double width_m, double height_m,
                                double depth) {
  DisplayGrid grid{cols, rows, {}};
  grid.positions.reserve(static_cast<std::size_t>(cols * rows));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      grid.positions.emplace_back(cell_center(c, cols) * width_m, cell_center(r, rows) * height_m,
                                  depth);
  grid.validate();
  return grid;
}

DisplayGrid make_curved_display(int cols, int rows, double width_m, double height_m,
                                double radius, double depth) {
  if (!(radius > 0.0)) throw ArgumentError("curved display radius must be positive");
  DisplayGrid grid{cols, rows, {}};
  grid.positions.reserve(static_cast<std::size_t>(cols * rows));
  const double span = width_m / radius;  // arc length -> angle
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double theta = cell_center(c, cols) * span;
      grid.positions.emplace_back(radius * std::sin(theta), cell_center(r, rows) * height_m,
                                  depth + radius * (1.0 - std::cos(theta)));
    }
  grid.validate();
  return grid;
}

IlluminationField::IlluminationField(int width, int height, int superpixels, double plane_depth)
    : width_(width), height_(height), superpixels_(superpixels), plane_depth_(plane_depth) {
  data_ = Eigen::MatrixXd::Zero(superpixels, 3 * static_cast<Eigen::Index>(width) * height);
}

Eigen::MatrixX3d light_directions(const DisplayGrid& grid, const Vec3& point) {
  Eigen::MatrixX3d dirs(grid.size(), 3);
  for (int j = 0; j < grid.size(); ++j) {
    const Vec3 offset = grid.positions[static_cast<std::size_t>(j)] - point;
    const double dist = offset.norm();
    if (dist < 1e-9) {
      throw GeometryError("superpixel " + std::to_string(j) + " coincides with scene point");
    }
    dirs.row(j) = (offset / dist).transpose();
  }
  return dirs;
}

Vec3 plane_point(const CameraModel& camera, const Vec2& px, double plane_depth) {
  const Vec3 ray = pixel_ray(camera, px);
  return ray * (plane_depth / ray.z());
}

IlluminationField build_illumination_field(const CameraModel& camera, const DisplayGrid& grid,
                                           double plane_depth) {
  camera.validate();
  grid.validate();
  if (!(plane_depth > 0.0)) throw ArgumentError("plane depth must be positive");

  IlluminationField field(camera.width, camera.height, grid.size(), plane_depth);
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x) {
      const Vec3 point = plane_point(camera, Vec2(x, y), plane_depth);
      field.directions(y * camera.width + x) = light_directions(grid, point);
    }
  return field;
}

double angle_between_deg(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  const double s = a.cross(b).norm();
  const double c = a.dot(b);
  return std::atan2(s, c) * 180.0 / 3.14159265358979323846;
}

}  // namespace dps
