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

#include <doctest.h>

#include <cmath>

#include "dps/geometry.hpp"
#include "dps/json_io.hpp"
#include "dps/rng.hpp"

using namespace dps;

namespace {

CameraModel cam100() {
  CameraModel c;
  c.fx = c.fy = 100.0;
  c.cx = c.cy = 32.0;
  c.width = c.height = 64;
  return c;
}

}  // namespace

TEST_CASE("pixel_ray at the principal point looks down +z") {
  const Vec3 d = pixel_ray(cam100(), Vec2(32, 32));
  CHECK((d - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("pixel_ray follows the pinhole model") {
  CameraModel c = cam100();
  c.width = 200;
  const Vec3 d = pixel_ray(c, Vec2(132, 32));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(d.x() == doctest::Approx(s).epsilon(1e-12));
  CHECK(d.y() == doctest::Approx(0.0));
  CHECK(d.z() == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("pixel_ray rejects pixels outside the image") {
  CHECK_THROWS_AS(pixel_ray(cam100(), Vec2(-1, 0)), ArgumentError);
  CHECK_THROWS_AS(pixel_ray(cam100(), Vec2(0, 64)), ArgumentError);
}

TEST_CASE("pixel_ray and project round trip") {
  const CameraModel c = cam100();
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 px(rng.uniform(0, 63.999), rng.uniform(0, 63.999));
    const Vec3 d = pixel_ray(c, px) * rng.uniform(0.1, 5.0);
    CHECK((project(c, d) - px).norm() < 1e-9);
  }
}

TEST_CASE("camera validation") {
  CameraModel c = cam100();
  c.fx = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = cam100();
  c.cx = 64;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("light directions from a scene point") {
  DisplayGrid g;
  g.cols = 2;
  g.rows = 1;
  g.positions = {Vec3(0, 1, 0.5), Vec3(0, 0, 0)};
  const Eigen::MatrixX3d l = light_directions(g, Vec3(0, 0, 0.5));
  CHECK((l.row(0).transpose() - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((l.row(1).transpose() - Vec3(0, 0, -1)).norm() < 1e-15);
}

TEST_CASE("coincident superpixel is degenerate") {
  DisplayGrid g;
  g.cols = 2;
  g.rows = 1;
  g.positions = {Vec3(0, 0, 0.5), Vec3(0, 0, 0)};
  CHECK_THROWS_AS(light_directions(g, Vec3(0, 0, 0.5)), GeometryError);
}

TEST_CASE("illumination field shape and unit norms") {
  const CameraModel c = cam100();
  const DisplayGrid g = make_planar_display(2, 1, 0.6, 0.3);
  const IlluminationField f = build_illumination_field(c, g, 0.5);
  CHECK(f.width() == 64);
  CHECK(f.height() == 64);
  CHECK(f.superpixels() == 2);
  CHECK(f.matrix().rows() == 2);
  CHECK(f.matrix().cols() == 3 * 64 * 64);
  for (int p = 0; p < 64 * 64; ++p)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(f.directions(p).row(j).norm() - 1.0) < 1e-6);
}

TEST_CASE("illumination field matches direct evaluation at the plane point") {
  const CameraModel c = cam100();
  const DisplayGrid g = make_planar_display(4, 3, 0.8, 0.5);
  const IlluminationField f = build_illumination_field(c, g, 0.4);
  for (int y : {0, 17, 63})
    for (int x : {0, 40, 63}) {
      const Vec3 d = pixel_ray(c, Vec2(x, y));
      const Vec3 p = d * (0.4 / d.z());
      for (int j = 0; j < g.size(); ++j) {
        const Vec3 want = (g.positions[static_cast<std::size_t>(j)] - p).normalized();
        CHECK((f.direction(x, y, j) - want).norm() < 1e-14);
      }
    }
}

TEST_CASE("permuting superpixels permutes the field") {
  const CameraModel c = cam100();
  DisplayGrid g = make_planar_display(3, 2, 0.8, 0.5);
  DisplayGrid h = g;
  const std::vector<int> perm = {4, 2, 0, 5, 1, 3};
  for (int j = 0; j < 6; ++j) h.positions[static_cast<std::size_t>(j)] = g.positions[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
  const IlluminationField fg = build_illumination_field(c, g, 0.5);
  const IlluminationField fh = build_illumination_field(c, h, 0.5);
  for (int p = 0; p < 64 * 64; p += 37)
    for (int j = 0; j < 6; ++j)
      CHECK((fh.directions(p).row(j) - fg.directions(p).row(perm[static_cast<std::size_t>(j)])).norm() == 0.0);
}

TEST_CASE("field changes continuously with plane depth") {
  const CameraModel c = cam100();
  const DisplayGrid g = make_planar_display(4, 2, 0.8, 0.5);
  const IlluminationField a = build_illumination_field(c, g, 0.5);
  double prev = 0.0;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const IlluminationField b = build_illumination_field(c, g, 0.5 + eps);
    double worst = 0.0;
    for (int p = 0; p < 64 * 64; p += 11)
      for (int j = 0; j < g.size(); ++j)
        worst = std::max(worst, angle_between_deg(a.directions(p).row(j).transpose(),
                                                  b.directions(p).row(j).transpose()));
    if (prev > 0.0) CHECK(worst < prev * 0.2);  // roughly linear in eps
    CHECK(worst < 1e3 * eps);
    prev = worst;
  }
}

TEST_CASE("build_illumination_field rejects a non-positive plane depth") {
  CHECK_THROWS_AS(build_illumination_field(cam100(), make_planar_display(2, 1, 1, 1), 0.0),
                  ArgumentError);
}

TEST_CASE("planar display layout") {
  const DisplayGrid g = make_planar_display(4, 2, 0.8, 0.4, 0.1);
  CHECK(g.size() == 8);
  // Row-major, cell centers.
  CHECK((g.positions[0] - Vec3(-0.3, -0.1, 0.1)).norm() < 1e-15);
  CHECK((g.positions[3] - Vec3(0.3, -0.1, 0.1)).norm() < 1e-15);
  CHECK((g.positions[4] - Vec3(-0.3, 0.1, 0.1)).norm() < 1e-15);
}

TEST_CASE("curved display lies on its cylinder") {
  const double r = 0.8;
  const DisplayGrid g = make_curved_display(9, 3, 1.0, 0.5, r, 0.0);
  const Vec3 axis(0, 0, r);
  for (const Vec3& p : g.positions) {
    const double dx = p.x() - axis.x();
    const double dz = p.z() - axis.z();
    CHECK(std::hypot(dx, dz) == doctest::Approx(r).epsilon(1e-12));
  }
  // Center column touches the z = depth plane, edges bend toward the scene.
  CHECK(g.positions[4].z() == doctest::Approx(0.0));
  CHECK(g.positions[0].z() > 0.0);
}

TEST_CASE("display grid validation") {
  CHECK_THROWS_AS(make_planar_display(1, 1, 1, 1), ArgumentError);
  DisplayGrid g = make_planar_display(2, 1, 1, 1);
  g.positions[1].x() = NAN;
  CHECK_THROWS_AS(g.validate(), ArgumentError);
}

TEST_CASE("geometry JSON round trip") {
  const DisplayGrid g = make_curved_display(5, 3, 1.0, 0.5, 0.9);
  const DisplayGrid h = grid_from_json(grid_to_json(g));
  CHECK(h.cols == 5);
  CHECK(h.rows == 3);
  CHECK(h.positions == g.positions);
  const CameraModel c = camera_from_json(camera_to_json(cam100()));
  CHECK(c.fx == 100.0);
  CHECK(c.width == 64);
}
