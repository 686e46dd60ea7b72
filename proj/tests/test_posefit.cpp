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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dps/posefit.hpp"
#include "dps/rng.hpp"

using namespace dps;

namespace {

CameraModel camera(int size = 64, double f = 100) {
  CameraModel c;
  c.fx = c.fy = f;
  c.cx = c.cy = (size - 1) / 2.0;
  c.width = c.height = size;
  return c;
}

// Square in the model xy plane with normal -z.
TriangleMesh quad(double half) {
  TriangleMesh m;
  m.vertices = {Vec3(-half, -half, 0), Vec3(-half, half, 0), Vec3(half, half, 0),
                Vec3(half, -half, 0)};
  m.faces = {Eigen::Vector3i(0, 1, 2), Eigen::Vector3i(0, 2, 3)};
  m.compute_normals();
  return m;
}

int area(const Mask& m) { return m.array().cast<int>().sum(); }

}  // namespace

TEST_CASE("pose parameters") {
  PoseParams p;
  p.t = Vec3(0.1, -0.2, 0.5);
  p.r = Vec3(0, std::numbers::pi / 2, 0);
  const Vec3 x = p.rotation() * Vec3(0, 0, -1);
  CHECK((x - Vec3(-1, 0, 0)).norm() < 1e-15);
  p.validate();
  const PoseParams back = pose_from_json(pose_to_json(p, 0.25));
  CHECK(back.t == p.t);
  CHECK(back.r == p.r);
  CHECK(pose_to_json(p, 0.25)["mse"] == 0.25);
  p.r = Vec3(0, 0, std::numbers::pi);
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p.r = Vec3::Zero();
  p.t[1] = std::nan("");
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}

TEST_CASE("silhouette basics") {
  const CameraModel cam = camera();
  PoseParams at;
  at.t = Vec3(0, 0, 0.5);
  const Mask m = rasterize_silhouette(quad(0.5), at, cam);
  CHECK(m(31, 31) == 1);
  CHECK(area(m) == 64 * 64);
  PoseParams away = at;
  away.t = Vec3(5, 0, 0.5);
  CHECK(area(rasterize_silhouette(quad(0.05), away, cam)) == 0);
  PoseParams behind = at;
  behind.t = Vec3(0, 0, -0.5);
  CHECK(area(rasterize_silhouette(quad(0.05), behind, cam)) == 0);
}

TEST_CASE("sphere silhouette matches the projected disk") {
  const CameraModel cam = camera();
  const double radius = 0.1, z = 0.5;
  PoseParams p;
  p.t = Vec3(0, 0, z);
  const Mask m = rasterize_silhouette(make_icosphere(radius, 4), p, cam);
  const double disk = std::numbers::pi * std::pow(cam.fx * radius / z, 2);
  CHECK(std::abs(area(m) - disk) / disk < 0.05);
}

TEST_CASE("silhouette ignores triangle order") {
  const CameraModel cam = camera();
  TriangleMesh mesh = make_box(Vec3(0.12, 0.08, 0.05));
  PoseParams p;
  p.t = Vec3(0.01, -0.02, 0.45);
  p.r = Vec3(0.3, 0.5, -0.2);
  const Mask a = rasterize_silhouette(mesh, p, cam);
  std::reverse(mesh.faces.begin(), mesh.faces.end());
  Rng rng(1);
  shuffle(mesh.faces, rng);
  CHECK((rasterize_silhouette(mesh, p, cam).array() == a.array()).all());
}

TEST_CASE("silhouette mse") {
  Mask a(4, 5, 1, 0), b(4, 5, 1, 0);
  CHECK(silhouette_mse(a, b) == 0.0);
  a(0, 0) = 1;
  a(3, 4) = 1;
  CHECK(silhouette_mse(a, b) == doctest::Approx(0.1));
  CHECK_THROWS_AS(silhouette_mse(a, Mask(5, 4, 1, 0)), ArgumentError);
}

TEST_CASE("fit_pose from the true pose is a fixed point") {
  const CameraModel cam = camera();
  const TriangleMesh mesh = make_box(Vec3(0.12, 0.08, 0.05));
  PoseParams truth;
  truth.t = Vec3(0.0, 0.01, 0.5);
  truth.r = Vec3(0.2, -0.4, 0.1);
  const Mask target = rasterize_silhouette(mesh, truth, cam);
  const PoseFitResult r = fit_pose(mesh, target, truth, cam);
  CHECK(r.initial_mse == 0.0);
  CHECK(r.mse == 0.0);
}

TEST_CASE("fit_pose recovers a perturbed start") {
  const CameraModel cam = camera();
  const TriangleMesh mesh = make_box(Vec3(0.12, 0.08, 0.05));
  Rng rng(21);
  for (int trial = 0; trial < 3; ++trial) {
    PoseParams truth;
    truth.t = Vec3(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), rng.uniform(0.45, 0.55));
    truth.r = Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const Mask target = rasterize_silhouette(mesh, truth, cam);
    PoseParams init = truth;
    Vec3 dir(rng.normal(), rng.normal(), rng.normal());
    init.t += 0.01 * dir.normalized();
    const PoseFitResult r = fit_pose(mesh, target, init, cam);
    CHECK(r.initial_mse == doctest::Approx(silhouette_mse(rasterize_silhouette(mesh, init, cam), target)));
    CHECK(r.mse <= r.initial_mse);
    CHECK(r.mse <= 0.003);
    CHECK(r.mse == doctest::Approx(silhouette_mse(rasterize_silhouette(mesh, r.pose, cam), target)));
    const PoseFitResult again = fit_pose(mesh, target, init, cam);
    CHECK(again.pose.t == r.pose.t);
    CHECK(again.pose.r == r.pose.r);
  }
}

TEST_CASE("fit_pose never makes the start worse") {
  const CameraModel cam = camera();
  const TriangleMesh mesh = make_icosphere(0.08, 2);
  PoseParams truth;
  truth.t = Vec3(0.05, 0, 0.5);
  const Mask target = rasterize_silhouette(mesh, truth, cam);
  PoseParams init;
  init.t = Vec3(-0.05, 0.03, 0.6);
  PoseFitOptions opts;
  opts.max_evaluations = 20;
  opts.align_bounding_box = false;
  const PoseFitResult r = fit_pose(mesh, target, init, cam, opts);
  CHECK(r.mse <= r.initial_mse);
  CHECK(r.evaluations <= 20 + 1);
}

TEST_CASE("fit_pose errors") {
  const CameraModel cam = camera();
  const TriangleMesh mesh = make_box(Vec3(0.1, 0.1, 0.1));
  PoseParams init;
  init.t = Vec3(0, 0, 0.5);
  CHECK_THROWS_AS(fit_pose(mesh, Mask(64, 64, 1, 0), init, cam), ArgumentError);
  CHECK_THROWS_AS(fit_pose(mesh, Mask(32, 64, 1, 1), init, cam), ArgumentError);
  CHECK_THROWS_AS(fit_pose(TriangleMesh{}, Mask(64, 64, 1, 1), init, cam), ArgumentError);
}

TEST_CASE("normals of a facing quad") {
  const CameraModel cam = camera();
  PoseParams p;
  p.t = Vec3(0, 0, 0.5);
  const Image n = render_gt_normals(quad(0.05), p, cam);
  const Mask m = rasterize_silhouette(quad(0.05), p, cam);
  REQUIRE(area(m) > 0);
  for (int q = 0; q < n.pixel_count(); ++q) {
    if (m.at(q) == 0) {
      CHECK(n.at(q, 0) == 0.0);
      continue;
    }
    CHECK(std::abs(n.at(q, 0)) < 1e-12);
    CHECK(std::abs(n.at(q, 1)) < 1e-12);
    CHECK(n.at(q, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("normals of a quad turned about y") {
  const CameraModel cam = camera();
  PoseParams p;
  p.t = Vec3(0.1, 0, 0.5);
  p.r = Vec3(0, std::numbers::pi / 2, 0);
  const Image n = render_gt_normals(quad(0.05), p, cam);
  const Mask m = rasterize_silhouette(quad(0.05), p, cam);
  REQUIRE(area(m) > 0);
  for (int q = 0; q < n.pixel_count(); ++q) {
    if (m.at(q) == 0) continue;
    CHECK(n.at(q, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(n.at(q, 2)) < 1e-12);
  }
}

TEST_CASE("sphere normals") {
  const CameraModel cam = camera(65);
  PoseParams p;
  p.t = Vec3(0, 0, 0.5);
  const TriangleMesh sphere = make_icosphere(0.1, 4);
  const Image n = render_gt_normals(sphere, p, cam);
  const Mask m = rasterize_silhouette(sphere, p, cam);
  const int center = 32 * 65 + 32;
  REQUIRE(m.at(center) == 1);
  const Vec3 v(n.at(center, 0), n.at(center, 1), n.at(center, 2));
  CHECK(angle_between_deg(v, Vec3(0, 0, -1)) < 1.0);
  for (int q = 0; q < n.pixel_count(); ++q) {
    const double len = Vec3(n.at(q, 0), n.at(q, 1), n.at(q, 2)).norm();
    if (m.at(q) == 1) {
      CHECK(std::abs(len - 1.0) < 1e-6);
    } else {
      CHECK(len == 0.0);
    }
  }
}
