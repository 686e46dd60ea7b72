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
#include <filesystem>
#include <fstream>
#include <iterator>

#include "dps/dataset.hpp"
#include "dps/image_io.hpp"
#include "dps/rng.hpp"
#include "dps/scene.hpp"

using namespace dps;
namespace fs = std::filesystem;

namespace {

CameraModel camera(int size = 32, double f = 60.0) {
  CameraModel c;
  c.fx = c.fy = f;
  c.cx = c.cy = 0.5 * (size - 1);
  c.width = c.height = size;
  return c;
}

DisplayGrid two_lights(const Vec3& a, const Vec3& b) {
  DisplayGrid g;
  g.cols = 2;
  g.rows = 1;
  g.positions = {a, b};
  return g;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dps_test_scene_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("fronto-parallel plane lit along its normal") {
  CameraModel c;
  c.fx = c.fy = 100;
  c.cx = c.cy = 32;
  c.width = c.height = 64;
  Scene s;
  s.kind = SceneKind::kPlane;
  s.plane_z = 0.5;
  s.albedo = Vec3(0.3, 0.6, 0.9);
  // Superpixel 0 on the optical axis behind the camera plane; superpixel 1
  // in the scene plane, grazing.
  const SceneSample out = render_basis(s, c, two_lights(Vec3(0, 0, 0), Vec3(1, 0, 0.5)));
  for (int ch = 0; ch < 3; ++ch) {
    CHECK(out.basis[0](32, 32, ch) == doctest::Approx(s.albedo[ch]).epsilon(1e-15));
    CHECK(out.basis[1](32, 32, ch) == 0.0);
  }
  CHECK(out.gt_normals(32, 32, 2) == -1.0);
  CHECK(out.valid_pixels() == 64 * 64);
}

TEST_CASE("sphere basis matches a brute-force shading oracle") {
  const CameraModel c = camera(48, 90);
  const DisplayGrid g = make_planar_display(2, 2, 0.8, 0.5);
  Scene s;
  s.center = Vec3(0.01, -0.02, 0.55);
  s.radius = 0.1;
  s.albedo = Vec3(1, 1, 1);
  const SceneSample out = render_basis(s, c, g);
  Rng rng(1);
  int checked = 0;
  while (checked < 1000) {
    const int x = static_cast<int>(rng.below(48)), y = static_cast<int>(rng.below(48));
    // Independent ray-sphere intersection.
    const Vec3 d = Vec3((x - c.cx) / c.fx, (y - c.cy) / c.fy, 1.0).normalized();
    const Vec3 oc = -s.center;
    const double b = d.dot(oc);
    const double disc = b * b - (oc.squaredNorm() - s.radius * s.radius);
    if (disc < 0) {
      CHECK(out.mask(x, y) == 0);
      CHECK(out.basis[0](x, y) == 0.0);
      ++checked;
      continue;
    }
    const Vec3 p = (-b - std::sqrt(disc)) * d;
    const Vec3 n = (p - s.center).normalized();
    if (n.dot(d) >= 0) continue;
    CHECK(out.mask(x, y) == 1);
    for (int j = 0; j < 4; ++j) {
      const Vec3 l = (g.positions[static_cast<std::size_t>(j)] - p).normalized();
      CHECK(out.basis[j](x, y, 1) == doctest::Approx(std::max(0.0, n.dot(l))).epsilon(1e-12));
    }
    ++checked;
  }
}

TEST_CASE("falloff weights by (plane_depth / r)^2") {
  CameraModel c = camera(8, 10);
  Scene s;
  s.kind = SceneKind::kPlane;
  s.plane_z = 0.5;
  s.albedo = Vec3(1, 1, 1);
  RenderOptions o;
  o.falloff = true;
  o.plane_depth = 0.5;
  const SceneSample out = render_basis(s, c, two_lights(Vec3(0, 0, 0), Vec3(0, 0, -0.5)), o);
  // Pixel (3, 3) sits almost on the axis; compare the two on-axis lights.
  const Vec3 p = pixel_ray(c, Vec2(3, 3)) * (0.5 / pixel_ray(c, Vec2(3, 3)).z());
  const double w0 = std::pow(0.5 / p.norm(), 2) * p.normalized().z();
  const double w1 = std::pow(0.5 / (p - Vec3(0, 0, -0.5)).norm(), 2) *
                    ((Vec3(0, 0, -0.5) - p).normalized().dot(Vec3(0, 0, -1)));
  CHECK(out.basis[0](3, 3) == doctest::Approx(w0).epsilon(1e-12));
  CHECK(out.basis[1](3, 3) == doctest::Approx(w1).epsilon(1e-12));
}

TEST_CASE("rendering a pattern equals the basis sum") {
  const CameraModel c = camera(32, 60);
  const DisplayGrid g = make_planar_display(4, 3, 0.8, 0.5);
  Scene s;
  s.center = Vec3(0.0, 0.01, 0.58);
  s.radius = 0.09;
  s.albedo = Vec3(0.4, 0.7, 0.2);
  s.specular = 0.3;
  s.shininess = 20;
  for (bool falloff : {false, true}) {
    RenderOptions o;
    o.falloff = falloff;
    const SceneSample b = render_basis(s, c, g, o);
    const PatternSet m = init_heuristic(HeuristicKind::kTriRandom, 2, 4, 3, 8);
    for (int i = 0; i < 2; ++i) {
      const Image direct = render_pattern(s, c, g, m, i, o);
      Image sum(32, 32, 3);
      for (int j = 0; j < g.size(); ++j)
        for (int p = 0; p < sum.pixel_count(); ++p)
          for (int ch = 0; ch < 3; ++ch)
            sum.at(p, ch) += m(i, j, ch) * (b.basis[j].at(p, ch) + b.specular[j].at(p, ch));
      CHECK((direct.array() - sum.array()).abs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("gt normals face the camera and are unit length") {
  const CameraModel c = camera(32, 60);
  const DisplayGrid g = make_planar_display(4, 2, 0.8, 0.5);
  DatasetConfig cfg;
  cfg.resolution = 32;
  cfg.focal_px = 60;
  cfg.meshes = {};
  for (int i = 0; i < 6; ++i) {
    const SceneSample out = render_basis(sample_scene(cfg, i), c, g);
    CHECK(out.valid_pixels() > 0);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        const Vec3 n(out.gt_normals(x, y, 0), out.gt_normals(x, y, 1), out.gt_normals(x, y, 2));
        if (!out.mask(x, y)) {
          CHECK(n.norm() == 0.0);
          continue;
        }
        CHECK(std::abs(n.norm() - 1.0) < 1e-12);
        CHECK(n.dot(pixel_ray(c, Vec2(x, y))) < 0.0);
      }
  }
}

TEST_CASE("mesh scenes use interpolated normals") {
  const CameraModel c = camera(32, 60);
  Scene s;
  s.kind = SceneKind::kMesh;
  s.mesh = make_icosphere(0.08, 3, Vec3(0, 0, 0.5));
  const SceneSample out = render_basis(s, c, make_planar_display(2, 2, 0.8, 0.5));
  CHECK(out.valid_pixels() > 100);
  const double cx = out.gt_normals(16, 16, 2);
  CHECK(cx < -0.99);
}

TEST_CASE("average image") {
  BasisStack one{{Image(3, 2, 3, 0.25)}};
  CHECK(average_image(one).array().isApproxToConstant(0.25));
  BasisStack two{{Image(3, 2, 3, 0.0), Image(3, 2, 3, 1.0)}};
  CHECK(average_image(two).array().isApproxToConstant(0.5));
  Rng rng(4);
  BasisStack many;
  Image sum(4, 4, 3);
  for (int j = 0; j < 144; ++j) {
    Image im(4, 4, 3);
    for (Eigen::Index i = 0; i < im.array().size(); ++i) im.array()[i] = rng.uniform();
    sum.array() += im.array();
    many.images.push_back(im);
  }
  CHECK((average_image(many).array() - sum.array() / 144.0).abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(average_image(BasisStack{}), ArgumentError);
}

TEST_CASE("scene validation") {
  Scene s;
  s.albedo = Vec3(1.2, 0.5, 0.5);
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s = Scene{};
  s.radius = -1;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
}

TEST_CASE("additive noise is seeded and non-negative") {
  const CameraModel c = camera(16, 30);
  Scene s;
  s.center = Vec3(0, 0, 0.6);
  RenderOptions o;
  o.noise_sigma = 0.01;
  o.noise_seed = 5;
  const DisplayGrid g = make_planar_display(2, 1, 0.6, 0.3);
  const SceneSample a = render_basis(s, c, g, o), b = render_basis(s, c, g, o);
  CHECK(a.basis[1].array().isApprox(b.basis[1].array()));
  CHECK(a.basis[0].array().minCoeff() >= 0.0);
  o.noise_seed = 6;
  CHECK(!render_basis(s, c, g, o).basis[0].array().isApprox(a.basis[0].array()));
}

TEST_CASE("dataset persistence round trip") {
  DatasetConfig cfg;
  cfg.train = 2;
  cfg.test = 1;
  cfg.seed = 3;
  cfg.resolution = 16;
  cfg.focal_px = 30;
  const fs::path dir = scratch("roundtrip");
  const Dataset made = dataset_generate(cfg, dir.string());
  const Json manifest = read_json((dir / "manifest.json").string());
  CHECK(manifest.at("scenes").size() == 3);
  CHECK(manifest.at("grid_geometry") == "geometry.json");
  CHECK(manifest.at("scenes")[2].at("split") == "test");
  const Dataset back = load_dataset((dir / "manifest.json").string());
  REQUIRE(back.train.size() == 2);
  REQUIRE(back.test.size() == 1);
  for (std::size_t i = 0; i < 2; ++i) {
    for (int j = 0; j < 32; ++j)
      CHECK(back.train[i].basis[j].array().isApprox(made.train[i].basis[j].array(), 0.0));
    CHECK((back.train[i].gt_normals.array() == made.train[i].gt_normals.array()).all());
    CHECK((back.train[i].mask.array() == made.train[i].mask.array()).all());
  }
  CHECK(back.grid.positions == made.grid.positions);
  fs::remove_all(dir);
}

TEST_CASE("dataset generation is byte-deterministic") {
  DatasetConfig cfg;
  cfg.train = 1;
  cfg.test = 1;
  cfg.seed = 9;
  cfg.resolution = 16;
  cfg.focal_px = 30;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  dataset_generate(cfg, a.string());
  dataset_generate(cfg, b.string());
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    CHECK(slurp(entry.path()) == slurp(b / rel));
    ++files;
  }
  CHECK(files > 30);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("default resolution and grid give 32 basis files of 64x64x3") {
  DatasetConfig cfg;
  cfg.resolution = 64;
  cfg.focal_px = 120;
  cfg.train = 1;
  cfg.test = 0;
  const fs::path dir = scratch("shape");
  dataset_generate(cfg, dir.string());
  int basis = 0;
  for (const auto& entry : fs::directory_iterator(dir / "scene_000")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("basis_", 0) != 0) continue;
    ++basis;
    const Image im = read_pfm(entry.path().string());
    CHECK(im.width() == 64);
    CHECK(im.height() == 64);
    CHECK(im.channels() == 3);
  }
  CHECK(basis == 32);
  fs::remove_all(dir);
}

TEST_CASE("unwritable dataset path is an I/O error") {
  DatasetConfig cfg;
  cfg.train = 1;
  cfg.test = 0;
  cfg.resolution = 8;
  cfg.focal_px = 10;
  CHECK_THROWS_AS(dataset_generate(cfg, "/proc/dps_cannot_write_here"), IoError);
}
