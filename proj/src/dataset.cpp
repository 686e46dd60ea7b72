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

#include "dps/dataset.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dps/image_io.hpp"
#include "dps/rng.hpp"

namespace fs = std::filesystem;

namespace dps {

Json DatasetConfig::to_json() const {
  Json j = Json::object();
  j["train"] = train;
  j["test"] = test;
  j["seed"] = seed;
  j["resolution"] = resolution;
  j["focal_px"] = focal_px;
  j["cols"] = cols;
  j["rows"] = rows;
  j["display"] = display;
  j["display_width"] = display_width;
  j["display_height"] = display_height;
  j["display_radius"] = display_radius;
  j["display_depth"] = display_depth;
  j["geometry_file"] = geometry_file;
  j["plane_depth"] = plane_depth;
  j["falloff"] = falloff;
  j["depth_jitter"] = depth_jitter;
  j["noise_sigma"] = noise_sigma;
  j["on_plane"] = on_plane;
  j["sphere_fraction"] = sphere_fraction;
  j["meshes"] = meshes;
  return j;
}

DatasetConfig DatasetConfig::from_json(const Json& j) {
  DatasetConfig c;
  auto get = [&](const char* key, auto& value) {
    if (j.contains(key)) value = j.at(key).get<std::decay_t<decltype(value)>>();
  };
  try {
    get("train", c.train);
    get("test", c.test);
    get("seed", c.seed);
    get("resolution", c.resolution);
    get("focal_px", c.focal_px);
    get("cols", c.cols);
    get("rows", c.rows);
    get("display", c.display);
    get("display_width", c.display_width);
    get("display_height", c.display_height);
    get("display_radius", c.display_radius);
    get("display_depth", c.display_depth);
    get("geometry_file", c.geometry_file);
    get("plane_depth", c.plane_depth);
    get("falloff", c.falloff);
    get("depth_jitter", c.depth_jitter);
    get("noise_sigma", c.noise_sigma);
    get("on_plane", c.on_plane);
    get("sphere_fraction", c.sphere_fraction);
    get("meshes", c.meshes);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("dataset config: ") + e.what());
  }
  c.validate();
  return c;
}

void DatasetConfig::validate() const {
  if (train < 0 || test < 0 || train + test < 1) throw ArgumentError("dataset needs scenes");
  if (resolution < 4) throw ArgumentError("resolution too small");
  if (!(focal_px > 0.0)) throw ArgumentError("focal length must be positive");
  if (!(plane_depth > 0.0)) throw ArgumentError("plane depth must be positive");
  if (depth_jitter < 0.0 || depth_jitter >= 1.0) throw ArgumentError("depth jitter must be in [0, 1)");
  if (noise_sigma < 0.0) throw ArgumentError("noise sigma must be non-negative");
  if (display != "planar" && display != "curved") throw ArgumentError("unknown display: " + display);
}

CameraModel DatasetConfig::camera() const {
  CameraModel cam;
  cam.fx = cam.fy = focal_px;
  cam.cx = cam.cy = 0.5 * (resolution - 1);
  cam.width = cam.height = resolution;
  return cam;
}

DisplayGrid DatasetConfig::display_grid() const {
  if (!geometry_file.empty()) return grid_from_json(read_json(geometry_file));
  if (display == "curved") {
    return make_curved_display(cols, rows, display_width, display_height, display_radius,
                               display_depth);
  }
  return make_planar_display(cols, rows, display_width, display_height, display_depth);
}

Scene sample_scene(const DatasetConfig& config, int index) {
  Rng rng(config.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(index) + 1);
  constexpr double kPi = 3.14159265358979323846;
  Scene scene;
  scene.albedo = Vec3(rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9));

  auto bump = [&](Scene& s) {
    s.bump_amplitude = rng.uniform(0.15, 0.35);
    s.bump_frequency = rng.uniform(15.0, 40.0);
    s.bump_phase = rng.uniform(0.0, 2.0 * kPi);
  };

  if (config.on_plane) {
    scene.kind = SceneKind::kPlane;
    scene.plane_normal = Vec3(0.0, 0.0, -1.0);
    scene.plane_z = config.plane_depth;
    bump(scene);
    return scene;
  }

  const double depth = config.plane_depth * (1.0 + rng.uniform(-config.depth_jitter, config.depth_jitter));
  const double u = rng.uniform();
  const bool have_meshes = !config.meshes.empty();
  if (u < config.sphere_fraction) {
    scene.kind = SceneKind::kSphere;
    scene.radius = rng.uniform(0.05, 0.09) * depth / config.plane_depth;
    scene.center = Vec3(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), depth + scene.radius);
  } else if (!have_meshes || u < config.sphere_fraction + 0.5 * (1.0 - config.sphere_fraction)) {
    scene.kind = SceneKind::kPlane;
    const double tilt = rng.uniform(0.0, 30.0) * kPi / 180.0;
    const double azimuth = rng.uniform(0.0, 2.0 * kPi);
    scene.plane_normal = Vec3(std::sin(tilt) * std::cos(azimuth), std::sin(tilt) * std::sin(azimuth),
                              -std::cos(tilt));
    scene.plane_z = depth;
    bump(scene);
  } else {
    scene.kind = SceneKind::kMesh;
    const auto& path = config.meshes[static_cast<std::size_t>(rng.below(config.meshes.size()))];
    const TriangleMesh mesh = load_obj(path);
    const Vec3 axis = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    const Mat3 rot = Eigen::AngleAxisd(rng.uniform(0.0, 2.0 * kPi), axis).toRotationMatrix();
    scene.mesh = transformed(mesh, rot, Vec3(0.0, 0.0, depth) - rot * mesh.centroid());
  }
  return scene;
}

Dataset generate_dataset(const DatasetConfig& config) {
  config.validate();
  Dataset out;
  out.grid = config.display_grid();
  const CameraModel camera = config.camera();
  RenderOptions options;
  options.falloff = config.falloff;
  options.plane_depth = config.plane_depth;
  options.noise_sigma = config.noise_sigma;

  for (int i = 0; i < config.train + config.test; ++i) {
    options.noise_seed = config.seed * 7919 + static_cast<std::uint64_t>(i);
    SceneSample sample = render_basis(sample_scene(config, i), camera, out.grid, options);
    quantize_to_float(sample);
    (i < config.train ? out.train : out.test).push_back(std::move(sample));
  }
  return out;
}

namespace {

std::string numbered(const char* prefix, int n) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, n);
  return buf;
}

void write_scene(const SceneSample& s, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create scene directory: " + dir.string());
  for (int j = 0; j < s.basis.size(); ++j) {
    write_pfm((dir / (numbered("basis_", j) + ".pfm")).string(), s.basis[j]);
  }
  for (int j = 0; j < s.specular.size(); ++j) {
    write_pfm((dir / (numbered("specular_", j) + ".pfm")).string(), s.specular[j]);
  }
  write_pfm((dir / "normals.pfm").string(), s.gt_normals);
  write_pfm((dir / "albedo.pfm").string(), s.gt_albedo);
  write_mask_pfm((dir / "mask.pfm").string(), s.mask);
  write_json((dir / "camera.json").string(), camera_to_json(s.camera));
}

SceneSample read_scene(const fs::path& dir, const DisplayGrid& grid) {
  if (!fs::is_directory(dir)) throw IoError("missing scene directory: " + dir.string());
  SceneSample s;
  s.grid = grid;
  s.camera = camera_from_json(read_json((dir / "camera.json").string()));
  for (int j = 0; j < grid.size(); ++j) {
    s.basis.images.push_back(read_pfm((dir / (numbered("basis_", j) + ".pfm")).string()));
  }
  if (fs::exists(dir / (numbered("specular_", 0) + ".pfm"))) {
    for (int j = 0; j < grid.size(); ++j) {
      s.specular.images.push_back(read_pfm((dir / (numbered("specular_", j) + ".pfm")).string()));
    }
  }
  s.gt_normals = read_pfm((dir / "normals.pfm").string());
  s.mask = read_mask_pfm((dir / "mask.pfm").string());
  if (fs::exists(dir / "albedo.pfm")) {
    s.gt_albedo = read_pfm((dir / "albedo.pfm").string());
  } else {
    s.gt_albedo = Image(s.camera.width, s.camera.height, 3);
  }
  if (s.gt_normals.width() != s.camera.width || s.gt_normals.height() != s.camera.height ||
      s.gt_normals.channels() != 3) {
    throw IoError("normals.pfm does not match camera.json in " + dir.string());
  }
  return s;
}

}  // namespace

void write_dataset(const Dataset& dataset, const DatasetConfig& config, const std::string& out_dir) {
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root)) throw IoError("cannot create dataset directory: " + out_dir);

  write_json((root / "geometry.json").string(), grid_to_json(dataset.grid));
  Json scenes = Json::array();
  int index = 0;
  auto emit = [&](const std::vector<SceneSample>& split, const char* name) {
    for (const auto& s : split) {
      const std::string dir = numbered("scene_", index++);
      write_scene(s, root / dir);
      scenes.push_back({{"dir", dir}, {"split", name}});
    }
  };
  emit(dataset.train, "train");
  emit(dataset.test, "test");

  Json manifest = Json::object();
  manifest["grid_geometry"] = "geometry.json";
  manifest["scenes"] = scenes;
  manifest["config"] = config.to_json();
  write_json((root / "manifest.json").string(), manifest);
}

Dataset dataset_generate(const DatasetConfig& config, const std::string& out_dir) {
  Dataset dataset = generate_dataset(config);
  write_dataset(dataset, config, out_dir);
  return dataset;
}

Dataset load_dataset(const std::string& manifest_path) {
  const Json manifest = read_json(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  Dataset out;
  try {
    out.grid = grid_from_json(read_json((root / manifest.at("grid_geometry").get<std::string>()).string()));
    for (const auto& entry : manifest.at("scenes")) {
      const std::string split = entry.at("split").get<std::string>();
      SceneSample s = read_scene(root / entry.at("dir").get<std::string>(), out.grid);
      if (split == "train") {
        out.train.push_back(std::move(s));
      } else if (split == "test") {
        out.test.push_back(std::move(s));
      } else {
        throw IoError("unknown split \"" + split + "\" in " + manifest_path);
      }
    }
  } catch (const Json::exception& e) {
    throw IoError(manifest_path + ": " + e.what());
  }
  return out;
}

}  // namespace dps
