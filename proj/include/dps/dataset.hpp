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
#include <string>
#include <vector>

#include "dps/json_io.hpp"
#include "dps/scene.hpp"

namespace dps {

/// Synthetic dataset recipe. Defaults give the desk-scale set: 12 train and
/// 4 test scenes at 64x64 with an 8x4 superpixel display.
struct DatasetConfig {
  int train = 12;
  int test = 4;
  std::uint64_t seed = 0;

  int resolution = 64;
  double focal_px = 120.0;

  int cols = 8;
  int rows = 4;
  std::string display = "planar";  // "planar" or "curved"
  double display_width = 1.2;
  double display_height = 0.68;
  double display_radius = 1.0;  // curved only
  double display_depth = 0.0;
  std::string geometry_file;  // overrides the generated display when set

  double plane_depth = 0.5;
  bool falloff = false;
  double depth_jitter = 0.0;  // relative, e.g. 0.2 for +-20%
  double noise_sigma = 0.0;

  // Every scene is a bump-mapped fronto-parallel plane at plane_depth.
  bool on_plane = false;
  double sphere_fraction = 0.5;
  std::vector<std::string> meshes;  // OBJ files, meters

  Json to_json() const;
  static DatasetConfig from_json(const Json& j);
  void validate() const;

  CameraModel camera() const;
  DisplayGrid display_grid() const;
};

struct Dataset {
  DisplayGrid grid;
  std::vector<SceneSample> train;
  std::vector<SceneSample> test;
};

/// Scene i of the recipe; depends only on (config.seed, index).
Scene sample_scene(const DatasetConfig& config, int index);

/// In-memory generation. Samples are rounded to float32 so they compare
/// equal to what write_dataset/load_dataset round-trips.
Dataset generate_dataset(const DatasetConfig& config);

/// Layout:
///   out_dir/manifest.json   {"grid_geometry", "scenes": [{"dir", "split"}], "config"}
///   out_dir/geometry.json
///   out_dir/scene_NNN/{basis_JJJ.pfm, normals.pfm, mask.pfm, albedo.pfm, camera.json}
void write_dataset(const Dataset& dataset, const DatasetConfig& config, const std::string& out_dir);

Dataset dataset_generate(const DatasetConfig& config, const std::string& out_dir);

Dataset load_dataset(const std::string& manifest_path);

}  // namespace dps
