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

#include <optional>
#include <string>
#include <vector>

#include "dps/dataset.hpp"
#include "dps/json_io.hpp"
#include "dps/learner.hpp"
#include "dps/patterns.hpp"
#include "dps/photostereo.hpp"

namespace dps {

inline constexpr const char* kToolVersion = "dispstereo 0.1.0";

struct SceneEval {
  int index = 0;
  std::optional<double> loss;  // empty when no pixel could be reconstructed
  int valid = 0;
  int masked = 0;
};

struct EvalResult {
  double mean = 0.0;  // over scenes with a loss
  std::vector<SceneEval> scenes;

  Json to_json() const;
};

/// Image-form reconstruction of every scene and its mean cosine loss.
EvalResult evaluate(const PatternSet& intensities, const std::vector<SceneSample>& scenes,
                    double plane_depth = 0.5);

struct SweepRow {
  std::string name;
  int k = 0;
  double initial_test_loss = 0.0;
  double learned_test_loss = 0.0;  // best epoch
  double final_test_loss = 0.0;
  int best_epoch = 0;
  PatternSet initial;
  PatternSet learned;
  PatternSet final_patterns;
  EvalResult learned_scenes;
  std::string error;  // set when the cell could not be trained; losses are NaN

  bool failed() const { return !error.empty(); }
};

struct EvalReport {
  std::vector<SweepRow> rows;  // sorted by (name, K)
  TrainConfig config;

  Json to_json() const;
  std::string table() const;
};

/// Trains every (kind, K) cell with `base` and records its losses. A cell
/// whose lighting cannot be reconstructed at all is kept with its error.
/// `jobs` greater than 1 runs cells concurrently; results do not depend on it.
EvalReport sweep(const std::vector<HeuristicKind>& kinds, const std::vector<int>& ks,
                 const TrainConfig& base, const Dataset& dataset, int jobs = 1);

// ((nx + 1) / 2, (ny + 1) / 2, (-nz + 1) / 2), zero where invalid.
Image normals_visual(const NormalMap& normals);
// Per-pixel loss times 2 as gray.
Image loss_visual(const Image& loss_map);
// Pattern i as a cols x rows image enlarged `scale` times, sRGB encoded.
Image pattern_visual(const PatternSet& intensities, int i, int scale = 16);

struct VisualInputs {
  const NormalMap* normals = nullptr;
  const Image* albedo = nullptr;
  const Image* loss_map = nullptr;
  const PatternSet* patterns = nullptr;  // intensity
};

/// Writes normals.png, albedo.png, error.png and pattern_I.png for the
/// inputs present. Returns the written paths.
std::vector<std::string> export_visuals(const VisualInputs& inputs, const std::string& out_dir);

}  // namespace dps
