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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dps/dataset.hpp"
#include "dps/json_io.hpp"
#include "dps/patterns.hpp"
#include "dps/photostereo.hpp"

namespace dps {

/// One scene gathered into block form over its mask pixels, with the
/// illumination evaluated under the planar-scene assumption.
struct PreparedScene {
  ChannelBlock basis;     // P x n per channel
  Eigen::MatrixXd light;  // P x 3n
  Eigen::Matrix3Xd gt;    // 3 x n
  std::vector<int> pixels;
  int width = 0;
  int height = 0;
  int grid_cols = 0;
  int grid_rows = 0;

  int size() const { return static_cast<int>(pixels.size()); }
};

PreparedScene prepare_scene(const SceneSample& sample, const IlluminationField& field);

// Scenes sharing a camera and grid share one field.
std::vector<PreparedScene> prepare_scenes(const std::vector<SceneSample>& samples,
                                          double plane_depth);

struct SceneForward {
  ChannelBlock captures;
  BlockAlbedo albedo;
  BlockSolution solution;
  double loss = 0.0;  // mean over valid pixels; 0 when there are none
  int valid = 0;
};

SceneForward forward_scene(const PatternSet& intensities, const PreparedScene& scene);

/// Mean over scenes of the per-scene mean cosine loss. Scenes with no valid
/// pixel are skipped; NumericalError when none is left.
double dataset_loss(const PatternSet& intensities, const std::vector<PreparedScene>& scenes);

struct LossGrad {
  double loss = 0.0;
  PatternSet gradient;  // d loss / d logits
};

/// Loss and its exact gradient with respect to the logits, back-propagated
/// through sigmoid, capture simulation, max-albedo (routed to the argmax
/// capture), the per-pixel least-squares solve and normalization.
LossGrad loss_and_grad(const PatternSet& logits, const std::vector<const PreparedScene*>& batch);

/// Central differences of `loss` one coordinate at a time.
Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& loss,
                                 const Eigen::VectorXd& x, double h);

// Convenience overload on the dataset loss of a logit pattern set.
PatternSet finite_diff_grad(const PatternSet& logits,
                            const std::vector<const PreparedScene*>& batch, double h);

/// Smallest gap between the largest and second-largest capture of any
/// (pixel, channel); the max-albedo subgradient is only stable when this
/// exceeds the perturbation applied to the captures.
double argmax_margin(const PatternSet& intensities, const std::vector<const PreparedScene*>& batch);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

struct TrainConfig {
  HeuristicKind init = HeuristicKind::kFlatGray;
  int k = 4;
  std::uint64_t init_seed = 0;
  double learning_rate = 0.3;
  double decay_factor = 0.3;
  int decay_step_epochs = 5;
  int epochs = 30;
  int batch_size = 2;
  double plane_depth = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  Json to_json() const;
  static TrainConfig from_json(const Json& j);
  double learning_rate_at(int epoch) const;  // 1-based epoch
};

struct EpochRecord {
  int epoch = 0;  // 0 = before training
  double train_loss = 0.0;
  double test_loss = 0.0;
  double learning_rate = 0.0;
};

struct TrainReport {
  TrainConfig config;
  std::vector<EpochRecord> epochs;
  PatternSet initial;       // intensity
  PatternSet final_logits;
  PatternSet final_patterns;  // intensity
  int best_epoch = 0;         // lowest test loss, including epoch 0
  PatternSet best_patterns;   // intensity
  std::vector<PatternSet> snapshots;  // intensities after each epoch, index = epoch
  double wall_clock_seconds = 0.0;

  double initial_test_loss() const { return epochs.front().test_loss; }
  double best_test_loss() const { return epochs[static_cast<std::size_t>(best_epoch)].test_loss; }
  double final_test_loss() const { return epochs.back().test_loss; }

  // Deterministic content only (no wall clock).
  Json to_json() const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainReport train(const TrainConfig& config, const std::vector<PreparedScene>& train_scenes,
                  const std::vector<PreparedScene>& test_scenes, const EpochCallback& on_epoch = {});

TrainReport train(const TrainConfig& config, const Dataset& dataset,
                  const EpochCallback& on_epoch = {});

}  // namespace dps
