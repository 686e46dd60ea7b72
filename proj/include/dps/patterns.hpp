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

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dps/geometry.hpp"
#include "dps/image.hpp"

namespace dps {

enum class PatternSpace { kLogit, kIntensity };

/// K display patterns over a cols x rows superpixel grid, RGB per superpixel.
///
/// Values are kept per channel as K x P matrices so that a channel's
/// patterns multiply a P x n basis or illumination block directly.
class PatternSet {
 public:
  PatternSet() = default;
  PatternSet(int k, int cols, int rows, PatternSpace space, double fill = 0.0);

  int k() const { return k_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int superpixels() const { return cols_ * rows_; }
  PatternSpace space() const { return space_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  double& operator()(int i, int j, int c) { return channels_[static_cast<std::size_t>(c)](i, j); }
  double operator()(int i, int j, int c) const {
    return channels_[static_cast<std::size_t>(c)](i, j);
  }

  Eigen::MatrixXd& channel(int c) { return channels_[static_cast<std::size_t>(c)]; }
  const Eigen::MatrixXd& channel(int c) const { return channels_[static_cast<std::size_t>(c)]; }

  // Flattened view in (pattern, superpixel, channel) row-major order.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& values);

  // Throws ArgumentError when the invariants do not hold.
  void validate() const;

 private:
  int k_ = 0;
  int cols_ = 0;
  int rows_ = 0;
  PatternSpace space_ = PatternSpace::kIntensity;
  std::uint64_t seed_ = 0;
  std::array<Eigen::MatrixXd, 3> channels_;
};

inline double sigmoid(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

PatternSet to_intensity(const PatternSet& patterns);

// Inverse sigmoid. Intensities are clamped to [clamp_lo, 1 - clamp_lo] first
// so that the logits stay finite.
PatternSet to_logit(const PatternSet& patterns, double clamp_lo = 0.01);

enum class HeuristicKind {
  kOlat,
  kGroupOlat,
  kMonoGradient,
  kMonoComplementary,
  kTriComplementary,
  kTriGradient,
  kMonoRandom,
  kTriRandom,
  kFlatGray,
};

// Catalog order; names are the CLI spellings ("olat", "group-olat", ...).
const std::vector<HeuristicKind>& heuristic_catalog();
std::string_view heuristic_name(HeuristicKind kind);
HeuristicKind parse_heuristic(std::string_view name);

// Default pattern count of each family: 2 for the tri-* kinds, 4 otherwise.
int default_pattern_count(HeuristicKind kind);

PatternSet init_heuristic(HeuristicKind kind, int k, int cols, int rows, std::uint64_t seed = 0);

/// Block-average K RGB images onto the grid; cell (c, r) covers pixels
/// [c*W/cols, (c+1)*W/cols) x [r*H/rows, (r+1)*H/rows).
PatternSet from_image_stack(const std::vector<Image>& images, int cols, int rows);

/// One cols x rows RGB image per pattern (intensity space).
Image pattern_image(const PatternSet& patterns, int index);

}  // namespace dps
