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
#include <cstdint>
#include <vector>

#include "dps/geometry.hpp"
#include "dps/image.hpp"
#include "dps/patterns.hpp"
#include "dps/scene.hpp"

namespace dps {

/// K RGB captures of one scene and the pixels worth reconstructing.
struct CaptureSet {
  std::vector<Image> images;
  Mask mask;

  int k() const { return static_cast<int>(images.size()); }
  void validate() const;
};

struct AlbedoMap {
  Image rho;                     // 3 channels, >= 0
  ImageT<std::int32_t> argmax;   // capture index that produced rho, per channel
};

struct NormalMap {
  Image normals;  // 3 channels, unit on valid pixels, zero elsewhere
  Mask valid;
};

// ---------------------------------------------------------------------------
// Block form. A block is n pixels gathered into matrices so that the per
// channel work is a handful of dense products:
//   captures[c] : K x n,  basis[c] : P x n,  light : P x 3n
// where column 3q + k of `light` is component k of the light directions of
// block pixel q.

using ChannelBlock = std::array<Eigen::MatrixXd, 3>;

/// I^c = M^c B^c for every channel.
ChannelBlock simulate_block(const PatternSet& intensities, const ChannelBlock& basis);

struct BlockAlbedo {
  Eigen::Matrix3Xd rho;
  Eigen::Matrix3Xi argmax;  // ties resolve to the lowest capture index
};

BlockAlbedo albedo_max_block(const ChannelBlock& captures);

enum class PixelStatus : std::uint8_t {
  kValid = 0,
  kDark,           // brightest capture below the intensity threshold
  kRankDeficient,  // sigma_min < 1e-10 sigma_max of the 3K x 3 system
  kZeroSolution,   // least-squares solution norm below 1e-12
};

struct BlockSolution {
  Eigen::Matrix3Xd normals;  // unit on valid pixels, zero elsewhere
  Eigen::Matrix3Xd raw;      // unnormalized least-squares solution
  Eigen::VectorXd raw_norm;
  std::vector<PixelStatus> status;
  // Kept for differentiation.
  ChannelBlock ml;                 // M^c l, K x 3n
  std::vector<Mat3> gram_inverse;  // (A^T A)^-1 per pixel (valid pixels only)

  bool valid(int q) const { return status[static_cast<std::size_t>(q)] == PixelStatus::kValid; }
  int valid_count() const;
};

inline constexpr double kDarkThreshold = 1e-4;
inline constexpr double kRankThreshold = 1e-10;
inline constexpr double kNormGuard = 1e-12;

/// Per-pixel least squares of I = rho (.) M l N with rows stacked R, G, B
/// (K rows each), followed by normalization.
BlockSolution solve_normals_block(const ChannelBlock& captures, const PatternSet& intensities,
                                  const Eigen::MatrixXd& light, const Eigen::Matrix3Xd& rho);

/// Per-channel scalar least squares rho^c = <I^c, d> / <d, d>, d = M^c l N.
/// Pixels with <d, d> < 1e-12 or an invalid normal keep `prior`.
Eigen::Matrix3Xd refine_albedo_block(const ChannelBlock& captures, const PatternSet& intensities,
                                     const Eigen::MatrixXd& light, const BlockSolution& normals,
                                     const Eigen::Matrix3Xd& prior);

// ---------------------------------------------------------------------------
// Image form.

/// I_i = sum_j B_j M_ij per channel. The capture mask is all ones.
CaptureSet simulate_captures(const PatternSet& intensities, const BasisStack& basis);

AlbedoMap estimate_albedo_max(const CaptureSet& captures);

NormalMap reconstruct_normals(const CaptureSet& captures, const PatternSet& intensities,
                              const IlluminationField& field, const AlbedoMap& albedo);

AlbedoMap refine_albedo(const CaptureSet& captures, const PatternSet& intensities,
                        const IlluminationField& field, const NormalMap& normals,
                        const AlbedoMap& prior);

/// Mean of (1 - n . gt) / 2 over mask pixels where `normals` is valid.
double cosine_loss(const NormalMap& normals, const Image& gt, const Mask& mask);

/// Per-pixel (1 - n . gt) / 2, zero where not evaluated.
Image cosine_loss_map(const NormalMap& normals, const Image& gt, const Mask& mask);

}  // namespace dps
