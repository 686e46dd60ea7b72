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

#include "dps/photostereo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace dps {

void CaptureSet::validate() const {
  if (images.empty()) throw ArgumentError("capture set is empty");
  for (const auto& img : images) {
    if (img.channels() != 3) throw ArgumentError("captures must be RGB");
    if (!img.same_shape(images.front())) throw ArgumentError("capture shape mismatch");
  }
  if (mask.width() != images.front().width() || mask.height() != images.front().height()) {
    throw ArgumentError("capture mask shape mismatch");
  }
}

int BlockSolution::valid_count() const {
  return static_cast<int>(std::count(status.begin(), status.end(), PixelStatus::kValid));
}

ChannelBlock simulate_block(const PatternSet& intensities, const ChannelBlock& basis) {
  ChannelBlock out;
  for (int c = 0; c < 3; ++c) {
    if (basis[c].rows() != intensities.superpixels()) {
      throw ArgumentError("pattern has " + std::to_string(intensities.superpixels()) +
                          " superpixels, basis has " + std::to_string(basis[c].rows()));
    }
    out[c].noalias() = intensities.channel(c) * basis[c];
  }
  return out;
}

BlockAlbedo albedo_max_block(const ChannelBlock& captures) {
  const Eigen::Index n = captures[0].cols();
  BlockAlbedo out{Eigen::Matrix3Xd::Zero(3, n), Eigen::Matrix3Xi::Zero(3, n)};
  for (int c = 0; c < 3; ++c)
    for (Eigen::Index q = 0; q < n; ++q) {
      Eigen::Index best = 0;
      out.rho(c, q) = captures[c].col(q).maxCoeff(&best);  // first maximum wins
      out.argmax(c, q) = static_cast<int>(best);
    }
  return out;
}

BlockSolution solve_normals_block(const ChannelBlock& captures, const PatternSet& intensities,
                                  const Eigen::MatrixXd& light, const Eigen::Matrix3Xd& rho) {
  const Eigen::Index k = captures[0].rows();
  const Eigen::Index n = captures[0].cols();
  if (k < 2) throw ArgumentError("normal reconstruction needs K >= 2 captures");
  if (intensities.k() != k) throw ArgumentError("pattern count does not match captures");
  if (light.rows() != intensities.superpixels() || light.cols() != 3 * n) {
    throw ArgumentError("illumination block does not match patterns and pixels");
  }
  if (rho.cols() != n) throw ArgumentError("albedo block does not match pixels");

  BlockSolution sol;
  sol.normals = Eigen::Matrix3Xd::Zero(3, n);
  sol.raw = Eigen::Matrix3Xd::Zero(3, n);
  sol.raw_norm = Eigen::VectorXd::Zero(n);
  sol.status.assign(static_cast<std::size_t>(n), PixelStatus::kValid);
  sol.gram_inverse.assign(static_cast<std::size_t>(n), Mat3::Zero());
  for (int c = 0; c < 3; ++c) sol.ml[c].noalias() = intensities.channel(c) * light;

  Eigen::VectorXd brightness(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    brightness[q] = std::max({captures[0].col(q).maxCoeff(), captures[1].col(q).maxCoeff(),
                              captures[2].col(q).maxCoeff()});
  }
  const double peak = n > 0 ? brightness.maxCoeff() : 0.0;

  Eigen::MatrixX3d a(3 * k, 3);
  Eigen::VectorXd b(3 * k);
  for (Eigen::Index q = 0; q < n; ++q) {
    auto& status = sol.status[static_cast<std::size_t>(q)];
    if (!(peak > 0.0) || brightness[q] < kDarkThreshold * peak) {
      status = PixelStatus::kDark;
      continue;
    }

    Mat3 gram = Mat3::Zero();
    Vec3 rhs = Vec3::Zero();
    for (int c = 0; c < 3; ++c) {
      const auto ml = sol.ml[c].middleCols(3 * q, 3);
      const double r = rho(c, q);
      gram.noalias() += (r * r) * (ml.transpose() * ml);
      rhs.noalias() += r * (ml.transpose() * captures[c].col(q));
    }

    Eigen::SelfAdjointEigenSolver<Mat3> eig;
    eig.computeDirect(gram, Eigen::EigenvaluesOnly);
    const Vec3 lambda = eig.eigenvalues();
    if (!(lambda[2] > 0.0)) {
      status = PixelStatus::kRankDeficient;
      continue;
    }

    Vec3 x;
    Mat3 gram_inv;
    if (lambda[0] > 1e-10 * lambda[2]) {
      gram_inv = gram.inverse();
      x = gram_inv * rhs;
    } else {
      // Near-singular normal equations lose half the digits; decide rank on
      // the singular values of the stacked system itself.
      for (int c = 0; c < 3; ++c) {
        a.middleRows(c * k, k) = rho(c, q) * sol.ml[c].middleCols(3 * q, 3);
        b.segment(c * k, k) = captures[c].col(q);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vec3 sigma = svd.singularValues();
      if (sigma[2] < kRankThreshold * sigma[0]) {
        status = PixelStatus::kRankDeficient;
        continue;
      }
      x = svd.solve(b);
      gram_inv = svd.matrixV() * sigma.cwiseInverse().cwiseAbs2().asDiagonal() *
                 svd.matrixV().transpose();
    }

    const double norm = x.norm();
    if (!(norm >= kNormGuard)) {
      status = PixelStatus::kZeroSolution;
      continue;
    }
    sol.raw.col(q) = x;
    sol.raw_norm[q] = norm;
    sol.normals.col(q) = x / norm;
    sol.gram_inverse[static_cast<std::size_t>(q)] = gram_inv;
  }
  return sol;
}

Eigen::Matrix3Xd refine_albedo_block(const ChannelBlock& captures, const PatternSet& intensities,
                                     const Eigen::MatrixXd& light, const BlockSolution& normals,
                                     const Eigen::Matrix3Xd& prior) {
  const Eigen::Index n = captures[0].cols();
  Eigen::Matrix3Xd rho = prior;
  for (int c = 0; c < 3; ++c) {
    const Eigen::MatrixXd ml = intensities.channel(c) * light;
    for (Eigen::Index q = 0; q < n; ++q) {
      if (!normals.valid(static_cast<int>(q))) continue;
      const Eigen::VectorXd d = ml.middleCols(3 * q, 3) * normals.normals.col(q);
      const double dd = d.squaredNorm();
      if (dd < 1e-12) continue;
      rho(c, q) = std::max(0.0, captures[c].col(q).dot(d) / dd);
    }
  }
  return rho;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> mask_pixels(const Mask& mask) {
  std::vector<int> pixels;
  for (int p = 0; p < mask.pixel_count(); ++p)
    if (mask.at(p)) pixels.push_back(p);
  return pixels;
}

ChannelBlock gather_captures(const CaptureSet& captures, const std::vector<int>& pixels) {
  ChannelBlock out;
  const int k = captures.k();
  const auto n = static_cast<Eigen::Index>(pixels.size());
  for (int c = 0; c < 3; ++c) {
    out[c].resize(k, n);
    for (int i = 0; i < k; ++i)
      for (Eigen::Index q = 0; q < n; ++q)
        out[c](i, q) = captures.images[static_cast<std::size_t>(i)].at(pixels[static_cast<std::size_t>(q)], c);
  }
  return out;
}

Eigen::MatrixXd gather_light(const IlluminationField& field, const std::vector<int>& pixels) {
  Eigen::MatrixXd light(field.superpixels(), 3 * static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t q = 0; q < pixels.size(); ++q)
    light.middleCols(3 * static_cast<Eigen::Index>(q), 3) = field.directions(pixels[q]);
  return light;
}

Eigen::Matrix3Xd gather_rho(const AlbedoMap& albedo, const std::vector<int>& pixels) {
  Eigen::Matrix3Xd rho(3, static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t q = 0; q < pixels.size(); ++q)
    for (int c = 0; c < 3; ++c) rho(c, static_cast<Eigen::Index>(q)) = albedo.rho.at(pixels[q], c);
  return rho;
}

void check_field(const CaptureSet& captures, const PatternSet& intensities,
                 const IlluminationField& field) {
  const Image& first = captures.images.front();
  if (field.width() != first.width() || field.height() != first.height()) {
    throw ArgumentError("illumination field resolution does not match captures");
  }
  if (field.superpixels() != intensities.superpixels()) {
    throw ArgumentError("illumination field superpixel count does not match patterns");
  }
  if (intensities.k() != captures.k()) throw ArgumentError("pattern count does not match captures");
  if (intensities.space() != PatternSpace::kIntensity) {
    throw ArgumentError("reconstruction expects intensity patterns");
  }
}

}  // namespace

CaptureSet simulate_captures(const PatternSet& intensities, const BasisStack& basis) {
  if (intensities.space() != PatternSpace::kIntensity) {
    throw ArgumentError("simulate_captures expects intensity patterns");
  }
  if (basis.size() != intensities.superpixels()) {
    throw ArgumentError("pattern has " + std::to_string(intensities.superpixels()) +
                        " superpixels, basis has " + std::to_string(basis.size()));
  }
  const Image& first = basis[0];
  CaptureSet out;
  out.mask = Mask(first.width(), first.height(), 1, 1);
  for (int i = 0; i < intensities.k(); ++i) {
    Image img(first.width(), first.height(), first.channels());
    for (int j = 0; j < basis.size(); ++j) {
      require_same_shape(first, basis[j], "simulate_captures");
      for (int p = 0; p < img.pixel_count(); ++p)
        for (int c = 0; c < img.channels(); ++c) img.at(p, c) += intensities(i, j, c) * basis[j].at(p, c);
    }
    out.images.push_back(std::move(img));
  }
  return out;
}

AlbedoMap estimate_albedo_max(const CaptureSet& captures) {
  captures.validate();
  const Image& first = captures.images.front();
  AlbedoMap out{Image(first.width(), first.height(), 3),
                ImageT<std::int32_t>(first.width(), first.height(), 3)};
  for (int p = 0; p < first.pixel_count(); ++p)
    for (int c = 0; c < 3; ++c) {
      double best = captures.images[0].at(p, c);
      int arg = 0;
      for (int i = 1; i < captures.k(); ++i) {
        if (captures.images[static_cast<std::size_t>(i)].at(p, c) > best) {
          best = captures.images[static_cast<std::size_t>(i)].at(p, c);
          arg = i;
        }
      }
      out.rho.at(p, c) = best;
      out.argmax.at(p, c) = arg;
    }
  return out;
}

NormalMap reconstruct_normals(const CaptureSet& captures, const PatternSet& intensities,
                              const IlluminationField& field, const AlbedoMap& albedo) {
  captures.validate();
  if (captures.k() < 2) throw ArgumentError("normal reconstruction needs K >= 2 captures");
  check_field(captures, intensities, field);

  const std::vector<int> pixels = mask_pixels(captures.mask);
  const BlockSolution sol =
      solve_normals_block(gather_captures(captures, pixels), intensities,
                          gather_light(field, pixels), gather_rho(albedo, pixels));

  const Image& first = captures.images.front();
  NormalMap out{Image(first.width(), first.height(), 3), Mask(first.width(), first.height(), 1, 0)};
  for (std::size_t q = 0; q < pixels.size(); ++q) {
    if (!sol.valid(static_cast<int>(q))) continue;
    out.valid.at(pixels[q]) = 1;
    for (int c = 0; c < 3; ++c) out.normals.at(pixels[q], c) = sol.normals(c, static_cast<Eigen::Index>(q));
  }
  return out;
}

AlbedoMap refine_albedo(const CaptureSet& captures, const PatternSet& intensities,
                        const IlluminationField& field, const NormalMap& normals,
                        const AlbedoMap& prior) {
  captures.validate();
  check_field(captures, intensities, field);

  std::vector<int> pixels;
  for (int p = 0; p < captures.mask.pixel_count(); ++p)
    if (captures.mask.at(p) && normals.valid.at(p)) pixels.push_back(p);

  BlockSolution sol;
  sol.normals.resize(3, static_cast<Eigen::Index>(pixels.size()));
  sol.status.assign(pixels.size(), PixelStatus::kValid);
  for (std::size_t q = 0; q < pixels.size(); ++q)
    for (int c = 0; c < 3; ++c) sol.normals(c, static_cast<Eigen::Index>(q)) = normals.normals.at(pixels[q], c);

  const Eigen::Matrix3Xd rho =
      refine_albedo_block(gather_captures(captures, pixels), intensities,
                          gather_light(field, pixels), sol, gather_rho(prior, pixels));
  AlbedoMap out = prior;
  for (std::size_t q = 0; q < pixels.size(); ++q)
    for (int c = 0; c < 3; ++c) out.rho.at(pixels[q], c) = rho(c, static_cast<Eigen::Index>(q));
  return out;
}

double cosine_loss(const NormalMap& normals, const Image& gt, const Mask& mask) {
  require_same_shape(normals.normals, gt, "cosine_loss");
  if (mask.width() != gt.width() || mask.height() != gt.height()) {
    throw ArgumentError("cosine_loss: mask shape mismatch");
  }
  double sum = 0.0;
  int count = 0;
  for (int p = 0; p < mask.pixel_count(); ++p) {
    if (!mask.at(p) || !normals.valid.at(p)) continue;
    double dot = 0.0;
    for (int c = 0; c < 3; ++c) dot += normals.normals.at(p, c) * gt.at(p, c);
    sum += 0.5 * (1.0 - dot);
    ++count;
  }
  if (count == 0) throw ArgumentError("cosine_loss: no valid pixels under the mask");
  return sum / count;
}

Image cosine_loss_map(const NormalMap& normals, const Image& gt, const Mask& mask) {
  require_same_shape(normals.normals, gt, "cosine_loss_map");
  Image out(gt.width(), gt.height(), 1);
  for (int p = 0; p < mask.pixel_count(); ++p) {
    if (!mask.at(p) || !normals.valid.at(p)) continue;
    double dot = 0.0;
    for (int c = 0; c < 3; ++c) dot += normals.normals.at(p, c) * gt.at(p, c);
    out.at(p) = 0.5 * (1.0 - dot);
  }
  return out;
}

}  // namespace dps
