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

#include "dps/posefit.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <limits>

#include "dps/rng.hpp"

namespace dps {

Mat3 PoseParams::rotation() const {
  const double angle = r.norm();
  if (angle < 1e-15) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, r / angle).toRotationMatrix();
}

void PoseParams::validate() const {
  if (!t.allFinite() || !r.allFinite()) throw ArgumentError("pose must be finite");
  if (r.norm() >= 3.14159265358979323846) throw ArgumentError("pose rotation must satisfy |r| < pi");
}

Json pose_to_json(const PoseParams& pose, double mse) {
  Json j = Json::object();
  j["t"] = {pose.t.x(), pose.t.y(), pose.t.z()};
  j["r"] = {pose.r.x(), pose.r.y(), pose.r.z()};
  j["mse"] = mse;
  return j;
}

PoseParams pose_from_json(const Json& j) {
  PoseParams pose;
  try {
    const auto t = j.at("t").get<std::vector<double>>();
    const auto r = j.at("r").get<std::vector<double>>();
    if (t.size() != 3 || r.size() != 3) throw ArgumentError("pose vectors need 3 entries");
    pose.t = Vec3(t[0], t[1], t[2]);
    pose.r = Vec3(r[0], r[1], r[2]);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("pose: ") + e.what());
  }
  pose.validate();
  return pose;
}

Mask rasterize_silhouette(const TriangleMesh& mesh, const PoseParams& pose,
                          const CameraModel& camera) {
  if (mesh.empty()) throw ArgumentError("rasterize_silhouette: empty mesh");
  const RasterResult raster = rasterize(transformed(mesh, pose.rotation(), pose.t), camera);
  Mask mask(camera.width, camera.height, 1, 0);
  for (int p = 0; p < camera.pixel_count(); ++p) mask.at(p) = raster.hit(p) ? 1 : 0;
  return mask;
}

double silhouette_mse(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw ArgumentError("silhouette_mse: shape mismatch");
  int diff = 0;
  for (int p = 0; p < a.pixel_count(); ++p) diff += (a.at(p) != 0) != (b.at(p) != 0) ? 1 : 0;
  return static_cast<double>(diff) / a.pixel_count();
}

namespace {

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  bool empty() const { return x0 > x1; }
  Vec2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  double extent() const { return std::max(x1 - x0, y1 - y0) + 1.0; }
};

Box bounding_box(const Mask& mask) {
  Box b;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y)) {
        b.x0 = std::min(b.x0, double(x));
        b.x1 = std::max(b.x1, double(x));
        b.y0 = std::min(b.y0, double(y));
        b.y1 = std::max(b.y1, double(y));
      }
  return b;
}

// Translate so the projected silhouette box lands on the target box; depth
// is rescaled by the ratio of box extents (metric meshes only change
// apparent size with distance).
PoseParams align_boxes(const TriangleMesh& mesh, const Mask& target, const PoseParams& init,
                       const CameraModel& camera) {
  const Box want = bounding_box(target);
  const Box have = bounding_box(rasterize_silhouette(mesh, init, camera));
  if (want.empty() || have.empty()) return init;

  PoseParams out = init;
  const Vec3 anchor = init.rotation() * mesh.centroid() + init.t;
  if (!(anchor.z() > 0.0)) return init;
  const double z = anchor.z() * have.extent() / want.extent();
  const Vec2 c = want.center();
  const Vec3 moved((c.x() - camera.cx) / camera.fx * z, (c.y() - camera.cy) / camera.fy * z, z);
  out.t += moved - anchor;
  return out;
}

// Fraction of an s x s grid of sub-pixel samples covered, per pixel.
Image coverage(const TriangleMesh& posed, const CameraModel& camera, int s) {
  CameraModel fine = camera;
  fine.width = camera.width * s;
  fine.height = camera.height * s;
  fine.fx = camera.fx * s;
  fine.fy = camera.fy * s;
  fine.cx = camera.cx * s + (s - 1) / 2.0;
  fine.cy = camera.cy * s + (s - 1) / 2.0;
  const RasterResult raster = rasterize(posed, fine);
  Image out(camera.width, camera.height, 1);
  const double w = 1.0 / (s * s);
  for (int y = 0; y < fine.height; ++y)
    for (int x = 0; x < fine.width; ++x)
      if (raster.hit(y * fine.width + x)) out(x / s, y / s) += w;
  return out;
}

}  // namespace

PoseFitResult fit_pose(const TriangleMesh& mesh, const Mask& target, const PoseParams& init,
                       const CameraModel& camera, const PoseFitOptions& options) {
  if (mesh.empty()) throw ArgumentError("fit_pose: empty mesh");
  if (target.width() != camera.width || target.height() != camera.height) {
    throw ArgumentError("fit_pose: target mask does not match the camera");
  }
  if (bounding_box(target).empty()) throw ArgumentError("fit_pose: empty target mask");
  if (options.supersample < 1) throw ArgumentError("fit_pose: supersample must be >= 1");
  init.validate();

  PoseFitResult result;
  PoseParams best_binary = init;
  double best_binary_mse = std::numeric_limits<double>::infinity();

  // Search objective: squared difference between sub-pixel coverage and the
  // target. The binary MSE of every visited pose is tracked alongside.
  auto loss = [&](const PoseParams& p) {
    ++result.evaluations;
    if (p.r.norm() >= 3.14159265358979323846) return std::numeric_limits<double>::infinity();
    const TriangleMesh posed = transformed(mesh, p.rotation(), p.t);
    const RasterResult raster = rasterize(posed, camera);
    int diff = 0;
    for (int q = 0; q < camera.pixel_count(); ++q) diff += raster.hit(q) != (target.at(q) != 0);
    const double binary = static_cast<double>(diff) / camera.pixel_count();
    if (binary < best_binary_mse) {
      best_binary_mse = binary;
      best_binary = p;
    }
    if (options.supersample == 1) return binary;
    const Image cov = coverage(posed, camera, options.supersample);
    double sum = 0.0;
    for (int q = 0; q < camera.pixel_count(); ++q) {
      const double d = cov.at(q) - (target.at(q) != 0 ? 1.0 : 0.0);
      sum += d * d;
    }
    return sum / camera.pixel_count();
  };

  PoseParams best = init;
  double best_loss = loss(init);
  result.initial_mse = best_binary_mse;
  if (options.align_bounding_box && best_binary_mse > 0.0) {
    const PoseParams aligned = align_boxes(mesh, target, init, camera);
    const double aligned_loss = loss(aligned);
    if (aligned_loss < best_loss) {
      best = aligned;
      best_loss = aligned_loss;
    }
  }

  const std::array<double, 6> initial_step = {
      options.translation_step, options.translation_step, options.translation_step,
      options.rotation_step,    options.rotation_step,    options.rotation_step};
  auto coord = [](PoseParams& p, int i) -> double& { return i < 3 ? p.t[i] : p.r[i - 3]; };
  auto budget_left = [&] {
    return best_binary_mse > 0.0 && result.evaluations < options.max_evaluations;
  };

  // Coordinate pattern search with halving steps, restarted at full steps
  // while restarts keep improving.
  auto local_search = [&](PoseParams& p, double& p_loss) {
    std::array<double, 6> step = initial_step;
    double restart_loss = p_loss;
    while (budget_left()) {
      bool improved = false;
      for (int i = 0; i < 6 && budget_left(); ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        if (step[u] < initial_step[u] * options.min_step_fraction) continue;
        for (double sign : {1.0, -1.0}) {
          PoseParams trial = p;
          coord(trial, i) += sign * step[u];
          const double l = loss(trial);
          if (l < p_loss) {
            p = trial;
            p_loss = l;
            improved = true;
            break;
          }
        }
      }
      if (improved) continue;
      bool any = false;
      for (std::size_t i = 0; i < 6; ++i) {
        step[i] *= 0.5;
        any = any || step[i] >= initial_step[i] * options.min_step_fraction;
      }
      if (any) continue;
      if (p_loss >= restart_loss) break;
      restart_loss = p_loss;
      step = initial_step;
    }
  };

  local_search(best, best_loss);

  // Escape local minima with random kicks of a few initial steps.
  Rng rng(0x5EEDull);
  for (int kick = 0; kick < options.kicks && budget_left(); ++kick) {
    PoseParams trial = best;
    for (int i = 0; i < 6; ++i) {
      coord(trial, i) += rng.uniform(-2.0, 2.0) * initial_step[static_cast<std::size_t>(i)];
    }
    double trial_loss = loss(trial);
    local_search(trial, trial_loss);
    if (trial_loss < best_loss) {
      best = trial;
      best_loss = trial_loss;
    }
  }

  result.pose = best_binary;
  result.mse = best_binary_mse;
  return result;
}

Image render_gt_normals(const TriangleMesh& mesh, const PoseParams& pose,
                        const CameraModel& camera) {
  if (mesh.empty()) throw ArgumentError("render_gt_normals: empty mesh");
  const TriangleMesh posed = transformed(mesh, pose.rotation(), pose.t);
  const RasterResult raster = rasterize(posed, camera);
  Image normals(camera.width, camera.height, 3);
  for (int p = 0; p < camera.pixel_count(); ++p) {
    if (!raster.hit(p)) continue;
    const Vec3 n = interpolated_normal(posed, raster, p);
    for (int c = 0; c < 3; ++c) normals.at(p, c) = n[c];
  }
  return normals;
}

}  // namespace dps
