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

#include "dps/scene.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <optional>

#include "dps/rng.hpp"

namespace dps {

void Scene::validate() const {
  if (!albedo.allFinite() || albedo.minCoeff() < 0.0 || albedo.maxCoeff() > 1.0) {
    throw ArgumentError("scene albedo must lie in [0, 1]");
  }
  if (specular < 0.0 || shininess <= 0.0) throw ArgumentError("invalid specular parameters");
  switch (kind) {
    case SceneKind::kSphere:
      if (!center.allFinite() || !(radius > 0.0)) throw ArgumentError("invalid sphere");
      if (center.norm() <= radius) throw ArgumentError("camera inside sphere");
      break;
    case SceneKind::kPlane:
      if (!plane_normal.allFinite() || plane_normal.norm() < 1e-12 || !std::isfinite(plane_z)) {
        throw ArgumentError("invalid plane");
      }
      break;
    case SceneKind::kMesh:
      if (mesh.empty()) throw ArgumentError("scene mesh is empty");
      break;
  }
}

int SceneSample::valid_pixels() const {
  int n = 0;
  for (int p = 0; p < mask.pixel_count(); ++p) n += mask.at(p) ? 1 : 0;
  return n;
}

namespace {

struct SurfaceHit {
  Vec3 point;
  Vec3 normal;
};

// Any unit vector orthogonal to n.
Vec3 orthogonal(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(a).normalized();
}

class SurfaceTracer {
 public:
  SurfaceTracer(const Scene& scene, const CameraModel& camera) : scene_(scene), camera_(camera) {
    if (scene.kind == SceneKind::kMesh) raster_ = rasterize(scene.mesh, camera);
  }

  std::optional<SurfaceHit> trace(int x, int y) const {
    const Vec3 d = pixel_ray(camera_, Vec2(x, y));
    std::optional<SurfaceHit> hit;
    switch (scene_.kind) {
      case SceneKind::kSphere: hit = sphere(d); break;
      case SceneKind::kPlane: hit = plane(d); break;
      case SceneKind::kMesh: hit = mesh(d, y * camera_.width + x); break;
    }
    if (hit && !(hit->normal.dot(d) < 0.0)) return std::nullopt;
    return hit;
  }

 private:
  std::optional<SurfaceHit> sphere(const Vec3& d) const {
    const double b = d.dot(scene_.center);
    const double disc = b * b - (scene_.center.squaredNorm() - scene_.radius * scene_.radius);
    if (disc < 0.0) return std::nullopt;
    const double t = b - std::sqrt(disc);
    if (t <= 0.0) return std::nullopt;
    const Vec3 p = t * d;
    return SurfaceHit{p, (p - scene_.center) / scene_.radius};
  }

  std::optional<SurfaceHit> plane(const Vec3& d) const {
    Vec3 n = scene_.plane_normal.normalized();
    const double denom = n.dot(d);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    const double t = n.z() * scene_.plane_z / denom;
    if (t <= 0.0) return std::nullopt;
    const Vec3 p = t * d;
    if (n.dot(d) > 0.0) n = -n;
    if (scene_.bump_amplitude != 0.0) {
      const Vec3 t1 = orthogonal(n);
      const Vec3 t2 = n.cross(t1);
      const Vec3 rel = p - Vec3(0.0, 0.0, scene_.plane_z);
      const double w = 2.0 * 3.14159265358979323846 * scene_.bump_frequency;
      n = (n + scene_.bump_amplitude * std::sin(w * rel.dot(t1) + scene_.bump_phase) * t1 +
           scene_.bump_amplitude * std::sin(w * rel.dot(t2) + 2.0 * scene_.bump_phase) * t2)
              .normalized();
    }
    return SurfaceHit{p, n};
  }

  std::optional<SurfaceHit> mesh(const Vec3& d, int pixel) const {
    if (!raster_->hit(pixel)) return std::nullopt;
    const Vec3 p = d * (raster_->depth[pixel] / d.z());
    return SurfaceHit{p, interpolated_normal(scene_.mesh, *raster_, pixel)};
  }

  const Scene& scene_;
  const CameraModel& camera_;
  std::optional<RasterResult> raster_;
};

struct Shading {
  Eigen::VectorXd diffuse;   // P, without albedo
  Eigen::VectorXd specular;  // P
};

Shading shade(const Scene& scene, const DisplayGrid& grid, const SurfaceHit& hit,
              const RenderOptions& options) {
  const int p_count = grid.size();
  const Eigen::MatrixX3d lights = light_directions(grid, hit.point);
  const Vec3 view = -hit.point.normalized();
  Shading s{Eigen::VectorXd::Zero(p_count), Eigen::VectorXd::Zero(p_count)};
  for (int j = 0; j < p_count; ++j) {
    const Vec3 l = lights.row(j).transpose();
    const double cosine = hit.normal.dot(l);
    if (cosine <= 0.0) continue;
    double weight = 1.0;
    if (options.falloff) {
      const double r = (grid.positions[static_cast<std::size_t>(j)] - hit.point).norm();
      weight = (options.plane_depth / r) * (options.plane_depth / r);
    }
    s.diffuse[j] = cosine * weight;
    if (scene.specular > 0.0) {
      const Vec3 h = (l + view).normalized();
      s.specular[j] = scene.specular * std::pow(std::max(0.0, hit.normal.dot(h)), scene.shininess) * weight;
    }
  }
  return s;
}

}  // namespace

SceneSample render_basis(const Scene& scene, const CameraModel& camera, const DisplayGrid& grid,
                         const RenderOptions& options) {
  scene.validate();
  camera.validate();
  grid.validate();

  const int p_count = grid.size();
  SceneSample out;
  out.camera = camera;
  out.grid = grid;
  out.mask = Mask(camera.width, camera.height, 1, 0);
  out.gt_normals = Image(camera.width, camera.height, 3);
  out.gt_albedo = Image(camera.width, camera.height, 3);
  out.basis.images.assign(static_cast<std::size_t>(p_count), Image(camera.width, camera.height, 3));
  const bool glossy = scene.specular > 0.0;
  if (glossy) {
    out.specular.images.assign(static_cast<std::size_t>(p_count),
                               Image(camera.width, camera.height, 3));
  }

  const SurfaceTracer tracer(scene, camera);
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x) {
      const auto hit = tracer.trace(x, y);
      if (!hit) continue;
      const int p = y * camera.width + x;
      out.mask.at(p) = 1;
      for (int c = 0; c < 3; ++c) {
        out.gt_normals.at(p, c) = hit->normal[c];
        out.gt_albedo.at(p, c) = scene.albedo[c];
      }
      const Shading s = shade(scene, grid, *hit, options);
      for (int j = 0; j < p_count; ++j)
        for (int c = 0; c < 3; ++c) {
          out.basis.images[static_cast<std::size_t>(j)].at(p, c) = scene.albedo[c] * s.diffuse[j];
          if (glossy) out.specular.images[static_cast<std::size_t>(j)].at(p, c) = s.specular[j];
        }
    }

  if (options.noise_sigma > 0.0) {
    Rng rng(options.noise_seed);
    for (auto& img : out.basis.images) {
      for (Eigen::Index i = 0; i < img.array().size(); ++i) {
        img.array()[i] = std::max(0.0, img.array()[i] + rng.normal(0.0, options.noise_sigma));
      }
    }
  }
  return out;
}

Image render_pattern(const Scene& scene, const CameraModel& camera, const DisplayGrid& grid,
                     const PatternSet& intensities, int pattern, const RenderOptions& options) {
  scene.validate();
  if (intensities.space() != PatternSpace::kIntensity) {
    throw ArgumentError("render_pattern expects intensity patterns");
  }
  if (intensities.superpixels() != grid.size()) throw ArgumentError("pattern/grid size mismatch");
  Image out(camera.width, camera.height, 3);
  const SurfaceTracer tracer(scene, camera);
  for (int y = 0; y < camera.height; ++y)
    for (int x = 0; x < camera.width; ++x) {
      const auto hit = tracer.trace(x, y);
      if (!hit) continue;
      const Shading s = shade(scene, grid, *hit, options);
      for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
          v += intensities(pattern, j, c) * (scene.albedo[c] * s.diffuse[j] + s.specular[j]);
        }
        out(x, y, c) = v;
      }
    }
  return out;
}

Image average_image(const BasisStack& basis) {
  if (basis.empty()) throw ArgumentError("average of an empty basis stack");
  Image out = basis[0];
  for (int j = 1; j < basis.size(); ++j) {
    require_same_shape(out, basis[j], "average_image");
    out.array() += basis[j].array();
  }
  out.array() /= static_cast<double>(basis.size());
  return out;
}

void quantize_to_float(SceneSample& sample) {
  auto q = [](Image& img) { img.array() = img.array().cast<float>().cast<double>(); };
  for (auto& img : sample.basis.images) q(img);
  for (auto& img : sample.specular.images) q(img);
  q(sample.gt_normals);
  q(sample.gt_albedo);
}

}  // namespace dps
