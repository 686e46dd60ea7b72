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

#include "dps/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace dps {

void TriangleMesh::compute_normals() {
  normals.assign(vertices.size(), Vec3::Zero());
  for (const auto& f : faces) {
    const Vec3 face_n =
        (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]);
    const double len = face_n.norm();
    if (len == 0.0) continue;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e1 = vertices[f[(k + 1) % 3]] - vertices[f[k]];
      const Vec3 e2 = vertices[f[(k + 2) % 3]] - vertices[f[k]];
      const double angle = std::atan2(e1.cross(e2).norm(), e1.dot(e2));
      normals[static_cast<std::size_t>(f[k])] += angle * face_n / len;
    }
  }
  for (auto& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
}

Vec3 TriangleMesh::centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& v : vertices) sum += v;
  return vertices.empty() ? sum : Vec3(sum / static_cast<double>(vertices.size()));
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh: " + path);
  TriangleMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z())) {
        throw IoError(path + ":" + std::to_string(line_no) + ": malformed vertex");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string entry;
      while (ss >> entry) {
        const int raw = std::stoi(entry.substr(0, entry.find('/')));
        const int n = static_cast<int>(mesh.vertices.size());
        const int i = raw < 0 ? n + raw : raw - 1;
        if (i < 0 || i >= n) {
          throw IoError(path + ":" + std::to_string(line_no) + ": face index out of range");
        }
        idx.push_back(i);
      }
      if (idx.size() < 3) throw IoError(path + ":" + std::to_string(line_no) + ": short face");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        mesh.faces.emplace_back(idx[0], idx[k], idx[k + 1]);
    }
  }
  if (mesh.faces.empty()) throw IoError("mesh has no faces: " + path);
  mesh.compute_normals();
  return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.emplace_back(f[0], a, c);
      next.emplace_back(f[1], b, a);
      next.emplace_back(f[2], c, b);
      next.emplace_back(a, b, c);
    }
    faces = std::move(next);
  }

  TriangleMesh mesh;
  mesh.faces = std::move(faces);
  mesh.normals = verts;  // exact sphere normals
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(center + radius * v);
  return mesh;
}

TriangleMesh make_box(const Vec3& size, const Vec3& center) {
  const Vec3 h = size / 2.0;
  auto corner = [&](int i) {
    return Vec3(center + Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                              (i & 4) ? h.z() : -h.z()));
  };
  // Outward counter-clockwise winding; each face owns its vertices so the
  // shading normals stay flat.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  TriangleMesh mesh;
  for (const auto& q : quads) {
    const int base = static_cast<int>(mesh.vertices.size());
    for (int k = 0; k < 4; ++k) mesh.vertices.push_back(corner(q[k]));
    mesh.faces.emplace_back(base, base + 1, base + 2);
    mesh.faces.emplace_back(base, base + 2, base + 3);
  }
  mesh.compute_normals();
  return mesh;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = rotation * v + translation;
  for (auto& n : out.normals) n = rotation * n;
  return out;
}

RasterResult rasterize(const TriangleMesh& mesh, const CameraModel& camera) {
  RasterResult r;
  r.width = camera.width;
  r.height = camera.height;
  const int n = camera.pixel_count();
  r.triangle = Eigen::VectorXi::Constant(n, -1);
  r.weights = Eigen::Matrix3Xd::Zero(3, n);
  r.depth = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());

  constexpr double kMinZ = 1e-9;
  for (std::size_t t = 0; t < mesh.faces.size(); ++t) {
    const auto& f = mesh.faces[t];
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    if (a.z() <= kMinZ || b.z() <= kMinZ || c.z() <= kMinZ) continue;
    const Vec2 pa = project(camera, a), pb = project(camera, b), pc = project(camera, c);

    const double area = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
    if (std::abs(area) < 1e-14) continue;

    auto clamp_to = [](double v, int hi) { return std::clamp(v, -1.0, static_cast<double>(hi)); };
    const int x0 = std::max(0, static_cast<int>(std::ceil(clamp_to(std::min({pa.x(), pb.x(), pc.x()}), camera.width))));
    const int x1 = std::min(camera.width - 1, static_cast<int>(std::floor(clamp_to(std::max({pa.x(), pb.x(), pc.x()}), camera.width))));
    const int y0 = std::max(0, static_cast<int>(std::ceil(clamp_to(std::min({pa.y(), pb.y(), pc.y()}), camera.height))));
    const int y1 = std::min(camera.height - 1, static_cast<int>(std::floor(clamp_to(std::max({pa.y(), pb.y(), pc.y()}), camera.height))));

    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const Vec2 q(x, y);
        auto edge = [](const Vec2& u, const Vec2& v, const Vec2& w) {
          return (v - u).x() * (w - u).y() - (v - u).y() * (w - u).x();
        };
        const double l0 = edge(pb, pc, q) / area;
        const double l1 = edge(pc, pa, q) / area;
        const double l2 = edge(pa, pb, q) / area;
        if (l0 < 0.0 || l1 < 0.0 || l2 < 0.0) continue;

        // Screen-space weights -> perspective-correct weights.
        const double w0 = l0 / a.z(), w1 = l1 / b.z(), w2 = l2 / c.z();
        const double sum = w0 + w1 + w2;
        const double z = 1.0 / sum;
        const int p = y * camera.width + x;
        if (z < r.depth[p]) {
          r.depth[p] = z;
          r.triangle[p] = static_cast<int>(t);
          r.weights.col(p) = Eigen::Vector3d(w0, w1, w2) / sum;
        }
      }
  }
  return r;
}

Vec3 interpolated_normal(const TriangleMesh& mesh, const RasterResult& raster, int pixel) {
  const auto& f = mesh.faces[static_cast<std::size_t>(raster.triangle[pixel])];
  const Eigen::Vector3d w = raster.weights.col(pixel);
  Vec3 n = w[0] * mesh.normals[static_cast<std::size_t>(f[0])] +
           w[1] * mesh.normals[static_cast<std::size_t>(f[1])] +
           w[2] * mesh.normals[static_cast<std::size_t>(f[2])];
  const double len = n.norm();
  if (len < 1e-12) {
    n = (mesh.vertices[static_cast<std::size_t>(f[1])] - mesh.vertices[static_cast<std::size_t>(f[0])])
            .cross(mesh.vertices[static_cast<std::size_t>(f[2])] - mesh.vertices[static_cast<std::size_t>(f[0])]);
    return n.normalized();
  }
  return n / len;
}

}  // namespace dps
