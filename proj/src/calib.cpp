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

#include "dps/calib.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace dps {

void Plane::validate() const {
  if (!n.allFinite() || !std::isfinite(d)) throw ArgumentError("plane must be finite");
  if (std::abs(n.norm() - 1.0) > 1e-9) throw ArgumentError("plane normal must be unit length");
}

Ray reflect_ray(const Plane& plane, const Ray& ray) {
  const Vec3 dir = ray.direction.normalized();
  const double denom = plane.n.dot(dir);
  if (std::abs(denom) < 1e-12) throw GeometryError("reflect_ray: ray parallel to the plane");
  const double t = (plane.d - plane.n.dot(ray.origin)) / denom;
  if (t < 0.0) throw GeometryError("reflect_ray: plane lies behind the ray origin");
  Ray out;
  out.origin = ray.origin + t * dir;
  out.direction = (dir - 2.0 * dir.dot(plane.n) * plane.n).normalized();
  return out;
}

void MirrorObservation::validate() const {
  plane.validate();
  if (points.empty()) throw ArgumentError("mirror observation without correspondences");
  for (const auto& p : points) {
    if (p.j < 0) throw ArgumentError("negative superpixel index");
    if (!p.px.allFinite()) throw ArgumentError("pixel coordinates must be finite");
  }
}

std::vector<MirrorObservation> observations_from_json(const Json& j) {
  std::vector<MirrorObservation> out;
  try {
    for (const auto& entry : j) {
      MirrorObservation obs;
      const auto n = entry.at("plane").at("n").get<std::vector<double>>();
      if (n.size() != 3) throw ArgumentError("plane normal needs 3 entries");
      obs.plane.n = Vec3(n[0], n[1], n[2]);
      obs.plane.d = entry.at("plane").at("d").get<double>();
      for (const auto& p : entry.at("points")) {
        const auto px = p.at("px").get<std::vector<double>>();
        if (px.size() != 2) throw ArgumentError("px needs 2 entries");
        obs.points.push_back({p.at("j").get<int>(), Vec2(px[0], px[1])});
      }
      obs.validate();
      out.push_back(std::move(obs));
    }
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("observations: ") + e.what());
  }
  return out;
}

Json observations_to_json(const std::vector<MirrorObservation>& observations) {
  Json out = Json::array();
  for (const auto& obs : observations) {
    Json points = Json::array();
    for (const auto& p : obs.points) points.push_back({{"j", p.j}, {"px", {p.px.x(), p.px.y()}}});
    out.push_back({{"plane", {{"n", {obs.plane.n.x(), obs.plane.n.y(), obs.plane.n.z()}},
                              {"d", obs.plane.d}}},
                   {"points", points}});
  }
  return out;
}

TriangulationResult triangulate_superpixels(const std::vector<MirrorObservation>& observations,
                                            const CameraModel& camera) {
  camera.validate();
  std::map<int, std::vector<Ray>> rays;
  for (const auto& obs : observations) {
    obs.validate();
    for (const auto& p : obs.points) {
      Ray r;
      r.direction = pixel_ray(camera, p.px);
      rays[p.j].push_back(reflect_ray(obs.plane, r));
    }
  }

  TriangulationResult result;
  for (const auto& [j, list] : rays) {
    const std::string tag = "superpixel " + std::to_string(j);
    if (list.size() < 2) {
      result.warnings.push_back(tag + ": fewer than 2 observations, omitted");
      continue;
    }
    double max_angle = 0.0;
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b)
        max_angle = std::max(max_angle, angle_between_deg(list[a].direction, list[b].direction));

    Mat3 lhs = Mat3::Zero();
    Vec3 rhs = Vec3::Zero();
    for (const auto& r : list) {
      const Mat3 proj = Mat3::Identity() - r.direction * r.direction.transpose();
      lhs += proj;
      rhs += proj * r.origin;
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(lhs);
    if (eig.eigenvalues()(0) <= 1e-14 * eig.eigenvalues()(2)) {
      result.warnings.push_back(tag + ": parallel rays, omitted");
      continue;
    }
    if (max_angle < 0.5) result.warnings.push_back(tag + ": nearly parallel rays, ill-conditioned");

    TriangulatedPoint point;
    point.j = j;
    point.rays = static_cast<int>(list.size());
    point.position = lhs.ldlt().solve(rhs);
    double sq = 0.0;
    for (const auto& r : list) {
      const Vec3 off = point.position - r.origin;
      sq += (off - off.dot(r.direction) * r.direction).squaredNorm();
    }
    point.residual = std::sqrt(sq / static_cast<double>(list.size()));
    result.points.push_back(point);
  }
  return result;
}

DisplayGrid interpolate_grid(const std::vector<TriangulatedPoint>& sparse, int cols, int rows) {
  if (cols < 1 || rows < 1) throw ArgumentError("interpolate_grid: empty grid");
  std::map<int, Vec3> known;
  for (const auto& p : sparse) {
    if (p.j < 0 || p.j >= cols * rows) throw ArgumentError("interpolate_grid: index out of range");
    known[p.j] = p.position;
  }
  std::set<int> lattice_cols, lattice_rows;
  for (const auto& [j, pos] : known) {
    lattice_cols.insert(j % cols);
    lattice_rows.insert(j / cols);
  }
  if (lattice_cols.empty() || *lattice_cols.begin() != 0 || *lattice_cols.rbegin() != cols - 1 ||
      *lattice_rows.begin() != 0 || *lattice_rows.rbegin() != rows - 1) {
    throw GeometryError("interpolate_grid: sparse points do not span the grid");
  }
  for (int r : lattice_rows)
    for (int c : lattice_cols)
      if (!known.count(r * cols + c)) {
        throw GeometryError("interpolate_grid: missing lattice node (" + std::to_string(c) + ", " +
                            std::to_string(r) + ")");
      }

  const std::vector<int> lc(lattice_cols.begin(), lattice_cols.end());
  const std::vector<int> lr(lattice_rows.begin(), lattice_rows.end());
  // Index of the lattice interval containing v.
  auto bracket = [](const std::vector<int>& nodes, int v) {
    if (nodes.size() == 1) return std::size_t{0};
    std::size_t k = 0;
    while (k + 2 < nodes.size() && nodes[k + 1] <= v) ++k;
    return k;
  };

  DisplayGrid grid;
  grid.cols = cols;
  grid.rows = rows;
  grid.positions.resize(static_cast<std::size_t>(cols * rows));
  for (int r = 0; r < rows; ++r) {
    const std::size_t kr = bracket(lr, r);
    const int r0 = lr[kr], r1 = lr.size() > 1 ? lr[kr + 1] : r0;
    const double fr = r1 == r0 ? 0.0 : double(r - r0) / double(r1 - r0);
    for (int c = 0; c < cols; ++c) {
      const std::size_t kc = bracket(lc, c);
      const int c0 = lc[kc], c1 = lc.size() > 1 ? lc[kc + 1] : c0;
      const double fc = c1 == c0 ? 0.0 : double(c - c0) / double(c1 - c0);
      const Vec3& p00 = known.at(r0 * cols + c0);
      const Vec3& p01 = known.at(r0 * cols + c1);
      const Vec3& p10 = known.at(r1 * cols + c0);
      const Vec3& p11 = known.at(r1 * cols + c1);
      grid.positions[static_cast<std::size_t>(grid.index(c, r))] =
          (1.0 - fr) * ((1.0 - fc) * p00 + fc * p01) + fr * ((1.0 - fc) * p10 + fc * p11);
    }
  }
  return grid;
}

void ResponseCurve::validate() const {
  if (!(a > 0.0) || !(gamma > 0.0) || !std::isfinite(b) || !std::isfinite(a) ||
      !std::isfinite(gamma)) {
    throw ArgumentError("response curve needs a > 0, gamma > 0 and finite b");
  }
}

Json ResponseCurve::to_json() const {
  return {{"model", model == ResponseModel::kPower ? "power" : "exponential"},
          {"a", a},
          {"gamma", gamma},
          {"b", b},
          {"residual", residual}};
}

ResponseCurve ResponseCurve::from_json(const Json& j) {
  ResponseCurve c;
  try {
    const std::string model = j.value("model", std::string("power"));
    if (model == "power") {
      c.model = ResponseModel::kPower;
    } else if (model == "exponential") {
      c.model = ResponseModel::kExponential;
    } else {
      throw ArgumentError("unknown response model: " + model);
    }
    c.a = j.at("a").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.b = j.at("b").get<double>();
    c.residual = j.value("residual", 0.0);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("response: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

double basis_value(ResponseModel model, double gamma, double u) {
  return model == ResponseModel::kPower ? (u > 0.0 ? std::pow(u, gamma) : 0.0)
                                        : std::exp(gamma * u);
}

// d basis / d gamma.
double basis_slope(ResponseModel model, double gamma, double u) {
  if (model == ResponseModel::kPower) return u > 0.0 ? std::pow(u, gamma) * std::log(u) : 0.0;
  return u * std::exp(gamma * u);
}

double sum_squares(const std::vector<ResponseSample>& s, ResponseModel model, double a, double g,
                   double b) {
  double acc = 0.0;
  for (const auto& x : s) {
    const double r = a * basis_value(model, g, x.u) + b - x.y;
    acc += r * r;
  }
  return acc;
}

}  // namespace

ResponseCurve fit_response(const std::vector<ResponseSample>& samples, ResponseModel model) {
  if (samples.size() < 4) throw ArgumentError("fit_response: need at least 4 samples");
  std::set<double> distinct;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& s : samples) {
    if (!std::isfinite(s.u) || !std::isfinite(s.y)) throw ArgumentError("fit_response: non-finite sample");
    if (s.u < 0.0 || s.u > 1.0) throw ArgumentError("fit_response: u outside [0, 1]");
    distinct.insert(s.u);
    ymin = std::min(ymin, s.y);
    ymax = std::max(ymax, s.y);
  }
  if (distinct.size() < 4) throw ArgumentError("fit_response: need at least 4 distinct u values");
  if (!(ymax - ymin > 0.0)) throw ArgumentError("fit_response: constant measurements");

  // Linear regression of log(y - b0) on log u (power) or u (exponential).
  const double b0 = ymin - 1e-3 * (ymax - ymin);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& s : samples) {
    const double v = s.y - b0;
    if (v <= 0.0) continue;
    const double x = model == ResponseModel::kPower ? (s.u > 0.0 ? std::log(s.u) : NAN) : s.u;
    if (!std::isfinite(x)) continue;
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double gamma = 1.0, a = ymax - ymin;
  const double den = n * sxx - sx * sx;
  if (n >= 2 && std::abs(den) > 1e-300) {
    gamma = (n * sxy - sx * sy) / den;
    a = std::exp((sy - gamma * sx) / n);
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) gamma = 1.0;
  if (!(a > 0.0) || !std::isfinite(a)) a = ymax - ymin;
  double b = b0;

  // Gauss-Newton with step halving.
  double cost = sum_squares(samples, model, a, gamma, b);
  for (int it = 0; it < 50; ++it) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(samples.size()), 3);
    Eigen::VectorXd res(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double f = basis_value(model, gamma, samples[i].u);
      jac(k, 0) = f;
      jac(k, 1) = a * basis_slope(model, gamma, samples[i].u);
      jac(k, 2) = 1.0;
      res(k) = a * f + b - samples[i].y;
    }
    const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(-res);
    if (!step.allFinite()) break;
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h, scale *= 0.5) {
      const double na = a + scale * step(0), ng = gamma + scale * step(1), nb = b + scale * step(2);
      if (!(na > 0.0) || !(ng > 0.0)) continue;
      const double c = sum_squares(samples, model, na, ng, nb);
      if (c <= cost) {
        a = na;
        gamma = ng;
        b = nb;
        cost = c;
        accepted = true;
        break;
      }
    }
    const double rel = (scale * step).norm() / std::max(1e-300, Eigen::Vector3d(a, gamma, b).norm());
    if (!accepted || rel < 1e-10) break;
  }

  ResponseCurve curve;
  curve.model = model;
  curve.a = a;
  curve.gamma = gamma;
  curve.b = b;
  curve.residual = std::sqrt(cost / static_cast<double>(samples.size()));
  curve.validate();
  return curve;
}

double apply_response(const ResponseCurve& curve, double u) {
  return curve.a * basis_value(curve.model, curve.gamma, u) + curve.b;
}

Inverted invert_response(const ResponseCurve& curve, double y) {
  Inverted out;
  if (curve.model == ResponseModel::kPower) {
    double t = (y - curve.b) / curve.a;
    if (t < 0.0 || t > 1.0) {
      out.clamped = true;
      t = std::clamp(t, 0.0, 1.0);
    }
    out.value = t > 0.0 ? std::pow(t, 1.0 / curve.gamma) : 0.0;
  } else {
    double t = (y - curve.b) / curve.a;
    const double hi = std::exp(curve.gamma);
    if (t < 1.0 || t > hi) {
      out.clamped = true;
      t = std::clamp(t, 1.0, hi);
    }
    out.value = std::log(t) / curve.gamma;
  }
  return out;
}

std::vector<std::vector<ResponseSample>> read_response_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<ResponseSample>> channels(3);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string ch, us, ys;
    if (!std::getline(ss, ch, ',') || !std::getline(ss, us, ',') || !std::getline(ss, ys)) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected channel,u,y");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    ch = trim(ch);
    int c = -1;
    if (ch == "0" || ch == "r" || ch == "R") c = 0;
    if (ch == "1" || ch == "g" || ch == "G") c = 1;
    if (ch == "2" || ch == "b" || ch == "B") c = 2;
    double u = 0.0, y = 0.0;
    try {
      std::size_t pu = 0, py = 0;
      u = std::stod(trim(us), &pu);
      y = std::stod(trim(ys), &py);
      if (pu != trim(us).size() || py != trim(ys).size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      if (line_no == 1 && c < 0) continue;  // header
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed number");
    }
    if (c < 0) throw IoError(path + ":" + std::to_string(line_no) + ": unknown channel " + ch);
    channels[static_cast<std::size_t>(c)].push_back({u, y});
  }
  return channels;
}

}  // namespace dps
