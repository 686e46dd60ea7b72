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

#include "dps/learner.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dps/rng.hpp"

namespace dps {

PreparedScene prepare_scene(const SceneSample& sample, const IlluminationField& field) {
  const CameraModel& cam = sample.camera;
  if (field.width() != cam.width || field.height() != cam.height ||
      field.superpixels() != sample.basis.size()) {
    throw ArgumentError("illumination field does not match the scene");
  }
  PreparedScene s;
  s.width = cam.width;
  s.height = cam.height;
  s.grid_cols = sample.grid.cols;
  s.grid_rows = sample.grid.rows;
  for (int p = 0; p < sample.mask.pixel_count(); ++p)
    if (sample.mask.at(p)) s.pixels.push_back(p);

  const auto n = static_cast<Eigen::Index>(s.pixels.size());
  const int p_count = sample.basis.size();
  for (int c = 0; c < 3; ++c) {
    s.basis[c].resize(p_count, n);
    for (int j = 0; j < p_count; ++j)
      for (Eigen::Index q = 0; q < n; ++q) s.basis[c](j, q) = sample.basis[j].at(s.pixels[static_cast<std::size_t>(q)], c);
  }
  s.light.resize(p_count, 3 * n);
  s.gt.resize(3, n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const int p = s.pixels[static_cast<std::size_t>(q)];
    s.light.middleCols(3 * q, 3) = field.directions(p);
    for (int c = 0; c < 3; ++c) s.gt(c, q) = sample.gt_normals.at(p, c);
  }
  return s;
}

std::vector<PreparedScene> prepare_scenes(const std::vector<SceneSample>& samples,
                                          double plane_depth) {
  std::vector<PreparedScene> out;
  out.reserve(samples.size());
  IlluminationField field;
  const SceneSample* field_owner = nullptr;
  for (const auto& s : samples) {
    const bool reuse = field_owner != nullptr &&
                       field_owner->camera.fx == s.camera.fx && field_owner->camera.fy == s.camera.fy &&
                       field_owner->camera.cx == s.camera.cx && field_owner->camera.cy == s.camera.cy &&
                       field_owner->camera.width == s.camera.width &&
                       field_owner->camera.height == s.camera.height &&
                       field_owner->grid.positions == s.grid.positions;
    if (!reuse) {
      field = build_illumination_field(s.camera, s.grid, plane_depth);
      field_owner = &s;
    }
    out.push_back(prepare_scene(s, field));
  }
  return out;
}

SceneForward forward_scene(const PatternSet& intensities, const PreparedScene& scene) {
  SceneForward f;
  f.captures = simulate_block(intensities, scene.basis);
  f.albedo = albedo_max_block(f.captures);
  f.solution = solve_normals_block(f.captures, intensities, scene.light, f.albedo.rho);
  double sum = 0.0;
  for (int q = 0; q < scene.size(); ++q) {
    if (!f.solution.valid(q)) continue;
    sum += 0.5 * (1.0 - f.solution.normals.col(q).dot(scene.gt.col(q)));
    ++f.valid;
  }
  f.loss = f.valid > 0 ? sum / f.valid : 0.0;
  return f;
}

double dataset_loss(const PatternSet& intensities, const std::vector<PreparedScene>& scenes) {
  double sum = 0.0;
  int used = 0;
  for (const auto& s : scenes) {
    const SceneForward f = forward_scene(intensities, s);
    if (f.valid == 0) continue;
    sum += f.loss;
    ++used;
  }
  if (used == 0) throw NumericalError("no valid pixels in any scene");
  return sum / used;
}

LossGrad loss_and_grad(const PatternSet& logits, const std::vector<const PreparedScene*>& batch) {
  if (batch.empty()) throw ArgumentError("loss_and_grad: empty batch");
  if (logits.space() != PatternSpace::kLogit) throw ArgumentError("loss_and_grad expects logits");
  const PatternSet m = to_intensity(logits);
  const int k = m.k();
  const int p_count = m.superpixels();

  std::vector<SceneForward> forwards;
  forwards.reserve(batch.size());
  int used = 0;
  for (const PreparedScene* s : batch) {
    forwards.push_back(forward_scene(m, *s));
    if (forwards.back().valid > 0) ++used;
  }
  if (used == 0) throw NumericalError("degenerate batch: no valid pixels");

  LossGrad out;
  std::array<Eigen::MatrixXd, 3> grad_m;
  for (auto& g : grad_m) g = Eigen::MatrixXd::Zero(k, p_count);

  for (std::size_t si = 0; si < batch.size(); ++si) {
    const PreparedScene& scene = *batch[si];
    const SceneForward& f = forwards[si];
    if (f.valid == 0) continue;
    out.loss += f.loss / used;

    const double weight = 1.0 / (static_cast<double>(used) * f.valid);
    const Eigen::Index n = scene.size();
    ChannelBlock grad_ml, grad_captures;
    for (int c = 0; c < 3; ++c) {
      grad_ml[c] = Eigen::MatrixXd::Zero(k, 3 * n);
      grad_captures[c] = Eigen::MatrixXd::Zero(k, n);
    }

    for (Eigen::Index q = 0; q < n; ++q) {
      if (!f.solution.valid(static_cast<int>(q))) continue;
      const Vec3 normal = f.solution.normals.col(q);
      const Vec3 x = f.solution.raw.col(q);
      const Mat3& gram_inv = f.solution.gram_inverse[static_cast<std::size_t>(q)];

      // loss = (1 - N.gt) / 2, N = x / |x|.
      const Vec3 g_normal = -0.5 * weight * scene.gt.col(q);
      const Vec3 g_x = (g_normal - normal * normal.dot(g_normal)) / f.solution.raw_norm[q];

      // x = G^-1 A^T b:  dL/db = A z,  dL/dA = r z^T - (A z) x^T,  z = G^-1 dL/dx.
      const Vec3 z = gram_inv * g_x;
      for (int c = 0; c < 3; ++c) {
        const auto ml = f.solution.ml[c].middleCols(3 * q, 3);
        const double rho = f.albedo.rho(c, q);
        const Eigen::VectorXd ml_z = ml * z;
        const Eigen::VectorXd residual = f.captures[c].col(q) - rho * (ml * x);
        const Eigen::MatrixX3d g_a = residual * z.transpose() - (rho * ml_z) * x.transpose();

        grad_captures[c].col(q) += rho * ml_z;
        grad_captures[c](f.albedo.argmax(c, q), q) += (g_a.array() * ml.array()).sum();
        grad_ml[c].middleCols(3 * q, 3) += rho * g_a;
      }
    }

    // ML = M l and I = M B, so dL/dM = dL/dML l^T + dL/dI B^T.
    for (int c = 0; c < 3; ++c) {
      grad_m[c].noalias() += grad_ml[c] * scene.light.transpose();
      grad_m[c].noalias() += grad_captures[c] * scene.basis[c].transpose();
    }
  }

  out.gradient = PatternSet(k, m.cols(), m.rows(), PatternSpace::kLogit);
  for (int c = 0; c < 3; ++c) {
    out.gradient.channel(c) =
        grad_m[c].array() * m.channel(c).array() * (1.0 - m.channel(c).array());
  }
  return out;
}

Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& loss,
                                 const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite difference step must be positive");
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = loss(probe);
    probe[i] = x[i] - h;
    const double down = loss(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

PatternSet finite_diff_grad(const PatternSet& logits,
                            const std::vector<const PreparedScene*>& batch, double h) {
  PatternSet probe = logits;
  auto loss = [&](const Eigen::VectorXd& v) {
    probe.unflatten(v);
    const PatternSet m = to_intensity(probe);
    double sum = 0.0;
    int used = 0;
    for (const PreparedScene* s : batch) {
      const SceneForward f = forward_scene(m, *s);
      if (f.valid == 0) continue;
      sum += f.loss;
      ++used;
    }
    if (used == 0) throw NumericalError("degenerate batch: no valid pixels");
    return sum / used;
  };
  PatternSet out = logits;
  out.unflatten(finite_diff_grad(loss, logits.flatten(), h));
  return out;
}

double argmax_margin(const PatternSet& intensities, const std::vector<const PreparedScene*>& batch) {
  double margin = std::numeric_limits<double>::infinity();
  for (const PreparedScene* s : batch) {
    const ChannelBlock captures = simulate_block(intensities, s->basis);
    for (int c = 0; c < 3; ++c)
      for (Eigen::Index q = 0; q < captures[c].cols(); ++q) {
        double first = -std::numeric_limits<double>::infinity();
        double second = first;
        for (Eigen::Index i = 0; i < captures[c].rows(); ++i) {
          const double v = captures[c](i, q);
          if (v > first) {
            second = first;
            first = v;
          } else if (v > second) {
            second = v;
          }
        }
        if (first > 0.0) margin = std::min(margin, first - second);
      }
  }
  return margin;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  if (grad.size() != params.size()) throw ArgumentError("adam_step: gradient shape mismatch");
  if (!grad.allFinite()) throw NumericalError("adam_step: non-finite gradient");
  if (state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  if (state.m.size() != params.size()) throw ArgumentError("adam_step: state shape mismatch");

  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.epsilon);
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (k < 2) throw ArgumentError("train: K must be >= 2");
  if (!(learning_rate >= 0.0)) throw ArgumentError("train: learning rate must be >= 0");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw ArgumentError("train: decay factor must be in (0, 1]");
  if (decay_step_epochs < 1) throw ArgumentError("train: decay step must be >= 1 epoch");
  if (epochs < 1) throw ArgumentError("train: epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("train: batch size must be >= 1");
  if (!(plane_depth > 0.0)) throw ArgumentError("train: plane depth must be positive");
}

Json TrainConfig::to_json() const {
  Json j = Json::object();
  j["init"] = std::string(heuristic_name(init));
  j["K"] = k;
  j["init_seed"] = init_seed;
  j["learning_rate"] = learning_rate;
  j["decay_factor"] = decay_factor;
  j["decay_step_epochs"] = decay_step_epochs;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["plane_depth"] = plane_depth;
  j["seed"] = seed;
  return j;
}

TrainConfig TrainConfig::from_json(const Json& j) {
  TrainConfig c;
  try {
    if (j.contains("init")) c.init = parse_heuristic(j.at("init").get<std::string>());
    if (j.contains("K")) c.k = j.at("K").get<int>();
    if (j.contains("init_seed")) c.init_seed = j.at("init_seed").get<std::uint64_t>();
    if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("decay_factor")) c.decay_factor = j.at("decay_factor").get<double>();
    if (j.contains("decay_step_epochs")) c.decay_step_epochs = j.at("decay_step_epochs").get<int>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
    if (j.contains("plane_depth")) c.plane_depth = j.at("plane_depth").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

double TrainConfig::learning_rate_at(int epoch) const {
  return learning_rate * std::pow(decay_factor, (epoch - 1) / decay_step_epochs);
}

Json TrainReport::to_json() const {
  Json j = Json::object();
  j["config"] = config.to_json();
  j["adam"] = {{"beta1", 0.9}, {"beta2", 0.999}, {"epsilon", 1e-8}};
  Json rows = Json::array();
  for (const auto& e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"test_loss", e.test_loss},
                    {"learning_rate", e.learning_rate}});
  }
  j["epochs"] = rows;
  j["initial_test_loss"] = initial_test_loss();
  j["best_epoch"] = best_epoch;
  j["best_test_loss"] = best_test_loss();
  j["final_test_loss"] = final_test_loss();
  j["initial_patterns"] = patterns_to_json(initial);
  j["best_patterns"] = patterns_to_json(best_patterns);
  j["final_patterns"] = patterns_to_json(final_patterns);
  j["final_logits"] = patterns_to_json(final_logits);
  return j;
}

TrainReport train(const TrainConfig& config, const std::vector<PreparedScene>& train_scenes,
                  const std::vector<PreparedScene>& test_scenes, const EpochCallback& on_epoch) {
  config.validate();
  if (train_scenes.empty() || test_scenes.empty()) {
    throw ArgumentError("train: needs at least one train and one test scene");
  }
  const auto start = std::chrono::steady_clock::now();
  const int cols = train_scenes.front().grid_cols;
  const int rows = train_scenes.front().grid_rows;

  TrainReport report;
  report.config = config;
  report.initial = init_heuristic(config.init, config.k, cols, rows, config.init_seed);
  PatternSet logits = to_logit(report.initial);
  Eigen::VectorXd params = logits.flatten();

  auto record = [&](int epoch, double lr) {
    const PatternSet m = to_intensity(logits);
    EpochRecord e{epoch, dataset_loss(m, train_scenes), dataset_loss(m, test_scenes), lr};
    report.epochs.push_back(e);
    report.snapshots.push_back(m);
    if (on_epoch) on_epoch(e);
  };
  record(0, config.learning_rate_at(1));

  std::vector<const PreparedScene*> order;
  for (const auto& s : train_scenes) order.push_back(&s);
  Rng rng(config.seed);
  AdamState adam;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.learning_rate_at(epoch);
    shuffle(order, rng);
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(config.batch_size));
      const std::vector<const PreparedScene*> batch(order.begin() + static_cast<std::ptrdiff_t>(b),
                                                    order.begin() + static_cast<std::ptrdiff_t>(e));
      const LossGrad lg = loss_and_grad(logits, batch);
      adam_step(adam, params, lg.gradient.flatten(), lr);
      logits.unflatten(params);
    }
    record(epoch, lr);
  }

  report.best_epoch = 0;
  for (std::size_t e = 1; e < report.epochs.size(); ++e)
    if (report.epochs[e].test_loss < report.epochs[static_cast<std::size_t>(report.best_epoch)].test_loss)
      report.best_epoch = static_cast<int>(e);
  report.best_patterns = report.snapshots[static_cast<std::size_t>(report.best_epoch)];
  report.final_logits = logits;
  report.final_patterns = to_intensity(logits);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TrainReport train(const TrainConfig& config, const Dataset& dataset, const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.train.empty() || dataset.test.empty()) {
    throw ArgumentError("train: dataset needs at least one train and one test scene");
  }
  return train(config, prepare_scenes(dataset.train, config.plane_depth),
               prepare_scenes(dataset.test, config.plane_depth), on_epoch);
}

}  // namespace dps
