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

#include "dps/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <limits>
#include <sstream>

#include "dps/image_io.hpp"

namespace fs = std::filesystem;

namespace dps {

Json EvalResult::to_json() const {
  Json scenes_json = Json::array();
  for (const auto& s : scenes) {
    Json row = {{"index", s.index}, {"valid", s.valid}, {"masked", s.masked}};
    row["loss"] = s.loss ? Json(*s.loss) : Json(nullptr);
    scenes_json.push_back(row);
  }
  return {{"mean", mean}, {"scenes", scenes_json}};
}

EvalResult evaluate(const PatternSet& intensities, const std::vector<SceneSample>& scenes,
                    double plane_depth) {
  if (scenes.empty()) throw ArgumentError("evaluate: no scenes");
  intensities.validate();
  if (intensities.space() != PatternSpace::kIntensity) {
    throw ArgumentError("evaluate expects intensity patterns");
  }
  EvalResult result;
  IlluminationField field;
  const SceneSample* field_owner = nullptr;
  double sum = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneSample& s = scenes[i];
    if (s.grid.size() != intensities.superpixels()) {
      throw ArgumentError("evaluate: pattern grid does not match the scene grid");
    }
    const bool reuse = field_owner && field_owner->camera.width == s.camera.width &&
                       field_owner->camera.height == s.camera.height &&
                       field_owner->camera.fx == s.camera.fx && field_owner->camera.fy == s.camera.fy &&
                       field_owner->camera.cx == s.camera.cx && field_owner->camera.cy == s.camera.cy &&
                       field_owner->grid.positions == s.grid.positions;
    if (!reuse) {
      field = build_illumination_field(s.camera, s.grid, plane_depth);
      field_owner = &s;
    }
    CaptureSet captures = simulate_captures(intensities, s.basis);
    captures.mask = s.mask;
    const AlbedoMap albedo = estimate_albedo_max(captures);
    const NormalMap normals = reconstruct_normals(captures, intensities, field, albedo);

    SceneEval e;
    e.index = static_cast<int>(i);
    for (int p = 0; p < s.mask.pixel_count(); ++p) {
      if (!s.mask.at(p)) continue;
      ++e.masked;
      if (normals.valid.at(p)) ++e.valid;
    }
    if (e.valid > 0) {
      e.loss = cosine_loss(normals, s.gt_normals, s.mask);
      sum += *e.loss;
      ++used;
    }
    result.scenes.push_back(e);
  }
  if (used == 0) throw NumericalError("evaluate: no scene could be reconstructed");
  result.mean = sum / used;
  return result;
}

Json EvalReport::to_json() const {
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    if (r.failed()) {
      rows_json.push_back({{"name", r.name},
                           {"K", r.k},
                           {"initial_test_loss", nullptr},
                           {"learned_test_loss", nullptr},
                           {"final_test_loss", nullptr},
                           {"best_epoch", nullptr},
                           {"error", r.error}});
      continue;
    }
    rows_json.push_back({{"name", r.name},
                         {"K", r.k},
                         {"initial_test_loss", r.initial_test_loss},
                         {"learned_test_loss", r.learned_test_loss},
                         {"final_test_loss", r.final_test_loss},
                         {"best_epoch", r.best_epoch},
                         {"learned_scenes", r.learned_scenes.to_json()}});
  }
  Json config_json = config.to_json();
  config_json.erase("init");
  config_json.erase("k");
  return {{"tool_version", kToolVersion}, {"config", config_json}, {"rows", rows_json}};
}

std::string EvalReport::table() const {
  std::size_t name_w = 4;
  for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s  %3s  %12s  %12s  %10s\n", static_cast<int>(name_w), "init",
                "K", "initial", "learned", "best_epoch");
  out << buf;
  for (const auto& r : rows) {
    if (r.failed()) {
      std::snprintf(buf, sizeof(buf), "%-*s  %3d  %12s  %12s  %10s\n", static_cast<int>(name_w),
                    r.name.c_str(), r.k, "failed", "-", "-");
    } else {
      std::snprintf(buf, sizeof(buf), "%-*s  %3d  %12.6f  %12.6f  %10d\n", static_cast<int>(name_w),
                    r.name.c_str(), r.k, r.initial_test_loss, r.learned_test_loss, r.best_epoch);
    }
    out << buf;
  }
  return out.str();
}

EvalReport sweep(const std::vector<HeuristicKind>& kinds, const std::vector<int>& ks,
                 const TrainConfig& base, const Dataset& dataset, int jobs) {
  if (kinds.empty() || ks.empty()) throw ArgumentError("sweep: no cells");
  if (jobs < 1) throw ArgumentError("sweep: jobs must be positive");
  base.validate();
  if (dataset.train.empty() || dataset.test.empty()) {
    throw ArgumentError("sweep: dataset needs train and test scenes");
  }
  const auto train_scenes = prepare_scenes(dataset.train, base.plane_depth);
  const auto test_scenes = prepare_scenes(dataset.test, base.plane_depth);

  struct Cell {
    HeuristicKind kind;
    int k;
  };
  std::vector<Cell> cells;
  for (HeuristicKind kind : kinds)
    for (int k : ks) cells.push_back({kind, k});
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    const auto na = heuristic_name(a.kind), nb = heuristic_name(b.kind);
    return na != nb ? na < nb : a.k < b.k;
  });

  auto run = [&](const Cell& cell) {
    TrainConfig config = base;
    config.init = cell.kind;
    config.k = cell.k;
    SweepRow row;
    row.name = std::string(heuristic_name(cell.kind));
    row.k = cell.k;
    TrainReport report;
    try {
      report = train(config, train_scenes, test_scenes);
    } catch (const NumericalError& e) {
      // E.g. a mono family with K = 2 has rank-deficient lighting everywhere.
      row.error = e.what();
      row.initial_test_loss = row.learned_test_loss = row.final_test_loss =
          std::numeric_limits<double>::quiet_NaN();
      row.best_epoch = -1;
      return row;
    }
    row.initial_test_loss = report.initial_test_loss();
    row.learned_test_loss = report.best_test_loss();
    row.final_test_loss = report.final_test_loss();
    row.best_epoch = report.best_epoch;
    row.initial = report.initial;
    row.learned = report.best_patterns;
    row.final_patterns = report.final_patterns;
    row.learned_scenes = evaluate(report.best_patterns, dataset.test, base.plane_depth);
    return row;
  };

  EvalReport out;
  out.config = base;
  out.rows.resize(cells.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) out.rows[i] = run(cells[i]);
  } else {
    for (std::size_t start = 0; start < cells.size(); start += static_cast<std::size_t>(jobs)) {
      const std::size_t stop = std::min(cells.size(), start + static_cast<std::size_t>(jobs));
      std::vector<std::future<SweepRow>> pending;
      for (std::size_t i = start; i < stop; ++i) {
        pending.push_back(std::async(std::launch::async, run, cells[i]));
      }
      for (std::size_t i = start; i < stop; ++i) out.rows[i] = pending[i - start].get();
    }
  }
  return out;
}

Image normals_visual(const NormalMap& normals) {
  const Image& n = normals.normals;
  Image out(n.width(), n.height(), 3);
  for (int p = 0; p < n.pixel_count(); ++p) {
    if (!normals.valid.at(p)) continue;
    out.at(p, 0) = 0.5 * (n.at(p, 0) + 1.0);
    out.at(p, 1) = 0.5 * (n.at(p, 1) + 1.0);
    out.at(p, 2) = 0.5 * (1.0 - n.at(p, 2));
  }
  return out;
}

Image loss_visual(const Image& loss_map) {
  Image out(loss_map.width(), loss_map.height(), 1);
  for (int p = 0; p < loss_map.pixel_count(); ++p) out.at(p) = std::clamp(2.0 * loss_map.at(p), 0.0, 1.0);
  return out;
}

Image pattern_visual(const PatternSet& intensities, int i, int scale) {
  if (i < 0 || i >= intensities.k()) throw ArgumentError("pattern index out of range");
  const PatternSet m =
      intensities.space() == PatternSpace::kIntensity ? intensities : to_intensity(intensities);
  Image out = upscale_nearest(pattern_image(m, i), scale);
  for (int p = 0; p < out.pixel_count(); ++p)
    for (int c = 0; c < 3; ++c) out.at(p, c) = srgb_encode(out.at(p, c));
  return out;
}

std::vector<std::string> export_visuals(const VisualInputs& inputs, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create directory: " + out_dir);
  const fs::path root(out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const Image& image) {
    const std::string path = (root / name).string();
    write_png(path, image);
    written.push_back(path);
  };
  if (inputs.normals) emit("normals.png", normals_visual(*inputs.normals));
  if (inputs.albedo) {
    Image encoded = *inputs.albedo;
    for (int p = 0; p < encoded.pixel_count(); ++p)
      for (int c = 0; c < encoded.channels(); ++c)
        encoded.at(p, c) = srgb_encode(std::clamp(encoded.at(p, c), 0.0, 1.0));
    emit("albedo.png", encoded);
  }
  if (inputs.loss_map) emit("error.png", loss_visual(*inputs.loss_map));
  if (inputs.patterns) {
    for (int i = 0; i < inputs.patterns->k(); ++i) {
      emit("pattern_" + std::to_string(i) + ".png", pattern_visual(*inputs.patterns, i));
    }
  }
  return written;
}

}  // namespace dps
