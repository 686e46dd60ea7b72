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

#include "dps/json_io.hpp"

#include <fstream>
#include <sstream>

namespace dps {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ArgumentError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("bad field \"") + key + "\": " + e.what());
  }
}

}  // namespace

Json camera_to_json(const CameraModel& camera) {
  Json j = Json::object();
  j["fx"] = camera.fx;
  j["fy"] = camera.fy;
  j["cx"] = camera.cx;
  j["cy"] = camera.cy;
  j["width"] = camera.width;
  j["height"] = camera.height;
  return j;
}

CameraModel camera_from_json(const Json& j) {
  CameraModel camera;
  camera.fx = field<double>(j, "fx");
  camera.fy = field<double>(j, "fy");
  camera.cx = field<double>(j, "cx");
  camera.cy = field<double>(j, "cy");
  camera.width = field<int>(j, "width");
  camera.height = field<int>(j, "height");
  camera.validate();
  return camera;
}

Json grid_to_json(const DisplayGrid& grid) {
  Json j = Json::object();
  j["cols"] = grid.cols;
  j["rows"] = grid.rows;
  Json positions = Json::array();
  for (const auto& p : grid.positions) positions.push_back({p.x(), p.y(), p.z()});
  j["positions"] = positions;
  return j;
}

DisplayGrid grid_from_json(const Json& j) {
  DisplayGrid grid;
  grid.cols = field<int>(j, "cols");
  grid.rows = field<int>(j, "rows");
  for (const auto& p : field<Json>(j, "positions")) {
    const auto v = p.get<std::vector<double>>();
    if (v.size() != 3) throw ArgumentError("display position must have 3 coordinates");
    grid.positions.emplace_back(v[0], v[1], v[2]);
  }
  grid.validate();
  return grid;
}

Json patterns_to_json(const PatternSet& patterns) {
  Json j = Json::object();
  j["grid"] = {{"cols", patterns.cols()}, {"rows", patterns.rows()}};
  j["K"] = patterns.k();
  j["space"] = patterns.space() == PatternSpace::kLogit ? "logit" : "intensity";
  j["seed"] = patterns.seed();
  Json values = Json::array();
  for (int i = 0; i < patterns.k(); ++i) {
    Json pattern = Json::array();
    for (int s = 0; s < patterns.superpixels(); ++s)
      pattern.push_back({patterns(i, s, 0), patterns(i, s, 1), patterns(i, s, 2)});
    values.push_back(pattern);
  }
  j["values"] = values;
  return j;
}

PatternSet patterns_from_json(const Json& j) {
  const Json grid = field<Json>(j, "grid");
  const int cols = field<int>(grid, "cols");
  const int rows = field<int>(grid, "rows");
  const int k = field<int>(j, "K");
  const std::string space = field<std::string>(j, "space");
  if (space != "logit" && space != "intensity") throw ArgumentError("unknown pattern space: " + space);
  PatternSet out(k, cols, rows, space == "logit" ? PatternSpace::kLogit : PatternSpace::kIntensity);
  if (j.contains("seed")) out.set_seed(j.at("seed").get<std::uint64_t>());
  const Json values = field<Json>(j, "values");
  if (static_cast<int>(values.size()) != k) throw ArgumentError("pattern values: expected K entries");
  for (int i = 0; i < k; ++i) {
    const Json& pattern = values[static_cast<std::size_t>(i)];
    if (static_cast<int>(pattern.size()) != cols * rows) {
      throw ArgumentError("pattern values: expected P superpixels per pattern");
    }
    for (int s = 0; s < cols * rows; ++s) {
      const auto rgb = pattern[static_cast<std::size_t>(s)].get<std::vector<double>>();
      if (rgb.size() != 3) throw ArgumentError("pattern values: expected RGB triples");
      for (int c = 0; c < 3; ++c) out(i, s, c) = rgb[static_cast<std::size_t>(c)];
    }
  }
  out.validate();
  return out;
}

std::pair<int, int> parse_grid_dims(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int cols = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    const int rows = std::stoi(rest, &used);
    if (used != rest.size() || cols < 1 || rows < 1) throw std::invalid_argument(text);
    return {cols, rows};
  } catch (const std::exception&) {
    throw ArgumentError("grid must look like COLSxROWS, got \"" + text + "\"");
  }
}

}  // namespace dps
