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

#include <json.hpp>

#include <string>

#include "dps/geometry.hpp"
#include "dps/patterns.hpp"

namespace dps {

using Json = nlohmann::json;

Json read_json(const std::string& path);
// Two-space indentation, sorted keys and a trailing newline.
void write_json(const std::string& path, const Json& value);

Json camera_to_json(const CameraModel& camera);
CameraModel camera_from_json(const Json& j);

Json grid_to_json(const DisplayGrid& grid);
DisplayGrid grid_from_json(const Json& j);

Json patterns_to_json(const PatternSet& patterns);
PatternSet patterns_from_json(const Json& j);

// "8x4" -> {8, 4}.
std::pair<int, int> parse_grid_dims(const std::string& text);

}  // namespace dps
