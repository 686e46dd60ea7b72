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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "dps/json_io.hpp"
#include "dps/patterns.hpp"

using namespace dps;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("'") + DPS_CLI_PATH + "' --quiet " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "dps_test_cli") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("exit codes") {
  TempDir tmp;
  const fs::path& d = tmp.path;
  write_json((d / "ds.json").string(),
             {{"train", 1}, {"test", 1}, {"resolution", 12}, {"focal_px", 20.0}, {"cols", 4}, {"rows", 2}});
  REQUIRE(run("--config " + q(d / "ds.json") + " dataset gen --out " + q(d / "ds")) == 0);
  CHECK(fs::exists(d / "ds" / "manifest.json"));

  CHECK(run("patterns init --kind olat --k 4 --grid 4x2 --out " + q(d / "olat.json")) == 0);
  CHECK(patterns_from_json(read_json((d / "olat.json").string())).k() == 4);
  CHECK(run("eval --patterns " + q(d / "olat.json") + " --dataset " + q(d / "ds" / "manifest.json") +
            " --out " + q(d / "eval.json")) == 0);

  // Argument errors.
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("patterns init --kind nope --out " + q(d / "x.json")) == 2);
  CHECK(run("patterns init --kind olat --grid 4by2 --out " + q(d / "x.json")) == 2);
  CHECK(run("separate --i0 a.pfm") == 2);

  // I/O errors.
  CHECK(run("eval --patterns " + q(d / "missing.json") + " --dataset " +
            q(d / "ds" / "manifest.json")) == 3);
  CHECK(run("patterns init --kind olat --grid 4x2 --out /proc/dps/x.json") == 3);

  // Identical patterns light every pixel from one direction.
  write_json((d / "flat.json").string(),
             patterns_to_json(PatternSet(3, 4, 2, PatternSpace::kIntensity, 0.5)));
  CHECK(run("eval --patterns " + q(d / "flat.json") + " --dataset " +
            q(d / "ds" / "manifest.json")) == 4);
}

TEST_CASE("help and version") {
  CHECK(run("--help") == 0);
  CHECK(run("--version") == 0);
}
