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

#include <cmath>
#include <set>

#include "dps/json_io.hpp"
#include "dps/patterns.hpp"
#include "dps/rng.hpp"

using namespace dps;

TEST_CASE("sigmoid midpoint, saturation and inverse") {
  PatternSet p(2, 2, 1, PatternSpace::kLogit);
  p(0, 0, 0) = 0.0;
  p(0, 1, 0) = 50.0;
  p(1, 0, 0) = -2.1972;
  p(1, 1, 0) = 2.1972;
  const PatternSet m = to_intensity(p);
  CHECK(m.space() == PatternSpace::kIntensity);
  CHECK(m(0, 0, 0) == 0.5);
  CHECK(std::abs(m(0, 1, 0) - 1.0) < 1e-12);
  CHECK(std::abs(m(1, 0, 0) - 0.1) < 1e-4);
  CHECK(std::abs(m(1, 1, 0) - 0.9) < 1e-4);
}

TEST_CASE("to_intensity is the identity on intensities") {
  const PatternSet m = init_heuristic(HeuristicKind::kTriRandom, 3, 4, 2, 5);
  CHECK(to_intensity(m).flatten() == m.flatten());
}

TEST_CASE("sigmoid is monotone, bounded and finite at extremes") {
  double prev = -1.0;
  for (double x = -800.0; x <= 800.0; x += 0.37) {
    const double s = sigmoid(x);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("logit round trips on [0.01, 0.99]") {
  for (double p = 0.01; p <= 0.99; p += 0.001) CHECK(std::abs(sigmoid(logit(p)) - p) < 1e-9);
  PatternSet m = init_heuristic(HeuristicKind::kMonoRandom, 4, 3, 3, 2);
  const PatternSet back = to_intensity(to_logit(m));
  CHECK((back.flatten() - m.flatten()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("to_logit clamps saturated values") {
  PatternSet m(2, 2, 1, PatternSpace::kIntensity, 0.0);
  m(1, 1, 2) = 1.0;
  const PatternSet l = to_logit(m);
  CHECK(l.flatten().allFinite());
  CHECK(std::abs(sigmoid(l(0, 0, 0)) - 0.01) < 1e-12);
  CHECK(std::abs(sigmoid(l(1, 1, 2)) - 0.99) < 1e-12);
}

TEST_CASE("flatten order is (pattern, superpixel, channel)") {
  PatternSet m(2, 3, 1, PatternSpace::kIntensity);
  m(1, 2, 1) = 0.25;
  const Eigen::VectorXd v = m.flatten();
  CHECK(v.size() == 18);
  CHECK(v[(1 * 3 + 2) * 3 + 1] == 0.25);
  PatternSet n(2, 3, 1, PatternSpace::kIntensity);
  n.unflatten(v);
  CHECK(n(1, 2, 1) == 0.25);
}

TEST_CASE("pattern set validation") {
  CHECK_THROWS_AS(PatternSet(1, 2, 2, PatternSpace::kIntensity).validate(), ArgumentError);
  PatternSet m(2, 2, 2, PatternSpace::kIntensity, 0.5);
  m(0, 0, 0) = 1.5;
  CHECK_THROWS_AS(m.validate(), ArgumentError);
  PatternSet l(2, 2, 2, PatternSpace::kLogit, 0.5);
  l(0, 0, 0) = 1.5;
  CHECK_NOTHROW(l.validate());
}

TEST_CASE("OLAT: one boundary superpixel at 0.9 per pattern") {
  const PatternSet m = init_heuristic(HeuristicKind::kOlat, 4, 8, 4);
  std::set<int> lit;
  for (int i = 0; i < 4; ++i) {
    int on = 0;
    for (int j = 0; j < 32; ++j) {
      CHECK(m(i, j, 0) == m(i, j, 1));
      CHECK(m(i, j, 0) == m(i, j, 2));
      if (m(i, j, 0) == 0.9) {
        ++on;
        lit.insert(j);
        const int c = j % 8, r = j / 8;
        CHECK((c == 0 || c == 7 || r == 0 || r == 3));
      } else {
        CHECK(m(i, j, 0) == 0.1);
      }
    }
    CHECK(on == 1);
  }
  CHECK(lit.size() == 4);
}

TEST_CASE("OLAT patterns differ pairwise in the lit position") {
  const PatternSet m = init_heuristic(HeuristicKind::kOlat, 6, 5, 4);
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b) {
      int diff = 0;
      for (int j = 0; j < 20; ++j) diff += m(a, j, 0) != m(b, j, 0);
      CHECK(diff == 2);
    }
}

TEST_CASE("OLAT cannot exceed the boundary") {
  CHECK_THROWS_AS(init_heuristic(HeuristicKind::kOlat, 11, 3, 3), ArgumentError);
}

TEST_CASE("group OLAT lights 3x3 blocks") {
  const PatternSet m = init_heuristic(HeuristicKind::kGroupOlat, 4, 8, 4);
  for (int i = 0; i < 4; ++i) {
    int on = 0;
    for (int j = 0; j < 32; ++j) on += m(i, j, 0) == 0.9;
    CHECK(on == 9);
  }
}

TEST_CASE("flat gray: clamped N(0.5, 0.01), channels equal") {
  const PatternSet m = init_heuristic(HeuristicKind::kFlatGray, 4, 16, 9, 7);
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 144; ++j) {
      CHECK(m(i, j, 0) == m(i, j, 1));
      CHECK(m(i, j, 1) == m(i, j, 2));
      sum += m(i, j, 0);
      sq += m(i, j, 0) * m(i, j, 0);
      ++n;
    }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 0.02);
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(sd > 0.007);
  CHECK(sd < 0.013);
}

TEST_CASE("mono gradient ramps") {
  const PatternSet m = init_heuristic(HeuristicKind::kMonoGradient, 4, 5, 3);
  auto at = [&](int i, int c, int r) { return m(i, r * 5 + c, 0); };
  CHECK(at(0, 0, 1) == doctest::Approx(0.1));
  CHECK(at(0, 4, 1) == doctest::Approx(0.9));
  CHECK(at(0, 2, 0) == doctest::Approx(0.5));
  CHECK(at(1, 0, 2) == doctest::Approx(0.9));
  CHECK(at(1, 4, 0) == doctest::Approx(0.1));
  CHECK(at(2, 3, 0) == doctest::Approx(0.1));
  CHECK(at(2, 3, 2) == doctest::Approx(0.9));
  CHECK(at(3, 1, 0) == doctest::Approx(0.9));
  CHECK(at(3, 1, 2) == doctest::Approx(0.1));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 15; ++j) {
      CHECK(m(i, j, 0) == m(i, j, 2));
      // Linear along the ramp axis.
      if (i == 0 && j % 5 > 0) CHECK(m(i, j, 0) - m(i, j - 1, 0) == doctest::Approx(0.2));
    }
}

TEST_CASE("complementary families pair up") {
  const PatternSet mono = init_heuristic(HeuristicKind::kMonoComplementary, 4, 8, 4);
  const PatternSet tri = init_heuristic(HeuristicKind::kTriComplementary, 2, 8, 4);
  for (int j = 0; j < 32; ++j) {
    CHECK(mono(0, j, 0) + mono(1, j, 0) == doctest::Approx(1.0));
    CHECK(mono(2, j, 0) + mono(3, j, 0) == doctest::Approx(1.0));
    for (int c = 0; c < 3; ++c) CHECK(tri(0, j, c) + tri(1, j, c) == doctest::Approx(1.0));
  }
  // Red splits columns, blue splits rows.
  CHECK(tri(0, 0, 0) == 0.1);
  CHECK(tri(0, 7, 0) == 0.9);
  CHECK(tri(0, 0, 2) == 0.1);
  CHECK(tri(0, 24, 2) == 0.9);
}

TEST_CASE("tri gradient channels") {
  const PatternSet m = init_heuristic(HeuristicKind::kTriGradient, 2, 9, 5);
  const int center = 2 * 9 + 4;
  CHECK(m(0, center, 1) == doctest::Approx(0.1));  // green grows from the center
  CHECK(m(0, 0, 1) == doctest::Approx(0.9));
  CHECK(m(0, 0, 0) == doctest::Approx(0.1));
  CHECK(m(0, 8, 0) == doctest::Approx(0.9));
  CHECK(m(0, 44, 2) == doctest::Approx(0.9));
  for (int j = 0; j < 45; ++j)
    for (int c = 0; c < 3; ++c) CHECK(m(0, j, c) + m(1, j, c) == doctest::Approx(1.0));
}

TEST_CASE("catalog values stay in [0.1, 0.9] and are reproducible") {
  for (HeuristicKind kind : heuristic_catalog()) {
    const int k = default_pattern_count(kind);
    const PatternSet a = init_heuristic(kind, k, 8, 4, 11);
    const PatternSet b = init_heuristic(kind, k, 8, 4, 11);
    CHECK(a.flatten() == b.flatten());
    CHECK(a.k() == k);
    if (kind == HeuristicKind::kFlatGray) {
      CHECK(a.flatten().minCoeff() >= 0.0);
      CHECK(a.flatten().maxCoeff() <= 1.0);
    } else {
      CHECK(a.flatten().minCoeff() >= 0.1 - 1e-15);
      CHECK(a.flatten().maxCoeff() <= 0.9 + 1e-15);
    }
  }
}

TEST_CASE("random families depend on the seed") {
  const PatternSet a = init_heuristic(HeuristicKind::kTriRandom, 2, 8, 4, 1);
  const PatternSet b = init_heuristic(HeuristicKind::kTriRandom, 2, 8, 4, 2);
  CHECK(a.flatten() != b.flatten());
  const PatternSet mono = init_heuristic(HeuristicKind::kMonoRandom, 4, 8, 4, 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 32; ++j) CHECK(mono(i, j, 0) == mono(i, j, 2));
}

TEST_CASE("catalog names round trip") {
  CHECK(heuristic_catalog().size() == 9);
  for (HeuristicKind kind : heuristic_catalog()) CHECK(parse_heuristic(heuristic_name(kind)) == kind);
  CHECK_THROWS_AS(parse_heuristic("spiral"), ArgumentError);
}

TEST_CASE("from_image_stack block means") {
  SUBCASE("white image") {
    const PatternSet m = from_image_stack({Image(16, 8, 3, 1.0)}, 4, 2);
    CHECK(m.flatten().minCoeff() == 1.0);
  }
  SUBCASE("left/right halves") {
    Image img(10, 4, 3, 0.0);
    for (int y = 0; y < 4; ++y)
      for (int x = 5; x < 10; ++x)
        for (int c = 0; c < 3; ++c) img(x, y, c) = 1.0;
    const PatternSet m = from_image_stack({img}, 2, 1);
    for (int c = 0; c < 3; ++c) {
      CHECK(m(0, 0, c) == 0.0);
      CHECK(m(0, 1, c) == 1.0);
    }
  }
  SUBCASE("checkerboard averages to gray") {
    Image img(4, 4, 1, 0.0);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) img(x, y) = (x + y) % 2;
    const PatternSet m = from_image_stack({img}, 2, 2);
    CHECK(m.flatten().minCoeff() == 0.5);
    CHECK(m.flatten().maxCoeff() == 0.5);
  }
  SUBCASE("empty stack") { CHECK_THROWS_AS(from_image_stack({}, 2, 2), ArgumentError); }
}

TEST_CASE("pattern JSON round trip") {
  PatternSet m = init_heuristic(HeuristicKind::kTriRandom, 3, 5, 2, 9);
  const Json j = patterns_to_json(m);
  CHECK(j.at("K") == 3);
  CHECK(j.at("grid").at("cols") == 5);
  CHECK(j.at("space") == "intensity");
  CHECK(j.at("seed") == 9);
  CHECK(j.at("values").size() == 3);
  CHECK(j.at("values")[0].size() == 10);
  CHECK(j.at("values")[0][0].size() == 3);
  const PatternSet back = patterns_from_json(j);
  CHECK(back.flatten() == m.flatten());
  CHECK(back.seed() == 9);
}
