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

#include "dps/polarimetry.hpp"
#include "dps/rng.hpp"

using namespace dps;

namespace {

Image constant(double v, int w = 2, int h = 2, int c = 3) { return Image(w, h, c, v); }

PolarizedCaptures captures(double i0, double i45, double i90, double i135) {
  return {constant(i0), constant(i45), constant(i90), constant(i135)};
}

}  // namespace

TEST_CASE("unpolarized light") {
  const StokesImage s = stokes_decompose(captures(0.5, 0.5, 0.5, 0.5));
  CHECK(s.s0(0, 0, 0) == 1.0);
  CHECK(s.s1(1, 1, 2) == 0.0);
  CHECK(s.s2(0, 1, 1) == 0.0);
}

TEST_CASE("partially polarized closed form") {
  const PolarizedCaptures p = captures(0.65, 0.7, 0.35, 0.3);
  const StokesImage s = stokes_decompose(p);
  CHECK(s.s0(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.s1(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.s2(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  const StokesImage paper = stokes_decompose(p, StokesMode::kPaper);
  CHECK(paper.s2(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(paper.s0(0, 0) == s.s0(0, 0));
}

TEST_CASE("zero captures") {
  const StokesImage s = stokes_decompose(captures(0, 0, 0, 0));
  CHECK(s.s0.array().abs().maxCoeff() == 0.0);
  CHECK(s.s1.array().abs().maxCoeff() == 0.0);
  CHECK(s.s2.array().abs().maxCoeff() == 0.0);
}

TEST_CASE("mismatched shapes are rejected") {
  PolarizedCaptures p = captures(0.1, 0.2, 0.3, 0.4);
  p.i90 = constant(0.3, 3, 2);
  CHECK_THROWS_AS(stokes_decompose(p), ArgumentError);
  CHECK_THROWS_AS(simulate_polarized(constant(1), constant(1, 3, 2)), ArgumentError);
  CHECK_THROWS_AS(ambient_subtract(constant(1), constant(1, 3, 2)), ArgumentError);
}

TEST_CASE("separation examples") {
  auto run = [](double s0, double s1, double s2) {
    StokesImage s{constant(s0, 1, 1, 1), constant(s1, 1, 1, 1), constant(s2, 1, 1, 1)};
    return separate(s);
  };
  Separation a = run(1, 0.3, 0.4);
  CHECK(a.specular(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.diffuse(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.valid(0, 0) == 1);
  Separation b = run(1, 0, 0);
  CHECK(b.specular(0, 0) == 0.0);
  CHECK(b.diffuse(0, 0) == 1.0);
  Separation c = run(0.4, 0.3, 0.4);
  CHECK(c.specular(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.diffuse(0, 0) == 0.0);
  CHECK(c.valid(0, 0) == 0);
}

TEST_CASE("Malus forward model") {
  SUBCASE("pure diffuse") {
    const PolarizedCaptures p = simulate_polarized(constant(1), constant(0));
    for (const Image* im : {&p.i0, &p.i45, &p.i90, &p.i135}) CHECK((*im)(0, 0) == 0.5);
  }
  SUBCASE("pure specular") {
    const PolarizedCaptures p = simulate_polarized(constant(0), constant(1));
    CHECK(p.i0(0, 0) == doctest::Approx(1.0));
    CHECK(p.i45(0, 0) == doctest::Approx(0.5));
    CHECK(std::abs(p.i90(0, 0)) < 1e-15);
    CHECK(p.i135(0, 0) == doctest::Approx(0.5));
  }
  SUBCASE("mixed round trip") {
    const PolarizedCaptures p = simulate_polarized(constant(0.5), constant(0.5));
    CHECK(p.i0(0, 0) == doctest::Approx(0.75));
    CHECK(p.i45(0, 0) == doctest::Approx(0.5));
    CHECK(p.i90(0, 0) == doctest::Approx(0.25));
    CHECK(p.i135(0, 0) == doctest::Approx(0.5));
    const Separation s = separate(stokes_decompose(p));
    CHECK(s.diffuse(1, 1, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.specular(1, 1, 2) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("round trip over random pixels and angles") {
  Rng rng(17);
  const int w = 64, h = 32;
  for (double aolp : {0.0, 13.0, 45.0, 90.0, 171.5}) {
    Image d(w, h, 3), s(w, h, 3);
    for (Eigen::Index i = 0; i < d.array().size(); ++i) {
      d.array()[i] = rng.uniform(0.0, 2.0);
      s.array()[i] = rng.uniform(0.0, 2.0);
    }
    const Separation out = separate(stokes_decompose(simulate_polarized(d, s, aolp)));
    CHECK((out.diffuse.array() - d.array()).abs().maxCoeff() < 1e-9);
    CHECK((out.specular.array() - s.array()).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("stokes decomposition is linear") {
  Rng rng(5);
  auto random_captures = [&] {
    PolarizedCaptures p = captures(0, 0, 0, 0);
    for (Image* im : {&p.i0, &p.i45, &p.i90, &p.i135})
      for (Eigen::Index i = 0; i < im->array().size(); ++i) im->array()[i] = rng.uniform();
    return p;
  };
  const PolarizedCaptures a = random_captures(), b = random_captures();
  PolarizedCaptures sum = a;
  const double alpha = 0.7, beta = 1.9;
  sum.i0.array() = alpha * a.i0.array() + beta * b.i0.array();
  sum.i45.array() = alpha * a.i45.array() + beta * b.i45.array();
  sum.i90.array() = alpha * a.i90.array() + beta * b.i90.array();
  sum.i135.array() = alpha * a.i135.array() + beta * b.i135.array();
  for (StokesMode mode : {StokesMode::kStandard, StokesMode::kPaper}) {
    const StokesImage sa = stokes_decompose(a, mode), sb = stokes_decompose(b, mode),
                      ss = stokes_decompose(sum, mode);
    CHECK((ss.s0.array() - alpha * sa.s0.array() - beta * sb.s0.array()).abs().maxCoeff() < 1e-14);
    CHECK((ss.s1.array() - alpha * sa.s1.array() - beta * sb.s1.array()).abs().maxCoeff() < 1e-14);
    CHECK((ss.s2.array() - alpha * sa.s2.array() - beta * sb.s2.array()).abs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("separation outputs are non-negative") {
  Rng rng(23);
  StokesImage s{Image(16, 16, 3), Image(16, 16, 3), Image(16, 16, 3)};
  for (Eigen::Index i = 0; i < s.s0.array().size(); ++i) {
    s.s0.array()[i] = rng.uniform(0, 1);
    s.s1.array()[i] = rng.uniform(-1, 1);
    s.s2.array()[i] = rng.uniform(-1, 1);
  }
  const Separation out = separate(s);
  CHECK(out.diffuse.array().minCoeff() >= 0.0);
  CHECK(out.specular.array().minCoeff() >= 0.0);
}

TEST_CASE("ambient subtraction") {
  CHECK(ambient_subtract(constant(0.3), constant(0.3)).array().abs().maxCoeff() == 0.0);
  CHECK(ambient_subtract(constant(0.8), constant(0.3))(1, 0, 1) == doctest::Approx(0.5));
  CHECK(ambient_subtract(constant(0.2), constant(0.3))(0, 1, 2) == 0.0);
}

TEST_CASE("negative captures are rejected") {
  PolarizedCaptures p = captures(0.1, 0.2, 0.3, 0.4);
  p.i45(0, 0, 0) = -0.1;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}
