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

#include "dps/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dps/rng.hpp"

namespace dps {

PatternSet::PatternSet(int k, int cols, int rows, PatternSpace space, double fill)
    : k_(k), cols_(cols), rows_(rows), space_(space) {
  if (k < 1 || cols < 1 || rows < 1) throw ArgumentError("pattern set dimensions must be positive");
  for (auto& ch : channels_) ch = Eigen::MatrixXd::Constant(k, cols * rows, fill);
}

Eigen::VectorXd PatternSet::flatten() const {
  const int p = superpixels();
  Eigen::VectorXd out(static_cast<Eigen::Index>(k_) * p * 3);
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < p; ++j)
      for (int c = 0; c < 3; ++c) out[(static_cast<Eigen::Index>(i) * p + j) * 3 + c] = (*this)(i, j, c);
  return out;
}

void PatternSet::unflatten(const Eigen::VectorXd& values) {
  const int p = superpixels();
  if (values.size() != static_cast<Eigen::Index>(k_) * p * 3) {
    throw ArgumentError("flattened pattern size mismatch");
  }
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < p; ++j)
      for (int c = 0; c < 3; ++c) (*this)(i, j, c) = values[(static_cast<Eigen::Index>(i) * p + j) * 3 + c];
}

void PatternSet::validate() const {
  if (k_ < 2) throw ArgumentError("a pattern set needs K >= 2");
  for (const auto& ch : channels_) {
    if (ch.rows() != k_ || ch.cols() != superpixels()) {
      throw ArgumentError("pattern matrix shape mismatch");
    }
    if (!ch.allFinite()) throw ArgumentError("pattern values must be finite");
    if (space_ == PatternSpace::kIntensity && (ch.minCoeff() < 0.0 || ch.maxCoeff() > 1.0)) {
      throw ArgumentError("intensity patterns must lie in [0, 1]");
    }
  }
}

PatternSet to_intensity(const PatternSet& patterns) {
  if (patterns.space() == PatternSpace::kIntensity) return patterns;
  PatternSet out(patterns.k(), patterns.cols(), patterns.rows(), PatternSpace::kIntensity);
  out.set_seed(patterns.seed());
  for (int c = 0; c < 3; ++c) out.channel(c) = patterns.channel(c).unaryExpr(&sigmoid);
  return out;
}

PatternSet to_logit(const PatternSet& patterns, double clamp_lo) {
  if (patterns.space() == PatternSpace::kLogit) return patterns;
  PatternSet out(patterns.k(), patterns.cols(), patterns.rows(), PatternSpace::kLogit);
  out.set_seed(patterns.seed());
  const double hi = 1.0 - clamp_lo;
  for (int c = 0; c < 3; ++c) {
    out.channel(c) =
        patterns.channel(c).unaryExpr([&](double v) { return logit(std::clamp(v, clamp_lo, hi)); });
  }
  return out;
}

const std::vector<HeuristicKind>& heuristic_catalog() {
  static const std::vector<HeuristicKind> kinds = {
      HeuristicKind::kOlat,          HeuristicKind::kGroupOlat,
      HeuristicKind::kMonoGradient,  HeuristicKind::kMonoComplementary,
      HeuristicKind::kTriGradient,   HeuristicKind::kTriComplementary,
      HeuristicKind::kFlatGray,      HeuristicKind::kMonoRandom,
      HeuristicKind::kTriRandom,
  };
  return kinds;
}

std::string_view heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kOlat: return "olat";
    case HeuristicKind::kGroupOlat: return "group-olat";
    case HeuristicKind::kMonoGradient: return "mono-gradient";
    case HeuristicKind::kMonoComplementary: return "mono-complementary";
    case HeuristicKind::kTriComplementary: return "tri-complementary";
    case HeuristicKind::kTriGradient: return "tri-gradient";
    case HeuristicKind::kMonoRandom: return "mono-random";
    case HeuristicKind::kTriRandom: return "tri-random";
    case HeuristicKind::kFlatGray: return "flat-gray";
  }
  return "unknown";
}

HeuristicKind parse_heuristic(std::string_view name) {
  for (HeuristicKind kind : heuristic_catalog()) {
    if (heuristic_name(kind) == name) return kind;
  }
  throw ArgumentError("unknown pattern kind: " + std::string(name));
}

int default_pattern_count(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kTriComplementary:
    case HeuristicKind::kTriGradient:
    case HeuristicKind::kTriRandom:
      return 2;
    default:
      return 4;
  }
}

namespace {

constexpr double kLow = 0.1;
constexpr double kHigh = 0.9;

double ramp(int i, int n) { return n == 1 ? 0.5 * (kLow + kHigh) : kLow + (kHigh - kLow) * i / (n - 1.0); }

// Upper half of an axis (the middle cell of an odd axis counts as lower).
bool upper_half(int i, int n) { return 2 * i + 1 > n; }

double binary(bool on) { return on ? kHigh : kLow; }

// Boundary cells clockwise from the top-left corner.
std::vector<int> boundary_cells(int cols, int rows) {
  std::vector<int> cells;
  for (int c = 0; c < cols; ++c) cells.push_back(c);
  for (int r = 1; r < rows; ++r) cells.push_back(r * cols + cols - 1);
  if (rows > 1)
    for (int c = cols - 2; c >= 0; --c) cells.push_back((rows - 1) * cols + c);
  if (cols > 1)
    for (int r = rows - 2; r >= 1; --r) cells.push_back(r * cols);
  return cells;
}

void set_mono(PatternSet& out, int i, int j, double v) {
  for (int c = 0; c < 3; ++c) out(i, j, c) = v;
}

}  // namespace

PatternSet init_heuristic(HeuristicKind kind, int k, int cols, int rows, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("a pattern set needs K >= 2");
  if (cols < 1 || rows < 1 || cols * rows < 2) throw ArgumentError("grid needs P >= 2");

  PatternSet out(k, cols, rows, PatternSpace::kIntensity, kLow);
  out.set_seed(seed);
  const int p = cols * rows;
  Rng rng(seed);

  switch (kind) {
    case HeuristicKind::kOlat: {
      const std::vector<int> cells = boundary_cells(cols, rows);
      const int nb = static_cast<int>(cells.size());
      if (k > nb) {
        throw ArgumentError("OLAT needs K <= " + std::to_string(nb) + " boundary superpixels");
      }
      for (int i = 0; i < k; ++i) {
        set_mono(out, i, cells[static_cast<std::size_t>(i * nb / k)], kHigh);
      }
      break;
    }
    case HeuristicKind::kGroupOlat: {
      const int gx = std::max(1, static_cast<int>(std::ceil(std::sqrt(double(k) * cols / rows))));
      const int gy = (k + gx - 1) / gx;
      for (int i = 0; i < k; ++i) {
        const int ax = i % gx;
        const int ay = i / gx;
        auto center = [](int a, int g, int n) {
          const int c = static_cast<int>(std::lround((a + 0.5) * n / g - 0.5));
          return n >= 3 ? std::clamp(c, 1, n - 2) : std::clamp(c, 0, n - 1);
        };
        const int cx = center(ax, gx, cols);
        const int cy = center(ay, gy, rows);
        for (int r = std::max(0, cy - 1); r <= std::min(rows - 1, cy + 1); ++r)
          for (int c = std::max(0, cx - 1); c <= std::min(cols - 1, cx + 1); ++c)
            set_mono(out, i, r * cols + c, kHigh);
      }
      break;
    }
    case HeuristicKind::kMonoGradient:
      // x forward, x backward, y forward, y backward, repeating.
      for (int i = 0; i < k; ++i)
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) {
            double v = 0.0;
            switch (i % 4) {
              case 0: v = ramp(c, cols); break;
              case 1: v = ramp(cols - 1 - c, cols); break;
              case 2: v = ramp(r, rows); break;
              default: v = ramp(rows - 1 - r, rows); break;
            }
            set_mono(out, i, r * cols + c, v);
          }
      break;
    case HeuristicKind::kMonoComplementary:
      for (int i = 0; i < k; ++i)
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) {
            bool on = false;
            switch (i % 4) {
              case 0: on = upper_half(c, cols); break;
              case 1: on = !upper_half(c, cols); break;
              case 2: on = upper_half(r, rows); break;
              default: on = !upper_half(r, rows); break;
            }
            set_mono(out, i, r * cols + c, binary(on));
          }
      break;
    case HeuristicKind::kTriComplementary:
      for (int i = 0; i < k; ++i) {
        const bool flip = (i % 2) == 1;
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) {
            const int j = r * cols + c;
            const bool ux = upper_half(c, cols);
            const bool uy = upper_half(r, rows);
            out(i, j, 0) = binary(ux != flip);
            out(i, j, 1) = binary((ux == uy) != flip);  // diagonal quadrant pairs
            out(i, j, 2) = binary(uy != flip);
          }
      }
      break;
    case HeuristicKind::kTriGradient: {
      const double hx = 0.5 * (cols - 1);
      const double hy = 0.5 * (rows - 1);
      double max_rad = 0.0;
      std::vector<double> rad(static_cast<std::size_t>(p));
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          const double u = hx > 0 ? (c - hx) / hx : 0.0;
          const double v = hy > 0 ? (r - hy) / hy : 0.0;
          rad[static_cast<std::size_t>(r * cols + c)] = std::hypot(u, v);
          max_rad = std::max(max_rad, std::hypot(u, v));
        }
      for (int i = 0; i < k; ++i) {
        const bool flip = (i % 2) == 1;
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) {
            const int j = r * cols + c;
            const double t = max_rad > 0 ? rad[static_cast<std::size_t>(j)] / max_rad : 0.5;
            out(i, j, 0) = flip ? ramp(cols - 1 - c, cols) : ramp(c, cols);
            out(i, j, 1) = kLow + (kHigh - kLow) * (flip ? 1.0 - t : t);
            out(i, j, 2) = flip ? ramp(rows - 1 - r, rows) : ramp(r, rows);
          }
      }
      break;
    }
    case HeuristicKind::kMonoRandom:
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < p; ++j) set_mono(out, i, j, kLow + (kHigh - kLow) * rng.uniform());
      break;
    case HeuristicKind::kTriRandom:
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < p; ++j)
          for (int c = 0; c < 3; ++c) out(i, j, c) = kLow + (kHigh - kLow) * rng.uniform();
      break;
    case HeuristicKind::kFlatGray:
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < p; ++j) set_mono(out, i, j, std::clamp(rng.normal(0.5, 0.01), 0.0, 1.0));
      break;
  }
  return out;
}

PatternSet from_image_stack(const std::vector<Image>& images, int cols, int rows) {
  if (images.empty()) throw ArgumentError("empty image stack");
  if (cols < 1 || rows < 1) throw ArgumentError("grid dimensions must be positive");
  PatternSet out(static_cast<int>(images.size()), cols, rows, PatternSpace::kIntensity);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image& img = images[i];
    if (img.width() < cols || img.height() < rows) {
      throw ArgumentError("image smaller than the superpixel grid");
    }
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int x0 = c * img.width() / cols, x1 = (c + 1) * img.width() / cols;
        const int y0 = r * img.height() / rows, y1 = (r + 1) * img.height() / rows;
        for (int ch = 0; ch < 3; ++ch) {
          const int src = img.channels() == 1 ? 0 : ch;
          double sum = 0.0;
          for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) sum += img(x, y, src);
          out(static_cast<int>(i), r * cols + c, ch) =
              std::clamp(sum / ((x1 - x0) * (y1 - y0)), 0.0, 1.0);
        }
      }
  }
  return out;
}

Image pattern_image(const PatternSet& patterns, int index) {
  if (index < 0 || index >= patterns.k()) throw ArgumentError("pattern index out of range");
  const PatternSet intensity = to_intensity(patterns);
  Image img(patterns.cols(), patterns.rows(), 3);
  for (int r = 0; r < patterns.rows(); ++r)
    for (int c = 0; c < patterns.cols(); ++c)
      for (int ch = 0; ch < 3; ++ch) img(c, r, ch) = intensity(index, r * patterns.cols() + c, ch);
  return img;
}

}  // namespace dps
