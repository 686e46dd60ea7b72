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

// Command-line front end for the dps library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dps/calib.hpp"
#include "dps/dataset.hpp"
#include "dps/errors.hpp"
#include "dps/eval.hpp"
#include "dps/image_io.hpp"
#include "dps/json_io.hpp"
#include "dps/learner.hpp"
#include "dps/mesh.hpp"
#include "dps/patterns.hpp"
#include "dps/photostereo.hpp"
#include "dps/polarimetry.hpp"
#include "dps/posefit.hpp"

namespace fs = std::filesystem;
using namespace dps;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  bool quiet = false;
};

Globals g;

std::ostream& out() {
  static std::ostringstream sink;
  if (g.quiet) {
    sink.str("");
    return sink;
  }
  return std::cout;
}

std::string numbered(const char* prefix, int n, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%03d%s", prefix, n, suffix);
  return buf;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

Json config_json() {
  if (g.config.empty()) return Json::object();
  return read_json(g.config);
}

PatternSet load_intensities(const std::string& path) {
  const PatternSet p = patterns_from_json(read_json(path));
  return p.space() == PatternSpace::kLogit ? to_intensity(p) : p;
}

void write_pattern_pngs(const PatternSet& intensities, const fs::path& dir, const std::string& stem) {
  for (int i = 0; i < intensities.k(); ++i) {
    write_png((dir / (stem + std::to_string(i) + ".png")).string(), pattern_visual(intensities, i));
  }
}

// dataset gen ----------------------------------------------------------------

struct DatasetGenArgs {
  std::string out;
};

void run_dataset_gen(const DatasetGenArgs& a) {
  DatasetConfig c = DatasetConfig::from_json(config_json());
  if (g.seed) c.seed = *g.seed;
  const Dataset ds = dataset_generate(c, a.out);
  out() << "wrote " << ds.train.size() << " train and " << ds.test.size() << " test scenes to "
        << a.out << "\n";
}

// patterns init --------------------------------------------------------------

struct PatternsInitArgs {
  std::string kind;
  int k = 4;
  std::string grid = "8x4";
  std::string out;
  std::string png_dir;
};

void run_patterns_init(const PatternsInitArgs& a) {
  const auto [cols, rows] = parse_grid_dims(a.grid);
  const PatternSet p = init_heuristic(parse_heuristic(a.kind), a.k, cols, rows, g.seed.value_or(0));
  write_json(a.out, patterns_to_json(p));
  if (!a.png_dir.empty()) {
    make_dir(a.png_dir);
    write_pattern_pngs(p, a.png_dir, "pattern_");
  }
  out() << "wrote " << a.kind << " K=" << a.k << " to " << a.out << "\n";
}

// train ----------------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string out;
};

void run_train(const TrainArgs& a) {
  TrainConfig c = TrainConfig::from_json(config_json());
  if (g.seed) c.seed = *g.seed;
  const Dataset ds = load_dataset(a.dataset);
  const fs::path dir(a.out);
  make_dir(dir);
  const TrainReport r = train(c, ds, [](const EpochRecord& e) {
    out() << "epoch " << e.epoch << " lr " << e.learning_rate << " train " << e.train_loss
          << " test " << e.test_loss << "\n";
  });
  for (std::size_t e = 0; e < r.snapshots.size(); ++e) {
    const int epoch = static_cast<int>(e);
    write_json((dir / ("patterns_epoch_" + std::to_string(epoch) + ".json")).string(),
               patterns_to_json(r.snapshots[e]));
    write_pattern_pngs(r.snapshots[e], dir, "epoch_" + std::to_string(epoch) + "_pattern_");
  }
  write_json((dir / "patterns_final.json").string(), patterns_to_json(r.final_patterns));
  write_json((dir / "patterns_final_logits.json").string(), patterns_to_json(r.final_logits));
  write_json((dir / "patterns_best.json").string(), patterns_to_json(r.best_patterns));
  write_json((dir / "report.json").string(), r.to_json());
  out() << "initial test " << r.initial_test_loss() << " best " << r.best_test_loss()
        << " (epoch " << r.best_epoch << ") final " << r.final_test_loss() << "\n"
        << "wall clock " << r.wall_clock_seconds << " s\n";
}

// reconstruct ----------------------------------------------------------------

struct ReconstructArgs {
  std::string patterns;
  std::string captures;
  std::string geometry;
  std::string camera;
  std::string out;
  std::string albedo_out;
  std::string mask;
  int refine_iters = 0;
  double plane_depth = 0.5;
};

void run_reconstruct(const ReconstructArgs& a) {
  if (a.refine_iters < 0) throw ArgumentError("--refine-iters must be non-negative");
  const PatternSet m = load_intensities(a.patterns);
  const CameraModel cam = camera_from_json(read_json(a.camera));
  const DisplayGrid grid = grid_from_json(read_json(a.geometry));
  if (grid.cols != m.cols() || grid.rows != m.rows())
    throw ArgumentError("pattern grid does not match the display geometry");

  CaptureSet caps;
  for (int i = 0; i < m.k(); ++i) {
    const fs::path p = fs::path(a.captures) / numbered("capture_", i, ".pfm");
    Image img = read_pfm(p.string());
    if (img.width() != cam.width || img.height() != cam.height || img.channels() != 3)
      throw ArgumentError(p.string() + ": expected a " + std::to_string(cam.width) + "x" +
                          std::to_string(cam.height) + " RGB image");
    caps.images.push_back(std::move(img));
  }
  const fs::path default_mask = fs::path(a.captures) / "mask.pfm";
  if (!a.mask.empty()) {
    caps.mask = read_mask_pfm(a.mask);
  } else if (fs::exists(default_mask)) {
    caps.mask = read_mask_pfm(default_mask.string());
  } else {
    caps.mask = Mask(cam.width, cam.height, 1, 1);
  }
  caps.validate();

  const IlluminationField field = build_illumination_field(cam, grid, a.plane_depth);
  AlbedoMap albedo = estimate_albedo_max(caps);
  NormalMap normals = reconstruct_normals(caps, m, field, albedo);
  for (int it = 0; it < a.refine_iters; ++it) {
    albedo = refine_albedo(caps, m, field, normals, albedo);
    normals = reconstruct_normals(caps, m, field, albedo);
  }
  for (int p = 0; p < normals.valid.pixel_count(); ++p) {
    if (caps.mask.at(p) == 0) {
      normals.valid.at(p) = 0;
      for (int c = 0; c < 3; ++c) normals.normals.at(p, c) = 0.0;
    }
  }
  write_pfm(a.out, normals.normals);
  if (!a.albedo_out.empty()) write_pfm(a.albedo_out, albedo.rho);
  int valid = 0;
  for (int p = 0; p < normals.valid.pixel_count(); ++p) valid += normals.valid.at(p);
  out() << "reconstructed " << valid << " of " << normals.valid.pixel_count() << " pixels\n";
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string patterns;
  std::string dataset;
  std::string split = "test";
  std::string out;
};

void run_eval(const EvalArgs& a) {
  const PatternSet m = load_intensities(a.patterns);
  const Dataset ds = load_dataset(a.dataset);
  std::vector<SceneSample> scenes;
  if (a.split == "test" || a.split == "all") scenes = ds.test;
  if (a.split == "train") scenes = ds.train;
  if (a.split == "all") scenes.insert(scenes.begin(), ds.train.begin(), ds.train.end());
  const double depth = TrainConfig::from_json(config_json()).plane_depth;
  const EvalResult r = evaluate(m, scenes, depth);
  Json j = r.to_json();
  j["split"] = a.split;
  j["tool_version"] = kToolVersion;
  if (!a.out.empty()) write_json(a.out, j);
  out() << a.split << " loss " << r.mean << " over " << r.scenes.size() << " scenes\n";
}

// sweep ----------------------------------------------------------------------

struct SweepArgs {
  std::string dataset;
  std::vector<std::string> kinds;
  std::vector<int> ks;
  std::string out;
  int jobs = 1;
};

void run_sweep(const SweepArgs& a) {
  TrainConfig base = TrainConfig::from_json(config_json());
  if (g.seed) base.seed = *g.seed;
  std::vector<HeuristicKind> kinds;
  if (a.kinds.empty()) {
    kinds = heuristic_catalog();
  } else {
    for (const std::string& k : a.kinds) kinds.push_back(parse_heuristic(k));
  }
  const std::vector<int> ks = a.ks.empty() ? std::vector<int>{base.k} : a.ks;
  const Dataset ds = load_dataset(a.dataset);
  const EvalReport report = sweep(kinds, ks, base, ds, a.jobs);

  const fs::path dir(a.out);
  make_dir(dir);
  for (const SweepRow& row : report.rows) {
    if (row.failed()) continue;
    const fs::path cell = dir / "cells" / (row.name + "_K" + std::to_string(row.k));
    make_dir(cell);
    write_json((cell / "patterns_initial.json").string(), patterns_to_json(row.initial));
    write_json((cell / "patterns_learned.json").string(), patterns_to_json(row.learned));
    write_json((cell / "patterns_final.json").string(), patterns_to_json(row.final_patterns));
  }
  write_json((dir / "report.json").string(), report.to_json());
  const std::string table = report.table();
  std::ofstream t(dir / "table.txt", std::ios::binary);
  t << table;
  if (!t) throw IoError("cannot write " + (dir / "table.txt").string());
  out() << table;
}

// separate -------------------------------------------------------------------

struct SeparateArgs {
  std::string i0, i45, i90, i135;
  std::string mode = "standard";
  std::string out_diffuse;
  std::string out_specular;
};

void run_separate(const SeparateArgs& a) {
  StokesMode mode;
  if (a.mode == "standard") {
    mode = StokesMode::kStandard;
  } else if (a.mode == "paper") {
    mode = StokesMode::kPaper;
  } else {
    throw ArgumentError("--mode must be standard or paper");
  }
  PolarizedCaptures p{read_pfm(a.i0), read_pfm(a.i45), read_pfm(a.i90), read_pfm(a.i135)};
  const Separation s = separate(stokes_decompose(p, mode));
  write_pfm(a.out_diffuse, s.diffuse);
  write_pfm(a.out_specular, s.specular);
}

// posefit --------------------------------------------------------------------

struct PosefitArgs {
  std::string mesh;
  std::string mask;
  std::string camera;
  std::string init;
  std::string out;
  std::string normals_out;
  double depth = 0.5;
};

void run_posefit(const PosefitArgs& a) {
  const TriangleMesh mesh = load_obj(a.mesh);
  const Mask target = read_mask_pfm(a.mask);
  const CameraModel cam = camera_from_json(read_json(a.camera));
  PoseParams init;
  if (!a.init.empty()) {
    init = pose_from_json(read_json(a.init));
  } else {
    init.t = Vec3(0.0, 0.0, a.depth) - mesh.centroid();
  }
  const PoseFitResult r = fit_pose(mesh, target, init, cam);
  write_json(a.out, pose_to_json(r.pose, r.mse));
  if (!a.normals_out.empty()) write_pfm(a.normals_out, render_gt_normals(mesh, r.pose, cam));
  out() << "silhouette mse " << r.initial_mse << " -> " << r.mse << " after " << r.evaluations
        << " evaluations\n";
}

// calib ----------------------------------------------------------------------

struct CalibMirrorArgs {
  std::string obs;
  std::string camera;
  std::string grid;
  std::string out;
};

void run_calib_mirror(const CalibMirrorArgs& a) {
  const auto [cols, rows] = parse_grid_dims(a.grid);
  const std::vector<MirrorObservation> obs = observations_from_json(read_json(a.obs));
  const CameraModel cam = camera_from_json(read_json(a.camera));
  const TriangulationResult t = triangulate_superpixels(obs, cam);
  for (const std::string& w : t.warnings) std::cerr << "warning: " << w << "\n";
  const DisplayGrid grid = interpolate_grid(t.points, cols, rows);
  write_json(a.out, grid_to_json(grid));
  out() << "triangulated " << t.points.size() << " superpixels, interpolated " << grid.size()
        << "\n";
}

struct CalibResponseArgs {
  std::string samples;
  std::string model = "power";
  std::string out;
};

void run_calib_response(const CalibResponseArgs& a) {
  ResponseModel model;
  if (a.model == "power") {
    model = ResponseModel::kPower;
  } else if (a.model == "exponential") {
    model = ResponseModel::kExponential;
  } else {
    throw ArgumentError("--model must be power or exponential");
  }
  const auto channels = read_response_samples(a.samples);
  Json j = Json::object();
  Json curves = Json::array();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const ResponseCurve curve = fit_response(channels[c], model);
    curves.push_back(curve.to_json());
    out() << "channel " << c << " gamma " << curve.gamma << " rms " << curve.residual << "\n";
  }
  j["channels"] = curves;
  write_json(a.out, j);
}

// viz ------------------------------------------------------------------------

struct VizArgs {
  std::string normals;
  std::string albedo;
  std::string gt;
  std::string mask;
  std::string patterns;
  std::string out;
};

void run_viz(const VizArgs& a) {
  VisualInputs in;
  std::optional<NormalMap> normals;
  std::optional<Image> albedo, loss;
  std::optional<PatternSet> patterns;
  if (!a.normals.empty()) {
    Image n = read_pfm(a.normals);
    if (n.channels() != 3) throw ArgumentError("normal map needs 3 channels");
    Mask valid(n.width(), n.height(), 1, 0);
    for (int p = 0; p < n.pixel_count(); ++p) {
      valid.at(p) = (n.at(p, 0) != 0.0 || n.at(p, 1) != 0.0 || n.at(p, 2) != 0.0) ? 1 : 0;
    }
    normals = NormalMap{std::move(n), std::move(valid)};
    in.normals = &*normals;
    if (!a.gt.empty()) {
      const Image gt = read_pfm(a.gt);
      const Mask mask = a.mask.empty() ? Mask(gt.width(), gt.height(), 1, 1) : read_mask_pfm(a.mask);
      loss = cosine_loss_map(*normals, gt, mask);
      in.loss_map = &*loss;
    }
  } else if (!a.gt.empty()) {
    throw ArgumentError("--gt needs --normals");
  }
  if (!a.albedo.empty()) {
    albedo = read_pfm(a.albedo);
    in.albedo = &*albedo;
  }
  if (!a.patterns.empty()) {
    patterns = load_intensities(a.patterns);
    in.patterns = &*patterns;
  }
  if (!in.normals && !in.albedo && !in.patterns)
    throw ArgumentError("viz needs at least one of --normals, --albedo, --patterns");
  for (const std::string& p : export_visuals(in, a.out)) out() << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Display photometric stereo toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "RNG seed overriding the config");
  app.add_option("--config", g.config, "JSON config file");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  std::function<void()> action;

  auto* dataset = app.add_subcommand("dataset", "synthetic datasets");
  dataset->require_subcommand(1);
  DatasetGenArgs dg;
  auto* gen = dataset->add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--out", dg.out, "output directory")->required();
  gen->callback([&] { action = [&] { run_dataset_gen(dg); }; });

  auto* patterns = app.add_subcommand("patterns", "pattern sets");
  patterns->require_subcommand(1);
  PatternsInitArgs pi;
  auto* init = patterns->add_subcommand("init", "heuristic pattern set");
  init->add_option("--kind", pi.kind, "catalog name")->required();
  init->add_option("--k", pi.k, "pattern count");
  init->add_option("--grid", pi.grid, "superpixel grid CxR");
  init->add_option("--out", pi.out, "pattern JSON")->required();
  init->add_option("--png-dir", pi.png_dir, "directory for pattern PNGs");
  init->callback([&] { action = [&] { run_patterns_init(pi); }; });

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "learn patterns on a dataset");
  tr->add_option("--dataset", ta.dataset, "manifest.json")->required();
  tr->add_option("--out", ta.out, "run directory")->required();
  tr->callback([&] { action = [&] { run_train(ta); }; });

  ReconstructArgs ra;
  auto* rc = app.add_subcommand("reconstruct", "normals from captures");
  rc->add_option("--patterns", ra.patterns, "pattern JSON")->required();
  rc->add_option("--captures", ra.captures, "directory of capture_NNN.pfm")->required();
  rc->add_option("--geometry", ra.geometry, "display geometry JSON")->required();
  rc->add_option("--camera", ra.camera, "camera JSON")->required();
  rc->add_option("--out", ra.out, "normal map PFM")->required();
  rc->add_option("--albedo-out", ra.albedo_out, "albedo PFM");
  rc->add_option("--refine-iters", ra.refine_iters, "albedo refinement iterations");
  rc->add_option("--mask", ra.mask, "mask PFM (default: captures/mask.pfm when present)");
  rc->add_option("--plane-depth", ra.plane_depth, "assumed scene depth in meters");
  rc->callback([&] { action = [&] { run_reconstruct(ra); }; });

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "evaluate patterns on a dataset");
  ev->add_option("--patterns", ea.patterns, "pattern JSON")->required();
  ev->add_option("--dataset", ea.dataset, "manifest.json")->required();
  ev->add_option("--split", ea.split, "test, train or all")
      ->check(CLI::IsMember({"test", "train", "all"}));
  ev->add_option("--out", ea.out, "report JSON");
  ev->callback([&] { action = [&] { run_eval(ea); }; });

  SweepArgs sa;
  auto* sw = app.add_subcommand("sweep", "train every initialization and pattern count");
  sw->add_option("--dataset", sa.dataset, "manifest.json")->required();
  sw->add_option("--kinds", sa.kinds, "catalog names (default: all)")->delimiter(',');
  sw->add_option("--ks", sa.ks, "pattern counts (default: config K)")->delimiter(',');
  sw->add_option("--out", sa.out, "output directory")->required();
  sw->add_option("--jobs", sa.jobs, "concurrent cells");
  sw->callback([&] { action = [&] { run_sweep(sa); }; });

  SeparateArgs se;
  auto* sp = app.add_subcommand("separate", "diffuse/specular separation");
  sp->add_option("--i0", se.i0)->required();
  sp->add_option("--i45", se.i45)->required();
  sp->add_option("--i90", se.i90)->required();
  sp->add_option("--i135", se.i135)->required();
  sp->add_option("--mode", se.mode, "standard or paper");
  sp->add_option("--out-diffuse", se.out_diffuse)->required();
  sp->add_option("--out-specular", se.out_specular)->required();
  sp->callback([&] { action = [&] { run_separate(se); }; });

  PosefitArgs pa;
  auto* pf = app.add_subcommand("posefit", "align a mesh to a silhouette");
  pf->add_option("--mesh", pa.mesh, "OBJ model")->required();
  pf->add_option("--mask", pa.mask, "silhouette PFM")->required();
  pf->add_option("--camera", pa.camera, "camera JSON")->required();
  pf->add_option("--out", pa.out, "pose JSON")->required();
  pf->add_option("--init", pa.init, "initial pose JSON");
  pf->add_option("--depth", pa.depth, "initial depth when no --init is given");
  pf->add_option("--normals-out", pa.normals_out, "ground-truth normals PFM");
  pf->callback([&] { action = [&] { run_posefit(pa); }; });

  auto* calib = app.add_subcommand("calib", "display calibration");
  calib->require_subcommand(1);
  CalibMirrorArgs cm;
  auto* mirror = calib->add_subcommand("mirror", "superpixel positions from mirror views");
  mirror->add_option("--obs", cm.obs, "observations JSON")->required();
  mirror->add_option("--camera", cm.camera, "camera JSON")->required();
  mirror->add_option("--grid", cm.grid, "full grid CxR")->required();
  mirror->add_option("--out", cm.out, "geometry JSON")->required();
  mirror->callback([&] { action = [&] { run_calib_mirror(cm); }; });
  CalibResponseArgs cr;
  auto* response = calib->add_subcommand("response", "display response curve");
  response->add_option("--samples", cr.samples, "channel,u,y CSV")->required();
  response->add_option("--model", cr.model, "power or exponential");
  response->add_option("--out", cr.out, "response JSON")->required();
  response->callback([&] { action = [&] { run_calib_response(cr); }; });

  VizArgs va;
  auto* viz = app.add_subcommand("viz", "PNG visualizations");
  viz->add_option("--normals", va.normals, "normal map PFM");
  viz->add_option("--albedo", va.albedo, "albedo PFM");
  viz->add_option("--gt", va.gt, "ground-truth normals PFM for an error map");
  viz->add_option("--mask", va.mask, "mask PFM for the error map");
  viz->add_option("--patterns", va.patterns, "pattern JSON");
  viz->add_option("--out", va.out, "output directory")->required();
  viz->callback([&] { action = [&] { run_viz(va); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgument;
  }
  if (app.count("--seed") > 0) g.seed = seed;

  try {
    if (action) action();
    return kExitOk;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  }
}
