// panoheat command-line tool: light maps, energy influx, transient surface
// heat simulation and its analysis protocols, all from a calibrated HDR
// panorama plus a room layout.
//
// Exit codes: 0 success, 1 input error, 2 numeric/stability error, 3 I/O.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panoheat/panoheat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace panoheat;

namespace {

#ifndef PANOHEAT_VERSION
#define PANOHEAT_VERSION "0.0.0"
#endif

unsigned env_threads() {
  const char* v = std::getenv("PANOHEAT_THREADS");
  if (!v) return 1;
  long n = std::strtol(v, nullptr, 10);
  if (n < 0) throw InputError("PANOHEAT_THREADS must be >= 0");
  return static_cast<unsigned>(n);  // 0 = auto
}

std::vector<PatchSpec> load_patches(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InputError("patch JSON parse error in " + path.string() + ": " +
                     e.what());
  }
  std::vector<PatchSpec> patches;
  try {
    for (const auto& p : j)
      patches.push_back({p.at("u").get<double>(), p.at("v").get<double>(),
                         p.at("radius").get<double>()});
  } catch (const json::exception& e) {
    throw InputError(std::string("patch JSON: ") + e.what());
  }
  if (patches.empty()) throw InputError("patch list is empty");
  for (const PatchSpec& p : patches) p.validate();
  return patches;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

struct PngBounds {
  std::optional<double> lo, hi;

  // explicit bounds when given, otherwise the data range
  std::pair<double, double> resolve(const ScalarMap& map) const {
    if (lo && hi) return {*lo, *hi};
    double mn = map.data()[0], mx = map.data()[0];
    for (double v : map.data()) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    if (!(mx > mn)) mx = mn + 1.0;
    return {lo.value_or(mn), hi.value_or(mx)};
  }
};

// scalar map output: raw .bin plus a false-color .png next to it
std::pair<double, double> write_map_outputs(const fs::path& bin_path,
                                            const ScalarMap& map,
                                            const PngBounds& bounds) {
  write_float_map(bin_path, map);
  auto [lo, hi] = bounds.resolve(map);
  fs::path png = bin_path;
  png.replace_extension(".png");
  write_false_color_png(png, map, lo, hi);
  return {lo, hi};
}

struct ManifestBuilder {
  json j;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  explicit ManifestBuilder(const std::string& command) {
    j["command"] = command;
    j["version"] = PANOHEAT_VERSION;
    j["inputs"] = json::object();
  }
  void input(const fs::path& path) {
    j["inputs"][path.string()] = digest_file(path);
  }
  void finish(const fs::path& out_dir) {
    j["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    write_json_atomic(out_dir / "manifest.json", j);
  }
};

SimConfig load_config_opt(const std::string& path) {
  return path.empty() ? SimConfig{} : load_sim_config(path);
}

struct SceneArgs {
  std::string layout, pano, materials, config;

  void add_to(CLI::App* cmd, bool need_materials = true) {
    cmd->add_option("--layout", layout, "room layout JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--pano", pano, "HDR panorama (Radiance RGBE)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* m = cmd->add_option("--materials", materials,
                              "material database JSON");
    if (need_materials) m->required()->check(CLI::ExistingFile);
    cmd->add_option("--config", config, "run configuration JSON")
        ->check(CLI::ExistingFile);
  }

  Scene load() const {
    Scene s;
    s.layout = load_layout(layout);
    s.pano = read_hdr(pano);
    s.pano.validate();
    if (!materials.empty()) s.materials = MaterialDb::load(materials);
    s.cfg = load_config_opt(config);
    return s;
  }

  void digest_into(ManifestBuilder& mb) const {
    mb.input(layout);
    mb.input(pano);
    if (!materials.empty()) mb.input(materials);
    if (!config.empty()) mb.input(config);
  }
};

json toggles_json(const Toggles& t) {
  return {{"conduction", t.conduction},
          {"radiation", t.radiation},
          {"convection", t.convection},
          {"exchange", t.exchange}};
}

// Heat maps are stored in Kelvin; PNGs are rendered in Celsius.
void write_heat_outputs(const fs::path& bin_path, const ScalarMap& map_k,
                        const PngBounds& bounds_c) {
  write_float_map(bin_path, map_k);
  ScalarMap c = map_to_celsius(map_k);
  auto [lo, hi] = bounds_c.resolve(c);
  fs::path png = bin_path;
  png.replace_extension(".png");
  write_false_color_png(png, c, lo, hi);
}

std::string snap_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "snap_%04zu", index);
  return buf;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"indoor light and heat maps from a single HDR panorama"};
  app.set_version_flag("--version", std::string("panoheat ") + PANOHEAT_VERSION);
  app.require_subcommand(1);
  unsigned threads = env_threads();

  // ---- light-map -----------------------------------------------------
  auto* light = app.add_subcommand("light-map",
                                   "per-pixel luminance map (cd/m^2)");
  static std::string l_pano, l_out, l_config;
  static PngBounds l_bounds;
  light->add_option("--pano", l_pano)->required()->check(CLI::ExistingFile);
  light->add_option("--out", l_out, "output directory")->required();
  light->add_option("--config", l_config)->check(CLI::ExistingFile);
  light->add_option("--png-min", l_bounds.lo);
  light->add_option("--png-max", l_bounds.hi);
  light->callback([&] {
    SimConfig cfg = load_config_opt(l_config);
    HdrPanorama pano = read_hdr(l_pano);
    pano.validate();
    fs::create_directories(l_out);
    ManifestBuilder mb("light-map");
    mb.input(l_pano);
    if (!l_config.empty()) mb.input(l_config);
    ScalarMap lum = luminance_from_hdr(pano, cfg.efficacy,
                                       cfg.luminance_weights);
    auto [lo, hi] = write_map_outputs(fs::path(l_out) / "luminance.bin", lum,
                                      l_bounds);
    mb.j["png_bounds"] = {lo, hi};
    mb.finish(l_out);
  });

  // ---- illum-map / flux-map ------------------------------------------
  struct IllumArgs {
    std::string pano, out, config, layout;
    double reflectance = 0.0;
    PngBounds bounds;
  };
  static IllumArgs ia, fa;
  auto add_illum_opts = [](CLI::App* cmd, IllumArgs& a) {
    cmd->add_option("--pano", a.pano)->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out, "output directory")->required();
    cmd->add_option("--config", a.config)->check(CLI::ExistingFile);
    cmd->add_option("--reflectance", a.reflectance,
                    "scene-wide Lambertian reflectance in (0,1]");
    cmd->add_option("--layout", a.layout,
                    "layout JSON for per-surface reflectance")
        ->check(CLI::ExistingFile);
    cmd->add_option("--png-min", a.bounds.lo);
    cmd->add_option("--png-max", a.bounds.hi);
  };

  auto illuminance_map = [&](const IllumArgs& a,
                             const SimConfig& cfg) -> ScalarMap {
    HdrPanorama pano = read_hdr(a.pano);
    pano.validate();
    ScalarMap lum = luminance_from_hdr(pano, cfg.efficacy,
                                       cfg.luminance_weights);
    if (!a.layout.empty()) {
      RoomLayout layout = load_layout(a.layout);
      std::vector<Plane> planes = build_surfaces(layout);
      SurfaceMesh mesh = mesh_surfaces(planes, cfg.grid_h_m, layout.apertures);
      std::vector<double> refl;
      for (const PlaneMesh& pm : mesh.planes)
        refl.push_back(pm.plane.reflectance);
      BakeResult baked = bake_plane_constants(mesh, refl, layout.camera,
                                              pano.width(), pano.height());
      return illuminance_from_luminance(lum, baked.map);
    }
    if (!(a.reflectance > 0.0))
      throw InputError("need --reflectance or --layout");
    return illuminance_from_luminance(lum, a.reflectance);
  };

  auto* illum = app.add_subcommand("illum-map",
                                   "per-pixel illuminance map (lux)");
  add_illum_opts(illum, ia);
  illum->callback([&] {
    SimConfig cfg = load_config_opt(ia.config);
    fs::create_directories(ia.out);
    ManifestBuilder mb("illum-map");
    mb.input(ia.pano);
    if (!ia.layout.empty()) mb.input(ia.layout);
    if (!ia.config.empty()) mb.input(ia.config);
    ScalarMap illum_map = illuminance_map(ia, cfg);
    auto [lo, hi] = write_map_outputs(fs::path(ia.out) / "illuminance.bin",
                                      illum_map, ia.bounds);
    mb.j["png_bounds"] = {lo, hi};
    mb.finish(ia.out);
  });

  auto* flux = app.add_subcommand("flux-map",
                                  "per-pixel energy influx map (W/m^2)");
  add_illum_opts(flux, fa);
  flux->callback([&] {
    SimConfig cfg = load_config_opt(fa.config);
    fs::create_directories(fa.out);
    ManifestBuilder mb("flux-map");
    mb.input(fa.pano);
    if (!fa.layout.empty()) mb.input(fa.layout);
    if (!fa.config.empty()) mb.input(fa.config);
    ScalarMap flux_map =
        flux_from_illuminance(illuminance_map(fa, cfg), cfg.lux_per_watt);
    auto [lo, hi] = write_map_outputs(fs::path(fa.out) / "flux.bin", flux_map,
                                      fa.bounds);
    mb.j["png_bounds"] = {lo, hi};
    mb.finish(fa.out);
  });

  // ---- patch-stats ----------------------------------------------------
  auto* pstats = app.add_subcommand("patch-stats",
                                    "mean value over circular patches");
  static std::string ps_map, ps_patches, ps_out;
  pstats->add_option("--map", ps_map)->required()->check(CLI::ExistingFile);
  pstats->add_option("--patches", ps_patches)
      ->required()
      ->check(CLI::ExistingFile);
  pstats->add_option("--out", ps_out, "output CSV")->required();
  pstats->callback([&] {
    ScalarMap map = read_float_map(ps_map);
    std::vector<PatchStats> stats;
    for (const PatchSpec& p : load_patches(ps_patches))
      stats.push_back(patch_mean(map, p));
    write_text(ps_out, patch_stats_csv(stats));
  });

  // ---- heat-sim -------------------------------------------------------
  auto* hs = app.add_subcommand("heat-sim",
                                "transient surface heat simulation");
  static SceneArgs hs_scene;
  static std::string hs_out;
  static PngBounds hs_bounds{21.0, 26.0};
  hs_scene.add_to(hs);
  hs->add_option("--out", hs_out, "run directory")->required();
  hs->add_option("--png-min", hs_bounds.lo, "heat PNG lower bound, degC");
  hs->add_option("--png-max", hs_bounds.hi, "heat PNG upper bound, degC");
  hs->callback([&] {
    Scene scene = hs_scene.load();
    fs::create_directories(fs::path(hs_out) / "fields");
    fs::create_directories(fs::path(hs_out) / "panos");
    ManifestBuilder mb("heat-sim");
    hs_scene.digest_into(mb);

    std::vector<Plane> planes = build_surfaces(scene.layout);
    SurfaceMesh mesh =
        mesh_surfaces(planes, scene.cfg.grid_h_m, scene.layout.apertures);
    project_vertices(mesh, scene.layout.camera, scene.pano.width(),
                     scene.pano.height());
    ScalarMap lum = luminance_from_hdr(scene.pano, scene.cfg.efficacy,
                                       scene.cfg.luminance_weights);
    PlaneValues vflux = flux_at_vertices(mesh, lum, scene.cfg.lux_per_watt);
    SimResult sim = run_sim(mesh, vflux, materials_for(mesh, scene.materials),
                            betas_for(mesh, scene.cfg), scene.cfg);

    auto write_field = [&](const TemperatureField& f,
                           const std::string& stem) {
      PlaneValues values;
      for (std::size_t p = 0; p < mesh.planes.size(); ++p) {
        const std::string id = mesh.planes[p].plane.id;
        write_float_map(fs::path(hs_out) / "fields" / (stem + "_" + id + ".bin"),
                        f.planes[p]);
        values.push_back(f.planes[p].data());
      }
      BakeResult baked =
          bake_to_panorama(mesh, values, scene.layout.camera,
                           scene.pano.width(), scene.pano.height());
      write_heat_outputs(fs::path(hs_out) / "panos" / ("heat_" + stem + ".bin"),
                         baked.map, hs_bounds);
    };
    for (std::size_t i = 0; i < sim.snapshots.size(); ++i)
      write_field(sim.snapshots[i], snap_name(i));
    write_field(sim.final_field, "final");

    mb.j["dt_s"] = sim.dt_used;
    mb.j["steps"] = sim.total_steps;
    mb.j["snapshots"] = sim.snapshots.size();
    mb.j["toggles"] = toggles_json(scene.cfg.toggles);
    json mats = json::object();
    for (const PlaneMesh& pm : mesh.planes)
      mats[pm.plane.id] = pm.plane.material;
    mb.j["surface_materials"] = mats;
    mb.j["png_bounds_c"] = {*hs_bounds.lo, *hs_bounds.hi};
    mb.finish(hs_out);
  });

  // ---- bake-pano -------------------------------------------------------
  auto* bake = app.add_subcommand(
      "bake-pano", "project stored per-plane fields onto the panorama");
  static std::string bk_layout, bk_config, bk_prefix, bk_out;
  static int bk_w = 0, bk_h = 0;
  static PngBounds bk_bounds{21.0, 26.0};
  bake->add_option("--layout", bk_layout)->required()->check(CLI::ExistingFile);
  bake->add_option("--config", bk_config)->check(CLI::ExistingFile);
  bake->add_option("--fields-prefix", bk_prefix,
                   "reads <prefix>_<plane id>.bin per surface")
      ->required();
  bake->add_option("--width", bk_w)->required();
  bake->add_option("--height", bk_h)->required();
  bake->add_option("--out", bk_out, "output .bin")->required();
  bake->add_option("--png-min", bk_bounds.lo);
  bake->add_option("--png-max", bk_bounds.hi);
  bake->callback([&] {
    SimConfig cfg = load_config_opt(bk_config);
    RoomLayout layout = load_layout(bk_layout);
    SurfaceMesh mesh =
        mesh_surfaces(build_surfaces(layout), cfg.grid_h_m, layout.apertures);
    PlaneValues values;
    for (const PlaneMesh& pm : mesh.planes) {
      fs::path f = bk_prefix + "_" + pm.plane.id + ".bin";
      ScalarMap m = read_float_map(f);
      if (m.width() != pm.nu || m.height() != pm.nv)
        throw InputError("field " + f.string() +
                         " does not match the mesh grid (check grid_h_m)");
      values.push_back(m.data());
    }
    BakeResult baked = bake_to_panorama(mesh, values, layout.camera, bk_w,
                                        bk_h);
    write_heat_outputs(bk_out, baked.map, bk_bounds);
  });

  // ---- crop -------------------------------------------------------------
  auto* crop = app.add_subcommand(
      "crop", "perspective crop of a panorama (.hdr) or scalar map (.bin)");
  static std::string cr_in, cr_out, cr_sampling = "bilinear";
  static double cr_yaw = 0, cr_pitch = 0, cr_hfov = 90;
  static int cr_w = 640, cr_h = 512;
  static PngBounds cr_bounds;
  crop->add_option("--in", cr_in)->required()->check(CLI::ExistingFile);
  crop->add_option("--out", cr_out)->required();
  crop->add_option("--yaw-deg", cr_yaw);
  crop->add_option("--pitch-deg", cr_pitch);
  crop->add_option("--hfov-deg", cr_hfov);
  crop->add_option("--width", cr_w);
  crop->add_option("--height", cr_h);
  crop->add_option("--sampling", cr_sampling)
      ->check(CLI::IsMember({"nearest", "bilinear"}));
  crop->add_option("--png-min", cr_bounds.lo);
  crop->add_option("--png-max", cr_bounds.hi);
  crop->callback([&] {
    PerspectiveSpec spec;
    spec.yaw = cr_yaw * kPi / 180.0;
    spec.pitch = cr_pitch * kPi / 180.0;
    spec.hfov = cr_hfov * kPi / 180.0;
    spec.out_width = cr_w;
    spec.out_height = cr_h;
    Sampling s = cr_sampling == "nearest" ? Sampling::kNearest
                                          : Sampling::kBilinear;
    if (fs::path(cr_in).extension() == ".hdr") {
      HdrPanorama pano = read_hdr(cr_in);
      pano.validate();
      HdrPanorama out;
      out.pixels = crop_perspective(pano.pixels, spec, s);
      out.scale = pano.scale;
      write_hdr(cr_out, out);
    } else {
      ScalarMap map = read_float_map(cr_in);
      ScalarMap out = crop_perspective(map, spec, s);
      write_map_outputs(cr_out, out, cr_bounds);
    }
  });

  // ---- flir-correct ------------------------------------------------------
  auto* flir = app.add_subcommand(
      "flir-correct", "re-display a TLinear frame with the actual emissivity");
  static std::string fl_frame, fl_cal, fl_out;
  static double fl_eps = 0.92;
  flir->add_option("--frame", fl_frame)->required()->check(CLI::ExistingFile);
  flir->add_option("--cal", fl_cal)->required()->check(CLI::ExistingFile);
  flir->add_option("--emissivity", fl_eps)->required();
  flir->add_option("--out", fl_out, "output frame .bin (same container)")
      ->required();
  flir->callback([&] {
    FlirCalibration cal = FlirCalibration::load(fl_cal);
    FrameScale scale;
    ScalarMap frame = read_thermal_frame(fl_frame, &scale);
    ScalarMap corrected = reprocess_frame(frame, cal, fl_eps);
    write_thermal_frame(fl_out, corrected, scale);
  });

  // ---- sweep ---------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "parametric heat simulations");
  static SceneArgs sw_scene;
  static std::string sw_spec, sw_out;
  static PngBounds sw_bounds{21.0, 26.0};
  sw_scene.add_to(sweep);
  sweep->add_option("--spec", sw_spec, "sweep spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", sw_out, "run directory")->required();
  sweep->add_option("--png-min", sw_bounds.lo);
  sweep->add_option("--png-max", sw_bounds.hi);
  sweep->callback([&] {
    Scene scene = sw_scene.load();
    std::ifstream is(sw_spec);
    json sj;
    try {
      is >> sj;
    } catch (const json::exception& e) {
      throw InputError("sweep spec parse error: " + std::string(e.what()));
    }
    SweepSpec spec = SweepSpec::from_json(sj);
    fs::create_directories(fs::path(sw_out) / "maps");
    ManifestBuilder mb("sweep");
    sw_scene.digest_into(mb);
    mb.input(sw_spec);
    SweepResult res = run_sweep(spec, scene, threads);
    write_text(fs::path(sw_out) / "sweep.csv", sweep_csv(res));
    for (std::size_t i = 0; i < res.heat_maps_k.size(); ++i)
      write_heat_outputs(fs::path(sw_out) / "maps" /
                             (res.value_labels[i] + ".bin"),
                         res.heat_maps_k[i], sw_bounds);
    mb.j["parameter"] = spec.parameter;
    mb.j["values"] = res.value_labels;
    mb.j["baseline"] = res.value_labels[res.baseline_index];
    mb.finish(sw_out);
  });

  // ---- toggle-matrix ---------------------------------------------------------
  auto* tm = app.add_subcommand(
      "toggle-matrix", "all transfer-mechanism combinations vs all-on");
  static SceneArgs tm_scene;
  static std::string tm_out;
  static PngBounds tm_heat{21.0, 31.0};
  static double tm_err_bound = 10.0;
  tm_scene.add_to(tm);
  tm->add_option("--out", tm_out, "run directory")->required();
  tm->add_option("--png-min", tm_heat.lo);
  tm->add_option("--png-max", tm_heat.hi);
  tm->add_option("--error-bound", tm_err_bound,
                 "error PNG bound, +-degC");
  tm->callback([&] {
    Scene scene = tm_scene.load();
    fs::create_directories(tm_out);
    ManifestBuilder mb("toggle-matrix");
    tm_scene.digest_into(mb);
    std::vector<ToggleRun> runs = toggle_matrix(scene, threads);
    for (const ToggleRun& r : runs) {
      write_heat_outputs(fs::path(tm_out) / ("heat_" + r.label + ".bin"),
                         r.heat_map_k, tm_heat);
      write_float_map(fs::path(tm_out) / ("error_" + r.label + ".bin"),
                      r.error_map_c);
      write_false_color_png(fs::path(tm_out) / ("error_" + r.label + ".png"),
                            r.error_map_c, -tm_err_bound, tm_err_bound);
    }
    write_text(fs::path(tm_out) / "summary.csv", toggle_csv(runs));
    mb.j["error_bound_c"] = tm_err_bound;
    mb.finish(tm_out);
  });

  // ---- compare -----------------------------------------------------------------
  auto* cmp = app.add_subcommand(
      "compare", "patch comparison of a baked heat map vs a thermal frame");
  static std::string cm_sim, cm_thermal, cm_cal, cm_pose, cm_patches, cm_out;
  static double cm_eps = 0.0;
  cmp->add_option("--sim", cm_sim, "baked panoramic heat map .bin (Kelvin)")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--thermal", cm_thermal)->required()->check(CLI::ExistingFile);
  cmp->add_option("--cal", cm_cal)->required()->check(CLI::ExistingFile);
  cmp->add_option("--emissivity", cm_eps,
                  "re-correct the frame to this emissivity first");
  cmp->add_option("--pose", cm_pose, "JSON {yaw_deg, pitch_deg, hfov_deg}")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--patches", cm_patches)
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--out", cm_out, "output CSV")->required();
  cmp->callback([&] {
    ScalarMap sim = read_float_map(cm_sim);
    ScalarMap thermal = read_thermal_frame(cm_thermal);
    FlirCalibration cal = FlirCalibration::load(cm_cal);
    if (cm_eps > 0.0) thermal = reprocess_frame(thermal, cal, cm_eps);
    std::ifstream is(cm_pose);
    if (!is) throw IoError("cannot open: " + cm_pose);
    json pj;
    try {
      is >> pj;
    } catch (const json::exception& e) {
      throw InputError("pose JSON parse error: " + std::string(e.what()));
    }
    PerspectiveSpec pose;
    pose.yaw = pj.value("yaw_deg", 0.0) * kPi / 180.0;
    pose.pitch = pj.value("pitch_deg", 0.0) * kPi / 180.0;
    pose.hfov = pj.at("hfov_deg").get<double>() * kPi / 180.0;
    std::vector<CompareRow> rows =
        compare_to_thermal(sim, pose, thermal, load_patches(cm_patches));
    write_text(cm_out, compare_csv(rows));
  });

  // ---- layout-check ---------------------------------------------------------------
  auto* lc = app.add_subcommand("layout-check",
                                "validate a layout and list its surfaces");
  static std::string lc_layout;
  lc->add_option("--layout", lc_layout)->required()->check(CLI::ExistingFile);
  lc->callback([&] {
    RoomLayout layout = load_layout(lc_layout);
    std::vector<Plane> planes = build_surfaces(layout);
    std::cout << planes.size() << " surfaces\n";
    double total = 0.0;
    for (const Plane& p : planes) {
      std::cout << "  " << p.id << ": " << p.extent_u << " x " << p.extent_v
                << " m, material " << p.material << ", reflectance "
                << p.reflectance << "\n";
      total += p.area();
    }
    std::cout << "total area " << total << " m^2\n";
  });

  // ---- layout-perturb ----------------------------------------------------------------
  auto* lp = app.add_subcommand(
      "layout-perturb", "per-pixel heat differences across layout variants");
  static SceneArgs lp_scene;
  static std::vector<std::string> lp_perturbed;
  static std::string lp_out;
  static double lp_bound = 2.0;
  static PngBounds lp_heat{21.0, 26.0};
  lp_scene.add_to(lp);
  lp->add_option("--perturbed", lp_perturbed, "perturbed layout JSON(s)")
      ->required()
      ->check(CLI::ExistingFile);
  lp->add_option("--out", lp_out, "run directory")->required();
  lp->add_option("--bound-c", lp_bound, "error PNG bound, +-degC");
  lp->add_option("--png-min", lp_heat.lo);
  lp->add_option("--png-max", lp_heat.hi);
  lp->callback([&] {
    Scene scene = lp_scene.load();
    std::vector<RoomLayout> variants;
    for (const std::string& f : lp_perturbed) variants.push_back(load_layout(f));
    fs::create_directories(lp_out);
    ManifestBuilder mb("layout-perturb");
    lp_scene.digest_into(mb);
    for (const std::string& f : lp_perturbed) mb.input(f);
    PerturbationResult res =
        layout_perturbation(scene, variants, lp_bound, threads);
    write_heat_outputs(fs::path(lp_out) / "heat_base.bin", res.base_heat_map_k,
                       lp_heat);
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
      std::string stem = "layout_" + std::to_string(i + 1);
      write_heat_outputs(fs::path(lp_out) / ("heat_" + stem + ".bin"),
                         res.runs[i].heat_map_k, lp_heat);
      write_float_map(fs::path(lp_out) / ("error_" + stem + ".bin"),
                      res.runs[i].error.diff_c);
      write_false_color_png(fs::path(lp_out) / ("error_" + stem + ".png"),
                            res.runs[i].error.diff_c,
                            res.runs[i].error.bound_lo,
                            res.runs[i].error.bound_hi);
    }
    mb.j["error_bound_c"] = lp_bound;
    mb.finish(lp_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
