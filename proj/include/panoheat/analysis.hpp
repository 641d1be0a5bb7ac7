#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "panoheat/errors.hpp"
#include "panoheat/heatsim.hpp"
#include "panoheat/hdr_io.hpp"
#include "panoheat/layout.hpp"
#include "panoheat/mesh.hpp"
#include "panoheat/photometry.hpp"
#include "panoheat/projection.hpp"
#include "panoheat/thermography.hpp"

namespace panoheat {

// Everything a single simulation needs. Analysis runs clone and perturb it.
struct Scene {
  RoomLayout layout;
  HdrPanorama pano;
  MaterialDb materials;
  SimConfig cfg;
};

struct SceneRun {
  SurfaceMesh mesh;
  SimResult sim;
  ScalarMap baked_final_k;  // panorama-space final heat map, Kelvin
};

// The whole pipeline: surfaces -> mesh -> vertex flux -> transient solve ->
// panoramic bake of the final field.
inline SceneRun run_scene(const Scene& scene) {
  scene.pano.validate();
  std::vector<Plane> planes = build_surfaces(scene.layout);
  SurfaceMesh mesh =
      mesh_surfaces(planes, scene.cfg.grid_h_m, scene.layout.apertures);
  project_vertices(mesh, scene.layout.camera, scene.pano.width(),
                   scene.pano.height());
  ScalarMap lum = luminance_from_hdr(scene.pano, scene.cfg.efficacy,
                                     scene.cfg.luminance_weights);
  PlaneValues flux = flux_at_vertices(mesh, lum, scene.cfg.lux_per_watt);
  SimResult sim = run_sim(mesh, flux, materials_for(mesh, scene.materials),
                          betas_for(mesh, scene.cfg), scene.cfg);

  PlaneValues final_values;
  for (const ScalarMap& plane : sim.final_field.planes)
    final_values.push_back(plane.data());
  BakeResult baked =
      bake_to_panorama(mesh, final_values, scene.layout.camera,
                       scene.pano.width(), scene.pano.height());
  return {std::move(mesh), std::move(sim), std::move(baked.map)};
}

inline ScalarMap subtract_maps(const ScalarMap& a, const ScalarMap& b) {
  if (!a.same_shape(b)) throw InputError("error map: dimension mismatch");
  ScalarMap out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

// Signed per-pixel difference with display bounds.
struct ErrorMap {
  ScalarMap diff_c;
  double bound_lo = -2.0;
  double bound_hi = 2.0;
};

// Runs jobs 0..n-1 on up to max_threads workers (0 = hardware default).
// Each job writes only its own slot, so results are order-independent.
inline void run_indexed(std::size_t n, unsigned max_threads,
                        const std::function<void(std::size_t)>& job) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned workers = max_threads == 0 ? hw : std::min(max_threads, hw);
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, n == 0 ? 1 : n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

using SweepValue = std::variant<double, std::string>;

inline std::string sweep_value_label(const SweepValue& v) {
  if (std::holds_alternative<std::string>(v))
    return std::get<std::string>(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::get<double>(v));
  return buf;
}

struct SweepSpec {
  std::string parameter;  // material | density | conductivity |
                          // specific_heat | thickness | outdoor_temp |
                          // toggle_matrix
  std::vector<SweepValue> values;
  SweepValue baseline;
  std::vector<PatchSpec> patches;

  void validate() const {
    static const char* known[] = {"material",      "density",
                                  "conductivity",  "specific_heat",
                                  "thickness",     "outdoor_temp",
                                  "toggle_matrix"};
    if (std::find(std::begin(known), std::end(known), parameter) ==
        std::end(known))
      throw InputError("unknown sweep parameter: " + parameter);
    if (parameter == "toggle_matrix") return;  // fixed 8 runs, all-on baseline
    if (values.empty()) throw InputError("sweep values must be non-empty");
    if (std::find(values.begin(), values.end(), baseline) == values.end())
      throw InputError("sweep baseline must be one of the values");
    if (patches.empty()) throw InputError("sweep needs at least one patch");
  }

  static SweepSpec from_json(const nlohmann::json& j);
};

inline SweepValue sweep_value_from_json(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.get<double>();
}

inline SweepSpec SweepSpec::from_json(const nlohmann::json& j) {
  SweepSpec s;
  try {
    s.parameter = j.at("parameter").get<std::string>();
    if (j.contains("values"))
      for (const auto& v : j.at("values"))
        s.values.push_back(sweep_value_from_json(v));
    if (j.contains("baseline"))
      s.baseline = sweep_value_from_json(j.at("baseline"));
    if (j.contains("patches")) {
      for (const auto& p : j.at("patches"))
        s.patches.push_back({p.at("u").get<double>(), p.at("v").get<double>(),
                             p.at("radius").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("sweep JSON: ") + e.what());
  }
  s.validate();
  return s;
}

// Applies one sweep value to a scene copy. Material-property parameters
// override every surface's material; "off" disables indoor-outdoor exchange
// in an outdoor_temp sweep.
inline Scene apply_sweep_value(const Scene& base, const std::string& parameter,
                               const SweepValue& value) {
  Scene s = base;
  auto numeric = [&]() -> double {
    if (!std::holds_alternative<double>(value))
      throw InputError("sweep value for " + parameter + " must be numeric");
    return std::get<double>(value);
  };
  if (parameter == "material") {
    if (!std::holds_alternative<std::string>(value))
      throw InputError("material sweep values must be material names");
    std::string name = std::get<std::string>(value);
    s.materials.get(name);  // existence check
    for (auto& [id, cfg] : s.layout.surfaces) cfg.material = name;
    SurfaceConfig def = s.layout.surfaces.count("default")
                            ? s.layout.surfaces["default"]
                            : SurfaceConfig{};
    def.material = name;
    s.layout.surfaces["default"] = def;
  } else if (parameter == "density" || parameter == "conductivity" ||
             parameter == "specific_heat") {
    double v = numeric();
    MaterialDb patched;
    std::vector<Plane> planes = build_surfaces(s.layout);
    for (const Plane& p : planes) {
      MaterialProps m = s.materials.get(p.material);
      if (parameter == "density") m.rho = v;
      if (parameter == "conductivity") m.k = v;
      if (parameter == "specific_heat") m.c_p = v;
      if (!patched.contains(m.name)) patched.add(m);
    }
    s.materials = patched;
  } else if (parameter == "thickness") {
    s.cfg.thickness_m = numeric();
  } else if (parameter == "outdoor_temp") {
    if (std::holds_alternative<std::string>(value)) {
      if (std::get<std::string>(value) != "off")
        throw InputError("outdoor_temp values are Kelvin or \"off\"");
      s.cfg.toggles.exchange = false;
      s.cfg.t_out_k.reset();
    } else {
      s.cfg.toggles.exchange = true;
      s.cfg.t_out_k = std::get<double>(value);
    }
  } else {
    throw InputError("unknown sweep parameter: " + parameter);
  }
  return s;
}

struct SweepPatchRow {
  std::string value_label;
  std::size_t patch_id = 0;
  double mean_c = 0.0;
  double delta_c = 0.0;
  double pct_error = 0.0;  // of the baseline mean in degC
};

struct SweepResult {
  std::vector<std::string> value_labels;   // in spec order
  std::vector<ScalarMap> heat_maps_k;      // per value, panorama space
  std::vector<SweepPatchRow> rows;         // value-major, patch-minor
  std::size_t baseline_index = 0;
};

inline SweepResult run_sweep(const SweepSpec& spec, const Scene& base,
                             unsigned max_threads = 1) {
  spec.validate();
  if (spec.parameter == "toggle_matrix")
    throw InputError("toggle_matrix runs through toggle_matrix()");

  SweepResult res;
  res.heat_maps_k.resize(spec.values.size());
  for (const SweepValue& v : spec.values)
    res.value_labels.push_back(sweep_value_label(v));
  res.baseline_index = static_cast<std::size_t>(
      std::find(spec.values.begin(), spec.values.end(), spec.baseline) -
      spec.values.begin());

  std::vector<std::optional<std::string>> failures(spec.values.size());
  run_indexed(spec.values.size(), max_threads, [&](std::size_t i) {
    try {
      Scene s = apply_sweep_value(base, spec.parameter, spec.values[i]);
      res.heat_maps_k[i] = run_scene(s).baked_final_k;
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < failures.size(); ++i)
    if (failures[i])
      throw NumericError("sweep value " + res.value_labels[i] +
                         " failed: " + *failures[i]);

  std::vector<double> baseline_means;
  const ScalarMap& base_map = res.heat_maps_k[res.baseline_index];
  for (const PatchSpec& p : spec.patches)
    baseline_means.push_back(
        kelvin_to_celsius(patch_mean(base_map, p).mean));

  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    for (std::size_t pi = 0; pi < spec.patches.size(); ++pi) {
      double mean_c =
          kelvin_to_celsius(patch_mean(res.heat_maps_k[i], spec.patches[pi]).mean);
      double delta = mean_c - baseline_means[pi];
      res.rows.push_back({res.value_labels[i], pi, mean_c, delta,
                          100.0 * delta / baseline_means[pi]});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Transfer-toggle matrix: all conduction/radiation/convection combinations,
// error maps against the all-on baseline.
// ---------------------------------------------------------------------------

struct ToggleRun {
  Toggles toggles;
  std::string label;
  ScalarMap heat_map_k;
  ScalarMap error_map_c;  // run - baseline, degC
  double max_abs_error_c = 0.0;
};

inline std::string toggle_label(const Toggles& t) {
  std::string s;
  if (t.conduction) s += "conduction+";
  if (t.radiation) s += "radiation+";
  if (t.convection) s += "convection+";
  if (s.empty()) return "none";
  s.pop_back();
  return s;
}

inline std::vector<ToggleRun> toggle_matrix(const Scene& base,
                                            unsigned max_threads = 1) {
  std::vector<ToggleRun> runs(8);
  for (int bits = 7; bits >= 0; --bits) {
    ToggleRun r;
    r.toggles.conduction = bits & 4;
    r.toggles.radiation = bits & 2;
    r.toggles.convection = bits & 1;
    r.toggles.exchange = false;
    r.label = toggle_label(r.toggles);
    runs[7 - bits] = std::move(r);
  }
  run_indexed(runs.size(), max_threads, [&](std::size_t i) {
    Scene s = base;
    s.cfg.toggles = runs[i].toggles;
    s.cfg.t_out_k.reset();
    runs[i].heat_map_k = run_scene(s).baked_final_k;
  });
  const ScalarMap& baseline = runs[0].heat_map_k;  // all mechanisms on
  for (ToggleRun& r : runs) {
    r.error_map_c = subtract_maps(r.heat_map_k, baseline);
    for (double v : r.error_map_c.data())
      r.max_abs_error_c = std::max(r.max_abs_error_c, std::abs(v));
  }
  return runs;
}

// ---------------------------------------------------------------------------
// Simulation vs. thermal-camera comparison
// ---------------------------------------------------------------------------

struct CompareRow {
  std::size_t patch_id = 0;
  double sim_mean_c = 0.0;
  double thermal_mean_c = 0.0;
  double delta_c = 0.0;
};

// Crops the panoramic heat map to the camera's field of view (nearest
// sampling keeps surface seams crisp) and compares per-patch means in degC.
// Patches are in the perspective image's pixel coordinates.
inline std::vector<CompareRow> compare_to_thermal(
    const ScalarMap& sim_pano_k, const PerspectiveSpec& pose,
    const ScalarMap& thermal_k, const std::vector<PatchSpec>& patches) {
  PerspectiveSpec spec = pose;
  spec.out_width = thermal_k.width();
  spec.out_height = thermal_k.height();
  ScalarMap crop = crop_perspective(sim_pano_k, spec, Sampling::kNearest);
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    double sim_c = kelvin_to_celsius(patch_mean(crop, patches[i]).mean);
    double th_c = kelvin_to_celsius(patch_mean(thermal_k, patches[i]).mean);
    rows.push_back({i, sim_c, th_c, sim_c - th_c});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Layout perturbation error maps
// ---------------------------------------------------------------------------

struct PerturbationRun {
  ScalarMap heat_map_k;
  ErrorMap error;  // vs the base layout, degC
};

struct PerturbationResult {
  ScalarMap base_heat_map_k;
  std::vector<PerturbationRun> runs;
};

// Every layout is simulated from scratch; nothing is reused incrementally.
inline PerturbationResult layout_perturbation(
    const Scene& base, const std::vector<RoomLayout>& perturbed,
    double display_bound_c = 2.0, unsigned max_threads = 1) {
  PerturbationResult res;
  res.base_heat_map_k = run_scene(base).baked_final_k;
  res.runs.resize(perturbed.size());
  run_indexed(perturbed.size(), max_threads, [&](std::size_t i) {
    Scene s = base;
    s.layout = perturbed[i];
    res.runs[i].heat_map_k = run_scene(s).baked_final_k;
    res.runs[i].error.diff_c =
        subtract_maps(res.runs[i].heat_map_k, res.base_heat_map_k);
    res.runs[i].error.bound_lo = -display_bound_c;
    res.runs[i].error.bound_hi = display_bound_c;
  });
  return res;
}

// ---------------------------------------------------------------------------
// CSV emission (fixed row order, %.10g formatting)
// ---------------------------------------------------------------------------

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "value,patch_id,mean_C,delta_C,pct_error\n";
  for (const SweepPatchRow& row : r.rows)
    os << row.value_label << ',' << row.patch_id << ','
       << csv_number(row.mean_c) << ',' << csv_number(row.delta_c) << ','
       << csv_number(row.pct_error) << '\n';
  return os.str();
}

inline std::string toggle_csv(const std::vector<ToggleRun>& runs) {
  std::ostringstream os;
  os << "combo,conduction,radiation,convection,max_abs_error_C\n";
  for (const ToggleRun& r : runs)
    os << r.label << ',' << r.toggles.conduction << ',' << r.toggles.radiation
       << ',' << r.toggles.convection << ','
       << csv_number(r.max_abs_error_c) << '\n';
  return os.str();
}

inline std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "patch_id,sim_mean_C,thermal_mean_C,delta_C\n";
  for (const CompareRow& r : rows)
    os << r.patch_id << ',' << csv_number(r.sim_mean_c) << ','
       << csv_number(r.thermal_mean_c) << ',' << csv_number(r.delta_c) << '\n';
  return os.str();
}

inline std::string patch_stats_csv(const std::vector<PatchStats>& stats) {
  std::ostringstream os;
  os << "patch_id,mean,count\n";
  for (std::size_t i = 0; i < stats.size(); ++i)
    os << i << ',' << csv_number(stats[i].mean) << ',' << stats[i].count
       << '\n';
  return os.str();
}

}  // namespace panoheat
